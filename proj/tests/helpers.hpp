#pragma once

// Shared model systems for the test suites.

#include <cmath>
#include <vector>

#include "fractaldim/ifs.hpp"
#include "fractaldim/weights.hpp"

namespace fractaldim::testing {

// Middle-thirds Cantor system: phi_1 = x/3, phi_2 = x/3 + 2/3 on [0,1].
inline IFSSystem cantor_system() {
  return IFSSystem({ConformalMap::affine1d(1.0 / 3.0, 0.0),
                    ConformalMap::affine1d(1.0 / 3.0, 2.0 / 3.0)},
                   Region::interval(0.0, 1.0), 1.0 / 3.0, 1.0 / 3.0,
                   BdpConstants{0.0, 1.0});
}

inline WeightSystem half_weights() {
  return WeightSystem({WeightFn::constant(0.5), WeightFn::constant(0.5)});
}

// Place-dependent weights p_1 = (1+x)/3, p_2 = (2-x)/3 on the Cantor maps.
inline WeightSystem place_dependent_weights() {
  return WeightSystem({WeightFn::affine(1.0 / 3.0, 1.0 / 3.0),
                       WeightFn::affine(2.0 / 3.0, -1.0 / 3.0)},
                      0.0, HolderConstants{1.0 / 3.0, 1.0});
}

// Overlapping dyadic pair: phi_1 = x/2, phi_2 = x/2 + 1/4 on [0,1].
inline IFSSystem dyadic_overlap_system() {
  return IFSSystem({ConformalMap::affine1d(0.5, 0.0),
                    ConformalMap::affine1d(0.5, 0.25)},
                   Region::interval(0.0, 1.0), 0.5, 0.5,
                   BdpConstants{0.0, 1.0});
}

// Working truncation of the countable Moebius family x -> 1/(x+n),
// n = 2, 3, ...: symbol i is branch n = i + 1.  Branch 1 is excluded since
// |phi_1'(0)| = 1 breaks uniform contractivity.
inline IFSSystem gauss_system(int N, bool certified = true) {
  std::vector<ConformalMap> maps;
  for (int n = 2; n <= N + 1; ++n)
    maps.push_back(ConformalMap::moebius_branch(n));
  // sup |phi_n'| = 1/n^2 <= 1/4.
  return IFSSystem(std::move(maps), Region::interval(0.0, 1.0), 0.5, 0.25,
                   BdpConstants{2.0, 1.0}, true, certified);
}

inline WeightSystem geometric_weights(int N, double ratio) {
  std::vector<WeightFn> p;
  double total = 0.0, w = 1.0;
  for (int n = 1; n <= N; ++n, w *= ratio) total += w;
  w = 1.0;
  const double tail = w * std::pow(ratio, N) / (1.0 - ratio) /
                      (total + std::pow(ratio, N) / (1.0 - ratio));
  const double scale = (1.0 - tail) / total;
  for (int n = 1; n <= N; ++n, w *= ratio)
    p.push_back(WeightFn::constant(w * scale));
  return WeightSystem(std::move(p), tail, HolderConstants{0.0, 1.0});
}

}  // namespace fractaldim::testing
