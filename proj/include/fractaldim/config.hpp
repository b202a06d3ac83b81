#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fractaldim/geometry.hpp"
#include "fractaldim/ifs.hpp"
#include "fractaldim/weights.hpp"

namespace fractaldim {

// One map entry of a system definition.  Kinds:
//   affine          phi(x) = a x + b                      (1D)
//   moebius_branch  phi(x) = 1 / (x + n)                  (1D)
//   expression      phi given by a formula in x, with an optional
//                   closed-form derivative formula        (1D)
//   similarity      phi(z) = a z + b over complex a, b    (2D)
struct MapConfig {
  std::string kind;
  double a = 0.0, b = 0.0;                                // affine
  int n = 0;                                              // moebius_branch
  std::string formula, derivative;                        // expression
  double a_re = 0.0, a_im = 0.0, b_re = 0.0, b_im = 0.0;  // similarity
  bool operator==(const MapConfig&) const = default;
};

// One probability weight p_i.  Kinds: constant (value), affine (a + b*x),
// expression (formula in x).
struct WeightConfig {
  std::string kind;
  double value = 0.0;
  double a = 0.0, b = 0.0;
  std::string formula;
  bool operator==(const WeightConfig&) const = default;
};

struct SystemConfig {
  std::string name = "system";
  int dim = 1;
  std::vector<double> lo{0.0};
  std::vector<double> hi{1.0};
  std::vector<MapConfig> maps;
  std::vector<WeightConfig> weights;
  double tail_mass_bound = 0.0;
  double holder_C = 0.0;      // Holder modulus of the weights
  double holder_alpha = 1.0;
  double s = 0.0;             // declared contraction bound, in (0,1)
  double alpha = 0.0;         // declared derivative bound, in (0,1)
  double bdp_H = 0.0;         // distortion constants
  double bdp_beta = 1.0;
  bool countable_tail = false;
  bool tail_separation_certified = false;
  bool has_tail_region = false;  // region confining images of tail symbols
  std::vector<double> tail_lo, tail_hi;
  std::uint64_t seed = 1;
  double tol_code_point = 1e-12;
  double tol_separation = 1e-9;
  double tol_stationary_tv = 1e-9;
  bool operator==(const SystemConfig&) const = default;
};

// Parses a JSON system definition.  Throws ValidationError naming the line
// of the first syntax error, or the offending field for semantic ones.
SystemConfig parse_config(const std::string& text);
SystemConfig load_config(const std::string& path);

// Canonical serialization (sorted keys, two-space indent, trailing newline);
// parse(emit(cfg)) == cfg and emit is a fixed point after one round trip.
std::string emit_config(const SystemConfig& cfg);

IFSSystem build_system(const SystemConfig& cfg);
WeightSystem build_weights(const SystemConfig& cfg);
std::optional<Region> tail_region_of(const SystemConfig& cfg);

}  // namespace fractaldim
