#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fractaldim/dimension.hpp"
#include "fractaldim/errors.hpp"
#include "fractaldim/measures.hpp"
#include "helpers.hpp"

using namespace fractaldim;
using namespace fractaldim::testing;

TEST_CASE("lyapunov exponent of constant-derivative maps is exact") {
  const auto sys = cantor_system();
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 6, 0);
  const auto cyl = lyapunov_cylinder(sys, mu);
  CHECK(cyl.chi == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  for (double v : cyl.by_level)
    CHECK(v == doctest::Approx(std::log(3.0)).epsilon(1e-13));

  const auto run = chaos_game(sys, half_weights(), 20000, 3, 500, true);
  const auto traj = lyapunov_trajectory(sys, run);
  CHECK(traj.chi == doctest::Approx(std::log(3.0)).epsilon(1e-13));
  CHECK(traj.std_error < 1e-12);
}

TEST_CASE("cylinder and trajectory lyapunov agree on a nonlinear family") {
  const auto sys = gauss_system(6);
  const auto w = geometric_weights(6, 0.5);
  const auto run = chaos_game(sys, w, 200000, 17, 1000, true);
  const auto traj = lyapunov_trajectory(sys, run);
  std::vector<Symbol> syms(run.symbols.begin() + run.burn_in,
                           run.symbols.end());
  const auto mu = empirical_cylinders(syms, 6, 8);
  const auto cyl = lyapunov_cylinder(sys, mu);
  CHECK(traj.chi > 0.0);
  CHECK(std::fabs(traj.chi - cyl.chi) < 0.01);
}

TEST_CASE("entropy estimates recover product-measure entropies") {
  const auto fair = CylinderMeasure::bernoulli({0.5, 0.5}, 8, 0);
  CHECK(entropy_estimate(fair).h == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  const auto biased = CylinderMeasure::bernoulli({1.0 / 3.0, 2.0 / 3.0}, 10, 0);
  const auto est = entropy_estimate(biased);
  const double expect = -(std::log(1.0 / 3.0) / 3.0 +
                          2.0 * std::log(2.0 / 3.0) / 3.0);
  CHECK(est.h == doctest::Approx(expect).epsilon(1e-12));
  CHECK(est.h == doctest::Approx(0.6365141682948128).epsilon(1e-12));
  // H_n / n converges to the same value for product measures.
  CHECK(est.ratio.back() == doctest::Approx(expect).epsilon(1e-12));

  const auto sys = cantor_system();
  const auto run = chaos_game(sys, half_weights(), 200000, 23, 1000, true);
  CHECK(entropy_trajectory(half_weights(), run) ==
        doctest::Approx(std::log(2.0)).epsilon(2e-3));
}

TEST_CASE("projection keeps full entropy under strong separation") {
  const auto sys = cantor_system();
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 12, 0);
  const auto deltas = RLadder::geometric(0.25, 0.5, 7).radii;
  const auto pe = projection_entropy(sys, mu, deltas, std::log(2.0));
  CHECK(std::fabs(pe.estimate - std::log(2.0)) <= 0.03);
}

TEST_CASE("projection destroys entropy for coincident maps") {
  // Both symbols drive the same contraction: the coded point forgets the
  // symbol sequence entirely.
  IFSSystem collapsed({ConformalMap::affine1d(1.0 / 3.0, 0.0),
                       ConformalMap::affine1d(1.0 / 3.0, 0.0)},
                      Region::interval(0.0, 1.0), 1.0 / 3.0, 1.0 / 3.0);
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 12, 0);
  const auto deltas = RLadder::geometric(0.25, 0.5, 7).radii;
  const auto pe = projection_entropy(collapsed, mu, deltas, std::log(2.0));
  CHECK(pe.estimate <= 0.03);
}

TEST_CASE("projected entropy never exceeds the symbolic entropy") {
  const auto sys = dyadic_overlap_system();
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 12, 0);
  const auto deltas = RLadder::geometric(0.25, 0.5, 7).radii;
  const auto pe = projection_entropy(sys, mu, deltas);
  CHECK(pe.estimate <= std::log(2.0) + 0.02);
  CHECK(pe.estimate >= 0.0);
}

TEST_CASE("local dimension of lebesgue measure is one") {
  GridMeasure uni = GridMeasure::uniform(Region::interval(0.0, 1.0), 4096);
  const auto ladder = RLadder::geometric(0.1, 0.5, 8);
  for (double x : {0.3, 0.5, 0.62}) {
    const auto ld = local_dimension(uni, Point::d1(x), ladder);
    CHECK(std::fabs(ld.dim - 1.0) <= 0.02);
    CHECK(ld.r2 > 0.99);
  }
}

TEST_CASE("local dimension along the cantor ladder matches log2/log3") {
  const auto sys = cantor_system();
  const auto res = stationary_measure(sys, half_weights(), 4096);
  const auto ladder = RLadder::geometric(0.25, 1.0 / 3.0, 7);
  // Radii that shrink by the contraction ratio see mass halve each rung.
  const auto ld = local_dimension(res.measure, Point::d1(0.0), ladder,
                                  100.0 / 4096.0);
  CHECK(std::fabs(ld.dim - 0.6309297535714574) <= 0.02);
  CHECK(ld.r2 > 0.98);
}

TEST_CASE("an atom has local dimension zero and breaks exactness") {
  GridMeasure atom =
      GridMeasure::point_mass(Region::interval(0.0, 1.0), 1024, Point::d1(0.5));
  const auto ladder = RLadder::geometric(0.1, 0.5, 6);
  const auto ld = local_dimension(atom, Point::d1(0.5), ladder);
  CHECK(std::fabs(ld.dim) <= 1e-12);

  // Half atom, half uniform: local dimensions split and the spread is large.
  GridMeasure mix = GridMeasure::uniform(Region::interval(0.0, 1.0), 1024);
  for (std::size_t b = 0; b < mix.bins(); ++b) mix.mass(b) *= 0.5;
  mix.mass(mix.bin_of(Point::d1(0.5))) += 0.5;
  const auto rep = exact_dimensionality_test(mix, ladder, 256, 9);
  CHECK(rep.stddev > 0.2);
}

TEST_CASE("exact dimensionality holds for the fair cantor measure") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const auto run = chaos_game(sys, w, 300000, 29, 1000, true);
  const auto rep = exact_dimensionality_orbit(sys, w, run, 128, 20, 31);
  CHECK(std::fabs(rep.mean - 0.6309297535714574) <= 0.03);
  CHECK(rep.stddev <= 0.05);
  CHECK(rep.median_r2 >= 0.98);
}

TEST_CASE("orbit local dimension at a fixed time regresses likelihood") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const auto run = chaos_game(sys, w, 50000, 37, 1000, true);
  const auto ld = local_dimension_at_time(sys, w, run, 30000, 16);
  // log(2)/log(3) exactly, since both factors are constant per step.
  CHECK(ld.dim == doctest::Approx(0.6309297535714574).epsilon(1e-9));
  CHECK(ld.r2 > 0.999);
}

TEST_CASE("box dimension of samples") {
  const auto sys = cantor_system();
  const auto run = chaos_game(sys, half_weights(), 200000, 41, 1000);
  std::vector<double> deltas;
  for (int k = 2; k <= 7; ++k) deltas.push_back(std::pow(3.0, -k));
  const auto bd = box_dimension(run.measure, sys.domain(), deltas);
  CHECK(std::fabs(bd.dim - 0.6309297535714574) <= 0.05);

  // A full-interval sample fills every cell: dimension one.
  EmpiricalMeasure line;
  for (int i = 0; i < 20000; ++i)
    line.points.push_back(Point::d1((i + 0.5) / 20000.0));
  std::vector<double> d2{0.05, 0.025, 0.0125, 0.00625, 0.003125};
  const auto bl = box_dimension(line, Region::interval(0.0, 1.0), d2);
  CHECK(std::fabs(bl.dim - 1.0) <= 0.02);
}

TEST_CASE("dimension formula guards its inputs") {
  CHECK(dimension_formula(std::log(2.0), std::log(3.0)) ==
        doctest::Approx(0.6309297535714574).epsilon(1e-15));
  CHECK_THROWS_AS(dimension_formula(1.0, 0.0), NonHyperbolic);
  CHECK_THROWS_AS(dimension_formula(1.0, -2.0), NonHyperbolic);
  CHECK_THROWS_AS(dimension_formula(-0.5, 1.0), ValidationError);
}

TEST_CASE("separation diagnostics distinguish overlap from gaps") {
  CHECK(image_set_gap(cantor_system()) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(images_strongly_separated(cantor_system()));
  CHECK(image_set_gap(dyadic_overlap_system()) < 0.0);
  CHECK_FALSE(images_strongly_separated(dyadic_overlap_system()));
}
