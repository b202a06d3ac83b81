#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fractaldim/errors.hpp"
#include "fractaldim/measures.hpp"
#include "fractaldim/rng.hpp"
#include "helpers.hpp"

using namespace fractaldim;
using namespace fractaldim::testing;

TEST_CASE("transfer operator at a point sums weighted compositions") {
  const auto sys = cantor_system();
  const auto w = place_dependent_weights();
  auto Lf = transfer_apply(sys, w, [](const Point& p) { return p.x(); });
  // (Lf)(x) = p_1(x) phi_1(x) + p_2(x) phi_2(x).
  const double x = 0.3;
  const double expect = (1.0 + x) / 3.0 * (x / 3.0) +
                        (2.0 - x) / 3.0 * (x / 3.0 + 2.0 / 3.0);
  CHECK(Lf(Point::d1(x)) == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("adjoint duality: integral of Lf equals integral against L*mu") {
  const auto sys = cantor_system();
  const auto w = place_dependent_weights();
  // A small atomic measure pushed through the adjoint.
  std::vector<Point> atoms = {Point::d1(0.1), Point::d1(0.5), Point::d1(0.9)};
  std::vector<double> mass = {0.2, 0.5, 0.3};
  auto f = [](const Point& p) { return std::cos(3.0 * p.x()); };
  auto Lf = transfer_apply(sys, w, f);

  double lhs = 0.0;  // integral of Lf dmu
  for (std::size_t i = 0; i < atoms.size(); ++i) lhs += mass[i] * Lf(atoms[i]);

  EmpiricalMeasure mu;
  mu.points = atoms;
  mu.weights = mass;
  const EmpiricalMeasure push = adjoint_push(sys, w, mu);
  double rhs = 0.0;  // integral of f d(L* mu)
  for (std::size_t i = 0; i < push.points.size(); ++i)
    rhs += push.weight(i) * f(push.points[i]);

  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  // L* preserves total mass for normalized weights.
  double total = 0.0;
  for (std::size_t i = 0; i < push.points.size(); ++i)
    total += push.weight(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary fixed point on the fair Cantor measure") {
  const auto sys = cantor_system();
  const auto res = stationary_measure(sys, half_weights(), 2048);
  CHECK(res.converged);
  CHECK(res.attractive);
  CHECK(res.tv_last < 1e-8);
  // Self-similarity with equal weights puts the mean at 1/2.
  CHECK(res.measure.mean_1d() == doctest::Approx(0.5).epsilon(1e-6));
  // Mass splits evenly between the two map images.
  double left = 0.0;
  for (std::size_t b = 0; b < res.measure.bins(); ++b)
    if (res.measure.bin_center(b).x() < 0.5) left += res.measure.mass(b);
  CHECK(left == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("stationary fixed point is genuinely stationary: TV under L*") {
  const auto sys = cantor_system();
  const auto w = place_dependent_weights();
  const auto res = stationary_measure(sys, w, 4096);
  const GridMeasure again = adjoint_apply(sys, w, res.measure);
  double tv = 0.0;
  for (std::size_t b = 0; b < again.bins(); ++b)
    tv += std::fabs(again.mass(b) - res.measure.mass(b));
  CHECK(tv / 2.0 < 1e-8);
}

TEST_CASE("stationary measure of the overlapping dyadic pair") {
  // phi_1 = x/2, phi_2 = x/2 + 1/4 with fair coin: mean solves
  // m = (m/2) + (1/2)(1/4), so m = 1/4 ... iterated: m = E[x]/2 + 1/8.
  const auto sys = dyadic_overlap_system();
  const auto res = stationary_measure(sys, half_weights(), 4096);
  CHECK(res.converged);
  CHECK(res.measure.mean_1d() == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("point mass pushes to weighted atoms") {
  const auto sys = cantor_system();
  const auto w = place_dependent_weights();
  EmpiricalMeasure delta;
  delta.points = {Point::d1(1.0)};
  delta.weights = {1.0};
  const auto push = adjoint_push(sys, w, delta);
  REQUIRE(push.points.size() == 2);
  // Images phi_1(1) = 1/3 and phi_2(1) = 1 with weights p_i(1).
  CHECK(push.points[0].x() == doctest::Approx(1.0 / 3.0));
  CHECK(push.points[1].x() == doctest::Approx(1.0));
  CHECK(push.weight(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(push.weight(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("chaos game matches the operator fixed point") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const auto run = chaos_game(sys, w, 400000, 5);
  CHECK(run.tail_clamps == 0);
  CHECK(run.measure.mean_1d() == doctest::Approx(0.5).epsilon(4e-3));
  // The left third carries half the mass.
  double third = run.measure.ball_mass(Point::d1(1.0 / 6.0), 1.0 / 6.0);
  CHECK(third == doctest::Approx(0.5).epsilon(8e-3));
}

TEST_CASE("chaos game is reproducible and seed sensitive") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const auto a = chaos_game(sys, w, 5000, 42, 100, true);
  const auto b = chaos_game(sys, w, 5000, 42, 100, true);
  REQUIRE(a.symbols.size() == b.symbols.size());
  CHECK(a.symbols == b.symbols);
  for (std::size_t i = 0; i < a.pre_states.size(); ++i)
    CHECK(a.pre_states[i].x() == b.pre_states[i].x());
  const auto c = chaos_game(sys, w, 5000, 43, 100, true);
  CHECK(a.symbols != c.symbols);
}

TEST_CASE("sampler clamps into the declared tail") {
  // Weights summing to 0.9 with tail mass 0.1: the clamp count concentrates
  // near 10% of draws and the flag shows up on the run.
  const auto sys = cantor_system();
  WeightSystem w({WeightFn::constant(0.5), WeightFn::constant(0.4)}, 0.1);
  const auto run = chaos_game(sys, w, 100000, 7);
  CHECK(run.tail_clamps > 8000);
  CHECK(run.tail_clamps < 12000);

  bool clamped = false;
  const Symbol i = sample_index({0.5, 0.4}, 0.95, &clamped);
  CHECK(i == 2);
  CHECK(clamped);
  clamped = true;
  CHECK(sample_index({0.5, 0.4}, 0.2, &clamped) == 1);
  CHECK_FALSE(clamped);
}

TEST_CASE("gibbs approximation of a bernoulli potential is exact") {
  const auto psi = symbol_potential({std::log(0.3), std::log(0.7)});
  const auto mu = gibbs_approximation(psi, 0.0, 2, 6);
  CHECK(mu.deepest() == 6);
  CHECK(mu.weight(1, {1}) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(mu.weight(3, {2, 1, 2}) ==
        doctest::Approx(0.7 * 0.3 * 0.7).epsilon(1e-13));
  for (int L = 1; L <= 6; ++L)
    CHECK(mu.level_total(L) == doctest::Approx(1.0).epsilon(1e-12));
  // Marginal consistency across levels for a product measure.
  CHECK(mu.marginal_error(5) < 1e-12);
}

TEST_CASE("conditional measures on cylinders") {
  CylinderMeasure mu = CylinderMeasure::bernoulli({0.25, 0.75}, 5, 0);
  // Bernoulli: conditioning does not change the preceding block law.
  const auto cond = conditional_measure(mu, Word{{2, 2}, 0}, 2);
  double total = 0.0;
  for (const auto& [v, p] : cond.past_weights) {
    REQUIRE(v.size() == 2);
    const double expect =
        (v[0] == 1 ? 0.25 : 0.75) * (v[1] == 1 ? 0.25 : 0.75);
    CHECK(p == doctest::Approx(expect).epsilon(1e-12));
    total += p;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // A handcrafted two-level measure with memory: P(prev=1 | next=2) via the
  // exact joint table.
  CylinderMeasure markov(0, 2);
  markov.set_weight(1, {1}, 0.5);
  markov.set_weight(1, {2}, 0.5);
  markov.set_weight(2, {1, 1}, 0.45);
  markov.set_weight(2, {1, 2}, 0.05);
  markov.set_weight(2, {2, 1}, 0.25);
  markov.set_weight(2, {2, 2}, 0.25);
  const auto c2 = conditional_measure(markov, Word{{2}, 0}, 1);
  CHECK(c2.past_weights.at({1}) == doctest::Approx(0.05 / 0.30).epsilon(1e-12));
  CHECK(c2.past_weights.at({2}) == doctest::Approx(0.25 / 0.30).epsilon(1e-12));

  // Conditioning on a null cylinder is an error, not a NaN.
  CylinderMeasure null2(0, 2);
  null2.set_weight(1, {1}, 1.0);
  null2.set_weight(1, {2}, 0.0);
  null2.set_weight(2, {1, 1}, 1.0);
  null2.set_weight(2, {1, 2}, 0.0);
  null2.set_weight(2, {2, 1}, 0.0);
  null2.set_weight(2, {2, 2}, 0.0);
  CHECK_THROWS_AS(conditional_measure(null2, Word{{2}, 0}, 1), ZeroMarginal);
}

TEST_CASE("empirical cylinder frequencies approximate the chain law") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const auto run = chaos_game(sys, w, 200000, 11, 1000, true);
  std::vector<Symbol> syms(run.symbols.begin() + run.burn_in,
                           run.symbols.end());
  const auto mu = empirical_cylinders(syms, 2, 4);
  CHECK(mu.deepest() == 4);
  for (int L = 1; L <= 4; ++L)
    CHECK(mu.level_total(L) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mu.weight(1, {1}) == doctest::Approx(0.5).epsilon(5e-3));
  CHECK(mu.weight(4, {1, 2, 1, 2}) ==
        doctest::Approx(1.0 / 16.0).epsilon(5e-2));
}

TEST_CASE("stationary solver reports non-convergence honestly") {
  const auto sys = cantor_system();
  const auto w = half_weights();
  const double tol = 1e-9;
  // Calibrate a cutoff where the solver is close but not yet inside tol:
  // stopping there must return the flag instead of throwing.
  const auto full = stationary_measure(sys, w, 512, tol);
  REQUIRE(full.converged);
  int cutoff = 0;
  for (std::size_t k = 0; k < full.tv_history.size(); ++k)
    if (full.tv_history[k] > 2.0 * tol && full.tv_history[k] < 50.0 * tol)
      cutoff = static_cast<int>(k) + 1;
  REQUIRE(cutoff > 0);
  const auto res = stationary_measure(sys, w, 512, tol, cutoff, -1.0);
  CHECK_FALSE(res.converged);
  CHECK(res.tv_last > tol);
  // A hopeless residual throws.
  CHECK_THROWS_AS(stationary_measure(sys, place_dependent_weights(), 4096,
                                     1e-300, 3, -1.0),
                  NoConvergence);
}
