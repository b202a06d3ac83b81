#pragma once

#include <cstdint>
#include <optional>

#include "measures.hpp"

namespace fractaldim {

struct LyapunovReport {
  double chi = 0.0;               // final estimate
  std::vector<double> by_level;   // per-cylinder-level values (cylinder route)
  double std_error = 0.0;         // trajectory route only
  long long samples = 0;
};

// chi = -sum_w mu([w]) log |phi'_{w_0}(pi(sigma per(w)))| over the deepest
// stored level, with shallower levels kept for convergence diagnostics.
LyapunovReport lyapunov_cylinder(const IFSSystem& sys,
                                 const CylinderMeasure& mu,
                                 int eval_depth = kDefaultEvalDepth);

// chi = -(1/T) sum_t log |phi'_{i_t}(x_t)| along a recorded sampler path.
LyapunovReport lyapunov_trajectory(const IFSSystem& sys,
                                   const ChaosGameRun& run);

struct EntropyEstimate {
  double h = 0.0;                  // H_n - H_{n-1} at the deepest level
  std::vector<double> by_level;    // successive differences
  std::vector<double> ratio;       // H_n / n
  int levels = 0;
};

EntropyEstimate entropy_estimate(const CylinderMeasure& mu);

// Likelihood rate -(1/T) sum_t log p_{i_t}(x_t); for these chains this is
// the entropy of the symbolic stationary measure.
double entropy_trajectory(const WeightSystem& w, const ChaosGameRun& run);

struct ProjectionEntropyResult {
  std::vector<double> deltas;
  std::vector<double> values;  // conditional-entropy gap per delta
  double estimate = 0.0;       // median over the ladder
  bool clamped = false;        // hit the [0, cap] clamp
};

// Entropy the coding retains after projection: the gap
// H(xi | sigma^{-1} pi^{-1} eps_delta) - H(xi | pi^{-1} eps_delta),
// evaluated on the deepest stored cylinder level against a grid of cells of
// width delta.  Values clamp into [0, cap] when a cap is supplied.
ProjectionEntropyResult projection_entropy(const IFSSystem& sys,
                                           const CylinderMeasure& mu,
                                           const std::vector<double>& deltas,
                                           std::optional<double> cap = {},
                                           int eval_depth = kDefaultEvalDepth);

// Radius ladder for ball-mass regressions.
struct RLadder {
  std::vector<double> radii;
  static RLadder geometric(double r0, double factor, int count);
};

struct LocalDim {
  double dim = 0.0;
  double r2 = 0.0;
  int radii_used = 0;
  Point at;
};

// Slope of log mu(B(x,r)) against log r over the ladder; radii whose ball
// mass falls below mass_floor are dropped, and fewer than two usable radii
// raise EmptyBall.
LocalDim local_dimension(const GridMeasure& mu, const Point& x,
                         const RLadder& ladder, double mass_floor = 0.0);
LocalDim local_dimension(const EmpiricalMeasure& mu, const Point& x,
                         const RLadder& ladder, double mass_floor = 0.0);

// Orbit-likelihood local dimension at a sampled path time T: regress the
// accumulated transition log-likelihood sum_{j<=k} log p_{i_{T-j}}(x_{T-j})
// against the log-diameter of the depth-k composition cell
// phi_{i_{T-1}} o ... o phi_{i_{T-k}}(V), k = 1..depth.  The path must have
// been recorded.
LocalDim local_dimension_at_time(const IFSSystem& sys, const WeightSystem& w,
                                 const ChaosGameRun& run, long long T,
                                 int depth);

struct DimensionReport {
  std::vector<LocalDim> locals;
  double mean = 0.0;
  double stddev = 0.0;
  double median_r2 = 0.0;
};

// Local dimension at `points` positions drawn from the measure itself.
DimensionReport exact_dimensionality_test(const GridMeasure& mu,
                                          const RLadder& ladder, int points,
                                          std::uint64_t seed,
                                          double mass_floor = 0.0);
DimensionReport exact_dimensionality_test(const EmpiricalMeasure& mu,
                                          const RLadder& ladder, int points,
                                          std::uint64_t seed,
                                          double mass_floor = 0.0);

// Orbit-likelihood variant over `points` sampled path times.
DimensionReport exact_dimensionality_orbit(const IFSSystem& sys,
                                           const WeightSystem& w,
                                           const ChaosGameRun& run, int points,
                                           int depth, std::uint64_t seed);

// dim = h / chi; requires a strictly positive finite Lyapunov exponent.
double dimension_formula(double h, double chi);

struct BoxDim {
  double dim = 0.0;
  double r2 = 0.0;
  std::vector<double> deltas;
  std::vector<long long> counts;
};

// Slope of log N(delta) against log(1/delta), N(delta) = occupied delta-cells.
BoxDim box_dimension(const EmpiricalMeasure& mu, const Region& V,
                     const std::vector<double>& deltas);

// Largest gap between the closed map images phi_i(V); positive means the
// images are pairwise disjoint (strong separation).
double image_set_gap(const IFSSystem& sys);
bool images_strongly_separated(const IFSSystem& sys);

}  // namespace fractaldim
