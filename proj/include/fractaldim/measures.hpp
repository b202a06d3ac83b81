#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "weights.hpp"

namespace fractaldim {

// Transfer operator (Lg)(x) = sum_i p_i(x) g(phi_i(x)) acting on functions.
std::function<double(const Point&)> transfer_apply(
    const IFSSystem& sys, const WeightSystem& w,
    std::function<double(const Point&)> g);

// Exact adjoint pushforward of a discrete measure: each atom (x, m) spawns
// atoms (phi_i(x), m p_i(x)).
EmpiricalMeasure adjoint_push(const IFSSystem& sys, const WeightSystem& w,
                              const EmpiricalMeasure& mu);

// Adjoint step rebinned onto the grid (used for fixed-point iteration).
GridMeasure adjoint_apply(const IFSSystem& sys, const WeightSystem& w,
                          const GridMeasure& mu);

struct StationaryResult {
  GridMeasure measure;
  int iterations = 0;
  double tv_last = 0.0;      // TV between the final two iterates
  double attract_gap = 0.0;  // TV between independent starting measures
  bool attractive = false;
  double mass_leak_max = 0.0;  // largest per-step mass lost to the tail
  bool converged = true;       // tv_last < tol before max_iter ran out
  std::vector<double> tv_history;  // TV increment per iteration (first start)
};

// Grid fixed point of the adjoint operator, iterated from two different
// initial measures to witness attractivity (their limits within 10*tol).
// Stops at TV increment < tol; if max_iter runs out the result is still
// returned while the increment is within 100*tol (flagged via `converged`),
// and NoConvergence is thrown beyond that.
StationaryResult stationary_measure(const IFSSystem& sys,
                                    const WeightSystem& w,
                                    int resolution = 4096, double tol = 1e-9,
                                    int max_iter = 10000,
                                    double attract_tol = 0.0);

// Draw index from the cumulative distribution of p at u in [0,1); when u
// falls beyond the covered mass (countable tail) the last index is returned
// and *clamped set.  Shared by every sampler so replays agree bitwise.
Symbol sample_index(const std::vector<double>& p, double u,
                    bool* clamped = nullptr);

struct ChaosGameRun {
  EmpiricalMeasure measure;         // states visited after burn-in
  std::vector<Point> pre_states;    // x_t before step t (when recorded)
  std::vector<Symbol> symbols;      // chosen indices (when recorded)
  long long steps = 0;
  int burn_in = 0;
  long long tail_clamps = 0;
  std::uint64_t seed = 0;
};

// Single-chain Markov sampler x_{t+1} = phi_{i_t}(x_t), i_t ~ p(.|x_t),
// driven by the counter RNG on stream 0 of `seed`.
ChaosGameRun chaos_game(const IFSSystem& sys, const WeightSystem& w,
                        long long steps, std::uint64_t seed,
                        int burn_in = 1000, bool record_path = false);

// Cylinder weights proportional to exp(S_n psi - P n), each level normalized;
// levels 1..depth are all populated.  Enumeration honors the same budget
// rules as pressure().
CylinderMeasure gibbs_approximation(const Potential& psi, double P,
                                    int alphabet, int depth,
                                    int eval_depth = kDefaultEvalDepth,
                                    std::optional<long long> budget = {});

// Cylinder weights estimated from a symbol stream: level-L weights are the
// frequencies of the length-L sliding windows.  For an ergodic chain this
// approximates the underlying shift-invariant measure.
CylinderMeasure empirical_cylinders(const std::vector<Symbol>& symbols,
                                    int alphabet, int depth);

// Conditional distribution over the length-`extend` block preceding `given`,
// i.e. P(v | w) = mu([v w]) / sum_v mu([v w]) with words read at a common
// start (valid for shift-invariant measures).  Throws ZeroMarginal when the
// conditioning cylinder carries no mass.
ConditionalMeasure conditional_measure(const CylinderMeasure& mu,
                                       const Word& given, int extend);

}  // namespace fractaldim
