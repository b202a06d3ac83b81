#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "dimension.hpp"

namespace fractaldim {

// Indices n_1 < n_2 < ... < n_K grown until the candidate composition image
// separates from everything chosen before it.
struct UnfoldIndices {
  Word omega_prefix;   // exactly the prefix of omega the scan consumed
  std::vector<int> n;  // n_k for fiber symbols 1..K
  bool tail_verified = true;  // false when only symbols <= N were checked
};

// Composition phi_i . phi_{omega_0} ... phi_{omega_{n_i}} with its word,
// image of V, and a sampled derivative supremum.
struct FiberMap {
  Symbol symbol = 0;
  Word word;
  ConformalMap map;
  Region image;
  double deriv_sup = 0.0;
};

// Pure scan: the smallest admissible indices for the given one-sided base
// sequence.  K = 0 means the full working alphabet.  Throws UnfoldTimeout
// when a candidate exceeds n_max and NonAccumulationFailed when the coded
// point fails the separation precondition.
UnfoldIndices unfold_indices(const IFSSystem& sys,
                             const SequenceOneSided& omega, int K = 0,
                             int n_max = 1000,
                             std::optional<Region> tail_region = {});

// Fiber map for symbol i over base sequence omega (computes indices 1..i).
FiberMap fiber_map(const IFSSystem& sys, const SequenceOneSided& omega,
                   Symbol i, int n_max = 1000,
                   std::optional<Region> tail_region = {});

// Skew product over the two-sided shift: the base moves by sigma while the
// fiber coordinate moves through the composed maps above.  Copies share one
// read-mostly fiber cache keyed by (symbol, resolved base prefix).
class MaximalSmaleSystem {
 public:
  explicit MaximalSmaleSystem(IFSSystem base, int K = 0, int n_max = 1000,
                              std::optional<Region> tail_region = {});

  const IFSSystem& base() const;
  int K() const;
  int n_max() const;
  double lambda() const;  // fiber expansion bound, 1 / deriv bound

  UnfoldIndices indices_for(const SequenceOneSided& omega) const;
  FiberMap fiber_map_for(const SequenceOneSided& omega, Symbol i) const;

  // Snapshot of the cache for invariant sweeps.
  std::vector<FiberMap> cache_entries() const;

 private:
  struct State;
  std::shared_ptr<State> st_;
};

struct SmaleProjection {
  Point point;
  double radius = 0.0;  // lambda^{-m} * diam V
};

// pi_2 approximation: T_{tau|-1..} o ... o T_{tau|-m..} applied to the
// center of V; nested images make the output accurate to `radius`.
SmaleProjection smale_project(const MaximalSmaleSystem& smale,
                              const SequenceTwoSided& tau, int m);

struct FiberFractalSample {
  SequenceOneSided omega;
  std::vector<std::vector<Symbol>> words;  // past blocks tau_{-m}..tau_{-1}
  std::vector<Point> points;
  std::vector<double> radii;
  bool exhaustive = false;
};

// Point cloud for the fiber fractal over [omega]: every (or a sampled set
// of) depth-m past block projected through the fiber maps.
FiberFractalSample fiber_fractal_sample(const MaximalSmaleSystem& smale,
                                        const SequenceOneSided& omega,
                                        int depth_m, long long n_words,
                                        std::uint64_t seed = 1,
                                        std::optional<long long> budget = {});

// psi_s(eta) = s log |T'_{eta|0..}(pi_2(eta))|; the projection depth is the
// evaluation depth, so locality follows the fiber contraction.
Potential psi_s_potential(const MaximalSmaleSystem& smale, double s);

// Pairwise disjointness of the fiber-map images over one base sequence.
bool verify_fiber_osc(const MaximalSmaleSystem& smale,
                      const SequenceOneSided& omega);

// Weighted fiber sample: every depth-m past block v projected onto the fiber
// over omega, weighted by the conditional law exp(sum_k psi(sigma^{-k} eta_v))
// normalized over blocks.  The atoms carry exact weights, so local-dimension
// runs on the result should pass an explicit (tiny) mass floor.
EmpiricalMeasure fiber_conditional_measure(const MaximalSmaleSystem& smale,
                                           const Potential& psi,
                                           const SequenceOneSided& omega,
                                           int depth,
                                           int eval_depth = kDefaultEvalDepth,
                                           std::optional<long long> budget = {});

struct FiberDimensionReport {
  double s = 0.0;
  double pressure_value = 0.0;
  double entropy = 0.0;
  double chi_fiber = 0.0;  // -int log |T'| dmu
  double hd = 0.0;         // entropy / chi_fiber
  GibbsCheckResult gibbs;
  DimensionReport local_check;  // ball-mass dimension on the sampled fiber
  int depth = 0;
};

// Dimension of the fiber measure: Gibbs state of psi_s at the given cylinder
// depth, entropy over Lyapunov exponent with respect to the fiber maps, plus
// a local-dimension cross-check on the projected conditional measure.
FiberDimensionReport fiber_dimension(const MaximalSmaleSystem& smale, double s,
                                     int depth, const SequenceOneSided& omega,
                                     int eval_depth = kDefaultEvalDepth,
                                     std::optional<long long> budget = {},
                                     int threads = 1);

}  // namespace fractaldim
