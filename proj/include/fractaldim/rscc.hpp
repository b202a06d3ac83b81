#pragma once

#include <any>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fractaldim/ifs.hpp"
#include "fractaldim/measure_types.hpp"
#include "fractaldim/measures.hpp"
#include "fractaldim/symbolic.hpp"
#include "fractaldim/unfolding.hpp"
#include "fractaldim/weights.hpp"

namespace fractaldim {

// One-step transition law of a random system: an explicit finite support of
// indices with their probabilities, plus any residual mass beyond the working
// truncation.  sum(probs) + tail_mass must equal 1 within 1e-12; sampling
// that lands in the tail is clamped to the last listed index and flagged.
struct IndexDistribution {
  std::vector<Symbol> support;
  std::vector<double> probs;  // aligned with support
  double tail_mass = 0.0;
};

// Throws ValidationError when the distribution is malformed (empty support,
// negative entries, or total mass off by more than 1e-12).
void validate_distribution(const IndexDistribution& d);

// A random system with complete connections: states evolve by w' = u(w, x)
// where the index x is drawn from the state-dependent law P(w, .).  States
// are opaque to the framework but every instantiation provides a stable
// string encoding so trajectories can be persisted and compared.
class Rscc {
 public:
  using State = std::any;

  virtual ~Rscc() = default;
  virtual std::string name() const = 0;
  // Size of the (truncated) index space; indices are 1..index_count().
  virtual Symbol index_count() const = 0;
  // The law P(w, .) over indices.
  virtual IndexDistribution transition(const State& w) const = 0;
  // The update map u(w, x).
  virtual State advance(const State& w, Symbol index) const = 0;
  virtual std::string encode_state(const State& w) const = 0;
};

struct ChainTrajectory {
  Rscc::State initial;
  std::vector<Symbol> indices;       // xi_1 .. xi_T
  std::vector<Rscc::State> states;   // w0, w0 xi_1, ..., length T + 1
  std::uint64_t seed = 0;
  long long tail_draws = 0;          // draws that fell into the tail mass
  bool tail_sampled = false;
};

// Simulates xi_{t+1} ~ P(w_t, .), w_{t+1} = u(w_t, xi_{t+1}) for T steps.
// Uses the same counter-based RNG discipline as chaos_game (stream 0, one
// draw per step), so the IFS bridge below reproduces chaos-game trajectories
// bit for bit under a shared seed.  Tail draws are clamped and flagged on
// the returned trajectory, never thrown.
ChainTrajectory simulate_chain(const Rscc& r, const Rscc::State& w0,
                               long long T, std::uint64_t seed);

// Membership test for a set of length-m index words.
using IndexWordPredicate = std::function<bool(const std::vector<Symbol>&)>;

// Predicate for an explicit finite collection of index words.
IndexWordPredicate word_set(std::vector<std::vector<Symbol>> words);

struct TransferProbability {
  double value = 0.0;
  bool exact = true;
  double ci95 = 0.0;       // 95% half-width; 0 for exact evaluation
  long long paths = 0;     // enumerated paths, or Monte Carlo sample count
  double tail_leak = 0.0;  // mass lost through tail indices (exact mode)
};

// m-step transfer probability P_m(w, A) = sum over index words (x_1..x_m)
// of P(w, x_1) P(w x_1, x_2) ... restricted to A.  Evaluates the nested sum
// exactly while support^m stays within `budget` (default 1e6 paths), and
// otherwise falls back to Monte Carlo with a reported confidence interval.
TransferProbability transfer_probability_m(
    const Rscc& r, const Rscc::State& w, int m, const IndexWordPredicate& A,
    std::optional<long long> budget = std::nullopt,
    std::uint64_t mc_seed = 2026, long long mc_samples = 200000);

// The delayed transfer probability P_m^n(w, A) = P_{n+m-1}(w, X^{n-1} x A):
// the chance that the indices drawn at steps n..n+m-1 form a word in A.
TransferProbability transfer_probability_mn(
    const Rscc& r, const Rscc::State& w, int n, int m,
    const IndexWordPredicate& A,
    std::optional<long long> budget = std::nullopt,
    std::uint64_t mc_seed = 2026, long long mc_samples = 200000);

// Polya-type urn: counts a_i over colors 1..m; drawing color j adds d_j
// balls of color j (a_i' = a_i + delta_ij d_i).
struct UrnScheme {
  std::vector<long long> counts;       // a_i >= 0, sum > 0
  std::vector<long long> replacement;  // d_i >= 0
};

class UrnRscc : public Rscc {
 public:
  explicit UrnRscc(UrnScheme scheme);
  std::string name() const override { return "urn"; }
  Symbol index_count() const override;
  IndexDistribution transition(const State& w) const override;
  State advance(const State& w, Symbol index) const override;
  std::string encode_state(const State& w) const override;
  State initial_state() const;
  const UrnScheme& scheme() const { return scheme_; }

 private:
  UrnScheme scheme_;
};

// Random-map iteration as a random system: states are points of V, the
// index law at x is (p_i(x))_i with the declared tail mass, and the update
// applies the drawn branch, u(x, i) = phi_i(x).
class IfsRscc : public Rscc {
 public:
  IfsRscc(IFSSystem sys, WeightSystem weights);
  std::string name() const override { return "ifs"; }
  Symbol index_count() const override;
  IndexDistribution transition(const State& w) const override;
  State advance(const State& w, Symbol index) const override;
  std::string encode_state(const State& w) const override;
  // Domain center: the same start the chaos game uses.
  State initial_state() const;
  const IFSSystem& system() const { return sys_; }
  const WeightSystem& weights() const { return w_; }

 private:
  IFSSystem sys_;
  WeightSystem w_;
};

// State of the skew-product random system: the base itinerary driving the
// fiber maps plus the current fiber point.
struct SmaleState {
  SequenceOneSided omega;
  Point x;
};

// The skew product as a random system.  States are (omega, x); the update
// u((omega, x), tau) = (sigma omega, T_omega(x)) applies the fiber branch
// selected by omega_0 over the shifted base and ignores the drawn index,
// while the index law P_(omega, x) is the conditional law of the past block
// given the future word omega (depth fixed by the supplied measure).
// Indices enumerate past words of length past_depth lexicographically.
class SmaleRscc : public Rscc {
 public:
  // mu must store two-sided cylinder weights: start < 0, with levels up to
  // past_depth + given_length where past_depth = -mu.start().
  SmaleRscc(MaximalSmaleSystem smale, CylinderMeasure mu);
  std::string name() const override { return "smale"; }
  Symbol index_count() const override;  // alphabet^past_depth
  IndexDistribution transition(const State& w) const override;
  State advance(const State& w, Symbol index) const override;
  std::string encode_state(const State& w) const override;

  State make_state(const SequenceOneSided& omega, const Point& x) const;
  int past_depth() const { return past_depth_; }
  int given_length() const { return given_len_; }
  std::vector<Symbol> past_word_of(Symbol index) const;
  Symbol index_of(const std::vector<Symbol>& past) const;
  const MaximalSmaleSystem& smale() const { return smale_; }

 private:
  MaximalSmaleSystem smale_;
  CylinderMeasure mu_;
  int past_depth_ = 0;
  int given_len_ = 0;
  int base_ = 0;  // alphabet size used for index packing
};

std::shared_ptr<UrnRscc> make_urn(UrnScheme scheme);
std::shared_ptr<IfsRscc> ifs_to_rscc(IFSSystem sys, WeightSystem weights);
std::shared_ptr<SmaleRscc> smale_to_rscc(MaximalSmaleSystem smale,
                                         CylinderMeasure mu);

}  // namespace fractaldim
