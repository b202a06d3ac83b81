#include "fractaldim/rscc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "fractaldim/errors.hpp"
#include "fractaldim/rng.hpp"
#include "fractaldim/util.hpp"

namespace fractaldim {

namespace {

template <typename T>
const T& state_as(const Rscc::State& w, const char* who) {
  const T* p = std::any_cast<T>(&w);
  if (!p)
    throw ValidationError(std::string(who) +
                          ": state does not belong to this system");
  return *p;
}

constexpr long long kDefaultPathBudget = 1000000;

}  // namespace

void validate_distribution(const IndexDistribution& d) {
  if (d.support.empty())
    throw ValidationError("index distribution has empty support");
  if (d.support.size() != d.probs.size())
    throw ValidationError("index distribution support/probability mismatch");
  double total = d.tail_mass;
  if (d.tail_mass < -1e-15)
    throw ValidationError("index distribution has negative tail mass");
  for (double p : d.probs) {
    if (p < -1e-15)
      throw ValidationError("index distribution has a negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ValidationError("index distribution mass " + format_double(total) +
                          " is not 1 within 1e-12");
}

ChainTrajectory simulate_chain(const Rscc& r, const Rscc::State& w0,
                               long long T, std::uint64_t seed) {
  if (T < 1) throw ValidationError("simulate_chain: T must be >= 1");
  ChainTrajectory out;
  out.initial = w0;
  out.seed = seed;
  out.indices.reserve(static_cast<std::size_t>(T));
  out.states.reserve(static_cast<std::size_t>(T) + 1);
  out.states.push_back(w0);

  // Stream 0 with one draw per step: the exact discipline of chaos_game, so
  // the IFS bridge yields identical trajectories under a shared seed.
  const std::uint64_t key = rng::stream_key(seed, 0);
  Rscc::State w = w0;
  bool clamped = false;
  for (long long t = 0; t < T; ++t) {
    const IndexDistribution d = r.transition(w);
    validate_distribution(d);
    const double u = rng::uniform01_key(key, static_cast<std::uint64_t>(t));
    const Symbol slot = sample_index(d.probs, u, &clamped);
    const Symbol idx = d.support[static_cast<std::size_t>(slot - 1)];
    if (clamped && d.tail_mass > 0.0) {
      ++out.tail_draws;
      out.tail_sampled = true;
    }
    out.indices.push_back(idx);
    w = r.advance(w, idx);
    out.states.push_back(w);
  }
  return out;
}

IndexWordPredicate word_set(std::vector<std::vector<Symbol>> words) {
  std::sort(words.begin(), words.end());
  return [words = std::move(words)](const std::vector<Symbol>& w) {
    return std::binary_search(words.begin(), words.end(), w);
  };
}

TransferProbability transfer_probability_m(const Rscc& r, const Rscc::State& w,
                                           int m, const IndexWordPredicate& A,
                                           std::optional<long long> budget,
                                           std::uint64_t mc_seed,
                                           long long mc_samples) {
  if (m < 1) throw ValidationError("transfer_probability_m: m must be >= 1");
  if (!A) throw ValidationError("transfer_probability_m: empty word set");
  const long long cap = budget.value_or(kDefaultPathBudget);
  if (cap < 1) throw ValidationError("transfer_probability_m: budget < 1");

  const IndexDistribution first = r.transition(w);
  validate_distribution(first);
  const double support = static_cast<double>(std::max<std::size_t>(
      first.support.size(), 1));
  const bool feasible =
      static_cast<double>(m) * std::log(support) <=
      std::log(static_cast<double>(cap)) + 1e-9;

  TransferProbability out;
  if (feasible) {
    // Exact nested sum over all index words, depth-first in support order.
    std::vector<Symbol> word;
    word.reserve(static_cast<std::size_t>(m));
    std::function<void(const Rscc::State&, double)> rec =
        [&](const Rscc::State& st, double prob) {
          if (static_cast<int>(word.size()) == m) {
            ++out.paths;
            if (A(word)) out.value += prob;
            return;
          }
          const IndexDistribution d = r.transition(st);
          validate_distribution(d);
          out.tail_leak += prob * d.tail_mass;
          for (std::size_t k = 0; k < d.support.size(); ++k) {
            if (d.probs[k] <= 0.0) continue;
            word.push_back(d.support[k]);
            rec(r.advance(st, d.support[k]), prob * d.probs[k]);
            word.pop_back();
          }
        };
    rec(w, 1.0);
    out.exact = true;
    return out;
  }

  // Monte Carlo fallback: sample chains of length m (tail draws clamp to the
  // last listed index, as in simulation) and report a binomial 95% interval.
  if (mc_samples < 1)
    throw ValidationError("transfer_probability_m: mc_samples < 1");
  const std::uint64_t key = rng::stream_key(mc_seed, 9);
  long long hits = 0;
  std::vector<Symbol> word(static_cast<std::size_t>(m));
  bool clamped = false;
  for (long long c = 0; c < mc_samples; ++c) {
    Rscc::State st = w;
    for (int k = 0; k < m; ++k) {
      const IndexDistribution d = r.transition(st);
      const double u = rng::uniform01_key(
          key, static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(m) +
                   static_cast<std::uint64_t>(k));
      const Symbol slot = sample_index(d.probs, u, &clamped);
      const Symbol idx = d.support[static_cast<std::size_t>(slot - 1)];
      word[static_cast<std::size_t>(k)] = idx;
      st = r.advance(st, idx);
    }
    if (A(word)) ++hits;
  }
  out.value = static_cast<double>(hits) / static_cast<double>(mc_samples);
  out.exact = false;
  out.paths = mc_samples;
  out.ci95 = 1.96 * std::sqrt(std::max(out.value * (1.0 - out.value), 0.0) /
                              static_cast<double>(mc_samples));
  return out;
}

TransferProbability transfer_probability_mn(const Rscc& r,
                                            const Rscc::State& w, int n, int m,
                                            const IndexWordPredicate& A,
                                            std::optional<long long> budget,
                                            std::uint64_t mc_seed,
                                            long long mc_samples) {
  if (n < 1) throw ValidationError("transfer_probability_mn: n must be >= 1");
  if (m < 1) throw ValidationError("transfer_probability_mn: m must be >= 1");
  if (n == 1) return transfer_probability_m(r, w, m, A, budget, mc_seed,
                                            mc_samples);
  // P_m^n(w, A) = P_{n+m-1}(w, X^{n-1} x A): the first n-1 indices are free
  // and the final m must form a word in A.
  const int total = n - 1 + m;
  IndexWordPredicate lifted = [&A, m](const std::vector<Symbol>& y) {
    std::vector<Symbol> suffix(y.end() - m, y.end());
    return A(suffix);
  };
  return transfer_probability_m(r, w, total, lifted, budget, mc_seed,
                                mc_samples);
}

// ---------------------------------------------------------------------------
// Urn scheme

UrnRscc::UrnRscc(UrnScheme scheme) : scheme_(std::move(scheme)) {
  if (scheme_.counts.empty())
    throw ValidationError("urn needs at least one color");
  if (scheme_.counts.size() != scheme_.replacement.size())
    throw ValidationError("urn counts and replacement sizes differ");
  long long total = 0;
  for (long long a : scheme_.counts) {
    if (a < 0) throw ValidationError("urn counts must be nonnegative");
    total += a;
  }
  if (total <= 0) throw ValidationError("urn must start with at least one ball");
  for (long long d : scheme_.replacement)
    if (d < 0) throw ValidationError("urn replacement must be nonnegative");
}

Symbol UrnRscc::index_count() const {
  return static_cast<Symbol>(scheme_.counts.size());
}

IndexDistribution UrnRscc::transition(const State& w) const {
  const auto& a = state_as<std::vector<long long>>(w, "urn");
  if (a.size() != scheme_.counts.size())
    throw ValidationError("urn state has the wrong number of colors");
  const double total =
      static_cast<double>(std::accumulate(a.begin(), a.end(), 0LL));
  IndexDistribution d;
  d.support.resize(a.size());
  d.probs.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d.support[i] = static_cast<Symbol>(i + 1);
    d.probs[i] = static_cast<double>(a[i]) / total;
  }
  return d;
}

Rscc::State UrnRscc::advance(const State& w, Symbol index) const {
  auto a = state_as<std::vector<long long>>(w, "urn");
  if (index < 1 || index > index_count())
    throw SymbolOutOfAlphabet("urn color " + std::to_string(index) +
                              " outside 1.." + std::to_string(index_count()));
  a[static_cast<std::size_t>(index - 1)] +=
      scheme_.replacement[static_cast<std::size_t>(index - 1)];
  return a;
}

std::string UrnRscc::encode_state(const State& w) const {
  const auto& a = state_as<std::vector<long long>>(w, "urn");
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a[i]);
  }
  s += ']';
  return s;
}

Rscc::State UrnRscc::initial_state() const { return scheme_.counts; }

// ---------------------------------------------------------------------------
// IFS bridge

IfsRscc::IfsRscc(IFSSystem sys, WeightSystem weights)
    : sys_(std::move(sys)), w_(std::move(weights)) {
  if (w_.count() != sys_.alphabet())
    throw ValidationError("weight count does not match the map family");
  w_.validate_on(sys_.domain());
}

Symbol IfsRscc::index_count() const {
  return static_cast<Symbol>(sys_.alphabet());
}

IndexDistribution IfsRscc::transition(const State& w) const {
  const Point& x = state_as<Point>(w, "ifs chain");
  IndexDistribution d;
  w_.probs_into(x, d.probs);
  d.support.resize(d.probs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < d.probs.size(); ++i) {
    d.support[i] = static_cast<Symbol>(i + 1);
    total += d.probs[i];
  }
  d.tail_mass = std::max(0.0, 1.0 - total);
  return d;
}

Rscc::State IfsRscc::advance(const State& w, Symbol index) const {
  const Point& x = state_as<Point>(w, "ifs chain");
  if (index < 1 || index > index_count())
    throw SymbolOutOfAlphabet("branch " + std::to_string(index) +
                              " outside 1.." + std::to_string(index_count()));
  return sys_.map(index).eval(x);
}

std::string IfsRscc::encode_state(const State& w) const {
  const Point& x = state_as<Point>(w, "ifs chain");
  std::string s = format_double(x.c[0]);
  if (x.dim == 2) s += "," + format_double(x.c[1]);
  return s;
}

Rscc::State IfsRscc::initial_state() const { return sys_.domain().center(); }

// ---------------------------------------------------------------------------
// Skew-product bridge

SmaleRscc::SmaleRscc(MaximalSmaleSystem smale, CylinderMeasure mu)
    : smale_(std::move(smale)), mu_(std::move(mu)) {
  if (mu_.start() >= 0)
    throw ValidationError(
        "skew-product chain needs a two-sided measure (start < 0)");
  past_depth_ = -mu_.start();
  given_len_ = mu_.deepest() - past_depth_;
  if (given_len_ < 1)
    throw ValidationError(
        "measure depth must exceed the stored past depth by at least 1");
  base_ = mu_.alphabet();
  if (base_ < 1) throw ValidationError("measure alphabet must be >= 1");
  double count = 1.0;
  for (int i = 0; i < past_depth_; ++i) count *= static_cast<double>(base_);
  if (count > 2147483000.0)
    throw ValidationError("past-word index space exceeds 32-bit range");
}

Symbol SmaleRscc::index_count() const {
  long long count = 1;
  for (int i = 0; i < past_depth_; ++i) count *= base_;
  return static_cast<Symbol>(count);
}

std::vector<Symbol> SmaleRscc::past_word_of(Symbol index) const {
  if (index < 1 || index > index_count())
    throw SymbolOutOfAlphabet("past-word index " + std::to_string(index) +
                              " outside 1.." + std::to_string(index_count()));
  std::vector<Symbol> w(static_cast<std::size_t>(past_depth_));
  long long r = index - 1;
  for (int j = past_depth_ - 1; j >= 0; --j) {
    w[static_cast<std::size_t>(j)] = static_cast<Symbol>(r % base_ + 1);
    r /= base_;
  }
  return w;
}

Symbol SmaleRscc::index_of(const std::vector<Symbol>& past) const {
  if (static_cast<int>(past.size()) != past_depth_)
    throw ValidationError("past word must have length " +
                          std::to_string(past_depth_));
  long long r = 0;
  for (Symbol v : past) {
    if (v < 1 || v > base_)
      throw SymbolOutOfAlphabet("symbol " + std::to_string(v) +
                                " outside working alphabet {1.." +
                                std::to_string(base_) + "}");
    r = r * base_ + (v - 1);
  }
  return static_cast<Symbol>(r + 1);
}

IndexDistribution SmaleRscc::transition(const State& w) const {
  const SmaleState& s = state_as<SmaleState>(w, "smale chain");
  const Word given{s.omega.prefix(given_len_), 0};
  const ConditionalMeasure cm = conditional_measure(mu_, given, past_depth_);
  IndexDistribution d;
  d.support.reserve(cm.past_weights.size());
  d.probs.reserve(cm.past_weights.size());
  // std::map iterates past words lexicographically, which matches ascending
  // packed-index order.
  for (const auto& [past, weight] : cm.past_weights) {
    d.support.push_back(index_of(past));
    d.probs.push_back(weight);
  }
  return d;
}

Rscc::State SmaleRscc::advance(const State& w, Symbol index) const {
  const SmaleState& s = state_as<SmaleState>(w, "smale chain");
  if (index < 1 || index > index_count())
    throw SymbolOutOfAlphabet("past-word index " + std::to_string(index) +
                              " outside 1.." + std::to_string(index_count()));
  // u((omega, x), tau) = (sigma omega, T_omega(x)): the drawn past word does
  // not enter the update; randomness surfaces only through the indices.
  const Symbol head = s.omega.at(0);
  SequenceOneSided shifted = s.omega.shifted();
  const FiberMap fm = smale_.fiber_map_for(shifted, head);
  return SmaleState{std::move(shifted), fm.map.eval(s.x)};
}

std::string SmaleRscc::encode_state(const State& w) const {
  const SmaleState& s = state_as<SmaleState>(w, "smale chain");
  std::string out;
  const std::vector<Symbol> pre = s.omega.prefix(given_len_);
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(pre[i]);
  }
  out += '|';
  out += format_double(s.x.c[0]);
  if (s.x.dim == 2) out += "," + format_double(s.x.c[1]);
  return out;
}

Rscc::State SmaleRscc::make_state(const SequenceOneSided& omega,
                                  const Point& x) const {
  if (omega.alphabet() > smale_.base().alphabet())
    throw SymbolOutOfAlphabet("itinerary alphabet exceeds the base system");
  return SmaleState{omega, x};
}

std::shared_ptr<UrnRscc> make_urn(UrnScheme scheme) {
  return std::make_shared<UrnRscc>(std::move(scheme));
}

std::shared_ptr<IfsRscc> ifs_to_rscc(IFSSystem sys, WeightSystem weights) {
  return std::make_shared<IfsRscc>(std::move(sys), std::move(weights));
}

std::shared_ptr<SmaleRscc> smale_to_rscc(MaximalSmaleSystem smale,
                                         CylinderMeasure mu) {
  return std::make_shared<SmaleRscc>(std::move(smale), std::move(mu));
}

}  // namespace fractaldim
