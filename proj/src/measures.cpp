#include "fractaldim/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fractaldim/rng.hpp"
#include "fractaldim/util.hpp"

namespace fractaldim {

std::function<double(const Point&)> transfer_apply(
    const IFSSystem& sys, const WeightSystem& w,
    std::function<double(const Point&)> g) {
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  return [&sys, &w, g = std::move(g)](const Point& x) {
    double acc = 0.0;
    for (Symbol i = 1; i <= sys.alphabet(); ++i)
      acc += w.eval(i, x) * g(sys.map(i).eval(x));
    return acc;
  };
}

EmpiricalMeasure adjoint_push(const IFSSystem& sys, const WeightSystem& w,
                              const EmpiricalMeasure& mu) {
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  EmpiricalMeasure out;
  out.points.reserve(mu.size() * static_cast<std::size_t>(sys.alphabet()));
  out.weights.reserve(out.points.capacity());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const Point& x = mu.points[k];
    const double m = mu.weight(k);
    for (Symbol i = 1; i <= sys.alphabet(); ++i) {
      out.points.push_back(sys.map(i).eval(x));
      out.weights.push_back(m * w.eval(i, x));
    }
  }
  return out;
}

namespace {

// Bin-level transition kernel: target bin and probability per (bin, symbol).
struct GridKernel {
  int alphabet = 0;
  std::vector<std::size_t> target;  // bins * alphabet
  std::vector<double> prob;         // bins * alphabet
  std::vector<double> cover;        // per-bin covered mass (1 - tail)

  GridKernel(const IFSSystem& sys, const WeightSystem& w,
             const GridMeasure& shape) {
    alphabet = sys.alphabet();
    const std::size_t bins = shape.bins();
    target.resize(bins * static_cast<std::size_t>(alphabet));
    prob.resize(bins * static_cast<std::size_t>(alphabet));
    cover.resize(bins, 0.0);
    std::vector<double> p;
    for (std::size_t b = 0; b < bins; ++b) {
      const Point x = shape.bin_center(b);
      w.probs_into(x, p);
      double total = 0.0;
      for (int i = 0; i < alphabet; ++i) {
        const std::size_t slot = b * static_cast<std::size_t>(alphabet) +
                                 static_cast<std::size_t>(i);
        prob[slot] = std::max(p[static_cast<std::size_t>(i)], 0.0);
        target[slot] = shape.bin_of(sys.map(i + 1).eval(x));
        total += prob[slot];
      }
      cover[b] = total;
    }
  }

  // One adjoint step followed by renormalization (countable tails leak
  // mass); returns the mass lost before renormalizing.
  double step(const std::vector<double>& in, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    double kept = 0.0;
    for (std::size_t b = 0; b < in.size(); ++b) {
      const double m = in[b];
      if (m <= 0.0) continue;
      kept += m * cover[b];
      const std::size_t base = b * static_cast<std::size_t>(alphabet);
      for (int i = 0; i < alphabet; ++i)
        out[target[base + static_cast<std::size_t>(i)]] +=
            m * prob[base + static_cast<std::size_t>(i)];
    }
    double total = 0.0;
    for (double v : out) total += v;
    if (!(total > 0.0))
      throw NoConvergence("adjoint step annihilated the measure");
    for (double& v : out) v /= total;
    return std::max(0.0, 1.0 - kept);
  }
};

double tv_flat(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += std::fabs(a[k] - b[k]);
  return 0.5 * s;
}

}  // namespace

GridMeasure adjoint_apply(const IFSSystem& sys, const WeightSystem& w,
                          const GridMeasure& mu) {
  GridKernel kernel(sys, w, mu);
  GridMeasure out(mu.region(), mu.resolution());
  std::vector<double> next(mu.bins(), 0.0);
  kernel.step(mu.masses(), next);
  for (std::size_t b = 0; b < next.size(); ++b) out.mass(b) = next[b];
  return out;
}

StationaryResult stationary_measure(const IFSSystem& sys,
                                    const WeightSystem& w, int resolution,
                                    double tol, int max_iter,
                                    double attract_tol) {
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  if (tol <= 0.0) throw ValidationError("stationary tolerance must be > 0");
  if (attract_tol <= 0.0) attract_tol = 10.0 * tol;
  w.validate_on(sys.domain());
  GridMeasure shape(sys.domain(), resolution);
  GridKernel kernel(sys, w, shape);

  StationaryResult res{GridMeasure::uniform(sys.domain(), resolution),
                       0, 0.0, 0.0, false, 0.0, true, {}};

  auto iterate = [&](std::vector<double> cur, int& iters, double& tv_last,
                     double& leak, std::vector<double>* history) {
    std::vector<double> next(cur.size(), 0.0);
    for (iters = 0; iters < max_iter; ++iters) {
      leak = std::max(leak, kernel.step(cur, next));
      tv_last = tv_flat(cur, next);
      cur.swap(next);
      if (history) history->push_back(tv_last);
      if (tv_last < tol) return cur;
    }
    // A slow but nearly settled iteration is returned with a flag; only a
    // genuinely moving one is an error.
    if (tv_last > 100.0 * tol)
      throw NoConvergence("stationary iteration still moving after " +
                          std::to_string(max_iter) +
                          " steps (last TV increment " +
                          format_double(tv_last) + ")");
    res.converged = false;
    return cur;
  };

  double leak = 0.0;

  std::vector<double> u0(shape.bins(), 1.0 / double(shape.bins()));
  int it1 = 0;
  double tv1 = 0.0;
  std::vector<double> fixed =
      iterate(std::move(u0), it1, tv1, leak, &res.tv_history);

  // Second start: all mass in the first bin.
  std::vector<double> p0(shape.bins(), 0.0);
  p0[0] = 1.0;
  int it2 = 0;
  double tv2 = 0.0;
  std::vector<double> fixed2 = iterate(std::move(p0), it2, tv2, leak, nullptr);

  res.iterations = std::max(it1, it2);
  res.tv_last = std::max(tv1, tv2);
  res.attract_gap = tv_flat(fixed, fixed2);
  res.attractive = res.attract_gap <= attract_tol;
  res.mass_leak_max = leak;
  for (std::size_t b = 0; b < fixed.size(); ++b) res.measure.mass(b) = fixed[b];
  return res;
}

Symbol sample_index(const std::vector<double>& p, double u, bool* clamped) {
  if (clamped) *clamped = false;
  if (p.empty()) throw ValidationError("sample_index: empty distribution");
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += std::max(p[k], 0.0);
    if (u < acc) return static_cast<Symbol>(k + 1);
  }
  if (clamped) *clamped = true;
  return static_cast<Symbol>(p.size());
}

ChaosGameRun chaos_game(const IFSSystem& sys, const WeightSystem& w,
                        long long steps, std::uint64_t seed, int burn_in,
                        bool record_path) {
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  if (steps <= burn_in)
    throw ValidationError("chaos_game: steps must exceed burn_in");
  ChaosGameRun run;
  run.steps = steps;
  run.burn_in = burn_in;
  run.seed = seed;
  run.measure.points.reserve(static_cast<std::size_t>(steps - burn_in));
  if (record_path) {
    run.pre_states.reserve(static_cast<std::size_t>(steps));
    run.symbols.reserve(static_cast<std::size_t>(steps));
  }

  const std::uint64_t key = rng::stream_key(seed, 0);
  Point x = sys.domain().center();
  std::vector<double> p;
  bool clamped = false;
  for (long long t = 0; t < steps; ++t) {
    if (record_path) run.pre_states.push_back(x);
    if (t >= burn_in) run.measure.points.push_back(x);
    const double u = rng::uniform01_key(key, static_cast<std::uint64_t>(t));
    w.probs_into(x, p);
    const Symbol i = sample_index(p, u, &clamped);
    if (clamped) ++run.tail_clamps;
    if (record_path) run.symbols.push_back(i);
    x = sys.map(i).eval(x);
  }
  return run;
}

CylinderMeasure gibbs_approximation(const Potential& psi, double P,
                                    int alphabet, int depth, int eval_depth,
                                    std::optional<long long> budget) {
  if (alphabet < 1 || depth < 1)
    throw ValidationError("gibbs_approximation: alphabet and depth >= 1");
  const long long cap = budget.value_or(default_budget());
  long long total = 0, words = 1;
  for (int L = 1; L <= depth; ++L) {
    if (words > cap / alphabet + 1) {
      words = cap + 1;
    } else {
      words *= alphabet;
    }
    total += words;
    if (words > cap || total > cap)
      throw CombinatorialBlowup(
          "gibbs_approximation: storing all cylinders to depth " +
          std::to_string(depth) + " over " + std::to_string(alphabet) +
          " symbols exceeds the evaluation budget of " + std::to_string(cap));
  }

  CylinderMeasure mu(0, alphabet);
  for (int L = 1; L <= depth; ++L) {
    std::vector<Symbol> word(static_cast<std::size_t>(L), 1);
    for (;;) {
      double val;
      try {
        const auto tau =
            SequenceTwoSided::periodic_from_word(Word{word, 0}, alphabet);
        val = std::exp(birkhoff_sum(psi, tau, L, eval_depth) - P * L);
      } catch (const ZeroWeight&) {
        val = 0.0;
      }
      mu.set_weight(L, word, val);
      // Odometer increment over {1..alphabet}^L.
      int k = L - 1;
      while (k >= 0 && word[static_cast<std::size_t>(k)] == alphabet) {
        word[static_cast<std::size_t>(k)] = 1;
        --k;
      }
      if (k < 0) break;
      ++word[static_cast<std::size_t>(k)];
    }
    mu.normalize_level(L);
  }
  return mu;
}

CylinderMeasure empirical_cylinders(const std::vector<Symbol>& symbols,
                                    int alphabet, int depth) {
  if (alphabet < 1)
    throw ValidationError("empirical_cylinders: alphabet must be >= 1");
  if (depth < 1)
    throw ValidationError("empirical_cylinders: depth must be >= 1");
  if (static_cast<long long>(symbols.size()) < depth)
    throw ValidationError(
        "empirical_cylinders: stream shorter than the requested depth");
  CylinderMeasure mu(0, alphabet);
  for (int L = 1; L <= depth; ++L) {
    const std::size_t windows = symbols.size() - static_cast<std::size_t>(L) + 1;
    const double unit = 1.0 / static_cast<double>(windows);
    std::map<std::vector<Symbol>, double> counts;
    std::vector<Symbol> word(static_cast<std::size_t>(L));
    for (std::size_t t = 0; t < windows; ++t) {
      std::copy(symbols.begin() + static_cast<std::ptrdiff_t>(t),
                symbols.begin() + static_cast<std::ptrdiff_t>(t) + L,
                word.begin());
      counts[word] += unit;
    }
    for (const auto& [w, m] : counts) mu.set_weight(L, w, m);
  }
  return mu;
}

ConditionalMeasure conditional_measure(const CylinderMeasure& mu,
                                       const Word& given, int extend) {
  if (extend < 1)
    throw ValidationError("conditional_measure: extend must be >= 1");
  const int L = given.length();
  const int full = L + extend;
  if (!mu.has_level(full))
    throw ValidationError("conditional_measure: level " +
                          std::to_string(full) + " not stored");
  ConditionalMeasure out;
  out.given = given;
  out.past_depth = extend;
  double total = 0.0;
  for (const auto& [word, wgt] : mu.level(full)) {
    bool match = true;
    for (int k = 0; k < L; ++k)
      if (word[static_cast<std::size_t>(extend + k)] !=
          given.symbols[static_cast<std::size_t>(k)]) {
        match = false;
        break;
      }
    if (!match) continue;
    std::vector<Symbol> past(word.begin(), word.begin() + extend);
    out.past_weights[std::move(past)] = wgt;
    total += wgt;
  }
  if (!(total > 0.0))
    throw ZeroMarginal("conditioning cylinder carries no mass");
  for (auto& [k, v] : out.past_weights) v /= total;
  return out;
}

}  // namespace fractaldim
