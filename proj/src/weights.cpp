#include "fractaldim/weights.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>

#include "fractaldim/rng.hpp"
#include "fractaldim/util.hpp"

namespace fractaldim {

namespace {

std::vector<Point> sample_points(const Region& V, int per_axis) {
  std::vector<Point> pts;
  if (V.dim == 1) {
    pts.reserve(static_cast<std::size_t>(per_axis));
    for (int i = 0; i < per_axis; ++i) {
      const double t = per_axis == 1 ? 0.5 : double(i) / (per_axis - 1);
      pts.push_back(Point::d1(V.lo[0] + t * (V.hi[0] - V.lo[0])));
    }
    return pts;
  }
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      const double tx = per_axis == 1 ? 0.5 : double(i) / (per_axis - 1);
      const double ty = per_axis == 1 ? 0.5 : double(j) / (per_axis - 1);
      pts.push_back(Point::d2(V.lo[0] + tx * (V.hi[0] - V.lo[0]),
                              V.lo[1] + ty * (V.hi[1] - V.lo[1])));
    }
  return pts;
}

// Future tail of eta from position 1, truncated so code_point_prefix sees at
// most `depth` symbols.
Point anchor_point(const IFSSystem& sys, const SequenceTwoSided& eta,
                   int depth) {
  const SequenceOneSided fut = eta.from_index(1);
  const long long res = fut.resolution();
  const int d = static_cast<int>(std::min<long long>(depth, res));
  if (d < 1)
    throw ResolutionExceeded(
        "potential evaluation needs at least one future symbol past "
        "position 0");
  return code_point_prefix(sys, fut, d);
}

}  // namespace

// ---- WeightSystem --------------------------------------------------------

WeightSystem::WeightSystem(std::vector<WeightFn> p, double tail_mass_bound,
                           HolderConstants holder)
    : p_(std::move(p)), tail_(tail_mass_bound), holder_(holder) {
  if (p_.empty()) throw ValidationError("weight system needs >= 1 weight");
  if (!(tail_ >= 0.0 && tail_ < 1.0))
    throw ValidationError("tail mass bound must lie in [0,1)");
  if (holder_.C < 0.0 || holder_.alpha <= 0.0 || holder_.alpha > 1.0)
    throw ValidationError("weight Holder constants need C >= 0, alpha in (0,1]");
}

double WeightSystem::eval(Symbol i, const Point& x) const {
  if (i < 1 || i > count())
    throw SymbolOutOfAlphabet("weight index " + std::to_string(i) +
                              " outside {1.." + std::to_string(count()) + "}");
  return p_[static_cast<std::size_t>(i - 1)].eval(x);
}

void WeightSystem::probs_into(const Point& x, std::vector<double>& out) const {
  out.resize(p_.size());
  for (std::size_t k = 0; k < p_.size(); ++k) out[k] = p_[k].eval(x);
}

std::vector<double> WeightSystem::probs(const Point& x) const {
  std::vector<double> out;
  probs_into(x, out);
  return out;
}

void WeightSystem::validate_on(const Region& V) const {
  const auto pts = sample_points(V, V.dim == 1 ? 33 : 9);
  for (const Point& x : pts) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p_.size(); ++k) {
      const double v = p_[k].eval(x);
      if (v < -1e-12)
        throw ValidationError("weight " + std::to_string(k + 1) +
                              " is negative at a sample point");
      sum += std::max(v, 0.0);
    }
    if (sum > 1.0 + 1e-9 || sum < 1.0 - tail_ - 1e-9)
      throw ValidationError(
          "weights sum to " + format_double(sum) +
          " at a sample point; expected within [1 - tail, 1]");
  }
}

// ---- Potential factories -------------------------------------------------

double Potential::eval(const SequenceOneSided& omega, int depth) const {
  if (kind_ == Kind::kFiberGeometric)
    throw ValidationError(
        "this potential reads past symbols; evaluate it on a two-sided "
        "sequence");
  // The past is irrelevant for the remaining kinds; any filler works.
  SequenceTwoSided eta(SequenceOneSided::periodic({1}, omega.alphabet()),
                       omega);
  return eval(eta, depth);
}

Potential potential_from_weights(const IFSSystem& sys, const WeightSystem& w) {
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  w.validate_on(sys.domain());

  bool all_constant = true;
  for (Symbol i = 1; i <= w.count(); ++i) {
    // Probe three points; constant weights return the same value everywhere.
    const Region& V = sys.domain();
    const Point a = V.center();
    Point b = a, c = a;
    b.c[0] = V.lo[0];
    c.c[0] = V.hi[0];
    const double va = w.eval(i, a);
    if (std::fabs(w.eval(i, b) - va) > 0.0 ||
        std::fabs(w.eval(i, c) - va) > 0.0) {
      all_constant = false;
      break;
    }
  }

  double coeff = 0.0;
  double rate = sys.contraction();
  if (!all_constant) {
    const auto pts = sample_points(sys.domain(), 33);
    double pmin = 1.0, cemp = 0.0;
    const double aw = w.holder().alpha;
    for (Symbol i = 1; i <= w.count(); ++i)
      for (std::size_t a = 0; a < pts.size(); ++a) {
        pmin = std::min(pmin, w.eval(i, pts[a]));
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
          const double d = distance(pts[a], pts[b]);
          if (d > 0.0)
            cemp = std::max(cemp, std::fabs(w.eval(i, pts[a]) -
                                            w.eval(i, pts[b])) /
                                      std::pow(d, aw));
        }
      }
    pmin = std::max(pmin, 1e-12);
    const double cw = std::max(w.holder().C, cemp);
    rate = std::pow(sys.contraction(), aw);
    // Sequences agreeing on an n-cylinder anchor in a common (n-1)-cylinder
    // image, so the modulus var_n <= coeff * rate^n needs one rate undone.
    coeff = cw * std::pow(sys.domain().diam(), aw) / (pmin * rate);
  }

  const bool countable = sys.countable_tail();
  std::optional<std::function<double(int)>> tail;
  if (countable) {
    const double t = w.tail_mass_bound();
    tail = [t](int) { return t; };
  }

  auto fn = [sys, w](const SequenceTwoSided& eta, int depth) -> double {
    const Symbol i = eta.at(0);
    const Point x = anchor_point(sys, eta, depth);
    const double p = w.eval(i, x);
    if (!(p > 0.0))
      throw ZeroWeight("weight " + std::to_string(i) +
                       " vanishes at the anchor point");
    return std::log(p);
  };
  return Potential(Potential::Kind::kFromWeights, std::move(fn), coeff, rate,
                   countable, std::move(tail));
}

Potential geometric_potential(const IFSSystem& sys, double s,
                              std::optional<std::function<double(int)>>
                                  tail_bound) {
  const double H = sys.bdp().H;
  const double beta = sys.bdp().beta;
  const double rate = std::pow(sys.contraction(), beta);
  // Same off-by-one as the weight potential: anchors of an n-cylinder agree
  // only to depth n-1, so the n-cylinder variation carries H (diam/s)^beta.
  const double coeff =
      std::fabs(s) * H * std::pow(sys.domain().diam(), beta) / rate;
  auto fn = [sys, s](const SequenceTwoSided& eta, int depth) -> double {
    const Symbol i = eta.at(0);
    const Point x = anchor_point(sys, eta, depth);
    const double m = sys.map(i).deriv_modulus(x);
    if (!(m > 0.0))
      throw NonHyperbolic("map derivative vanishes at the anchor point");
    return s * std::log(m);
  };
  return Potential(Potential::Kind::kGeometric, std::move(fn), coeff, rate,
                   sys.countable_tail(), std::move(tail_bound));
}

Potential constant_potential(double c, bool countable,
                             std::optional<std::function<double(int)>>
                                 tail_bound) {
  auto fn = [c](const SequenceTwoSided&, int) { return c; };
  return Potential(Potential::Kind::kConstant, std::move(fn), 0.0, 0.5,
                   countable, std::move(tail_bound));
}

Potential symbol_potential(std::vector<double> by_symbol, bool countable,
                           std::optional<std::function<double(int)>>
                               tail_bound) {
  if (by_symbol.empty())
    throw ValidationError("symbol potential needs >= 1 entry");
  auto fn = [tab = std::move(by_symbol)](const SequenceTwoSided& eta,
                                         int) -> double {
    const Symbol i = eta.at(0);
    if (i < 1 || i > static_cast<Symbol>(tab.size()))
      throw SymbolOutOfAlphabet("symbol " + std::to_string(i) +
                                " has no table entry");
    return tab[static_cast<std::size_t>(i - 1)];
  };
  return Potential(Potential::Kind::kSymbolTable, std::move(fn), 0.0, 0.5,
                   countable, std::move(tail_bound));
}

// ---- Birkhoff sums and summability ---------------------------------------

double birkhoff_sum(const Potential& psi, const SequenceTwoSided& tau, int n,
                    int eval_depth) {
  if (n < 0) throw ValidationError("birkhoff_sum: n must be >= 0");
  double total = 0.0;
  SequenceTwoSided cur = tau;
  for (int k = 0; k < n; ++k) {
    total += psi.eval(cur, eval_depth);
    if (k + 1 < n) cur = cur.shifted_left();
  }
  return total;
}

SummabilityReport check_summability(const Potential& psi, int alphabet,
                                    int samples, int eval_depth,
                                    std::uint64_t seed) {
  if (alphabet < 1) throw ValidationError("check_summability: alphabet >= 1");
  SummabilityReport rep;
  double sum = 0.0;
  for (Symbol i = 1; i <= alphabet; ++i) {
    // sup over the cylinder [i], probed at i^infinity plus random fillers.
    double best = -std::numeric_limits<double>::infinity();
    const int width = eval_depth + 1;
    for (int j = 0; j <= samples; ++j) {
      std::vector<Symbol> word(static_cast<std::size_t>(width));
      word[0] = i;
      for (int t = 1; t < width; ++t) {
        Symbol v = i;
        if (j > 0) {
          const double u = rng::uniform01(seed, static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(
                                              j * width + t));
          v = std::min<Symbol>(1 + static_cast<Symbol>(u * alphabet),
                               alphabet);
        }
        word[static_cast<std::size_t>(t)] = v;
      }
      const auto tau = SequenceTwoSided::periodic_from_word(
          Word{std::move(word), 0}, alphabet);
      double v;
      try {
        v = psi.eval(tau, eval_depth);
      } catch (const ZeroWeight&) {
        continue;  // contributes exp(-inf) = 0
      }
      best = std::max(best, v);
    }
    sum += std::isfinite(best) ? std::exp(best) : 0.0;
    rep.partial.push_back(sum);
  }
  if (psi.countable()) {
    if (!psi.tail_bound())
      throw TailUncertified(
          "potential is declared countable but carries no tail bound for "
          "symbols beyond the working alphabet");
    rep.tail = (*psi.tail_bound())(alphabet);
    if (!(rep.tail >= 0.0) || !std::isfinite(rep.tail))
      throw TailUncertified("tail bound is not a finite nonnegative number");
  }
  rep.value = sum + rep.tail;
  rep.pass = std::isfinite(rep.value);
  return rep;
}

// ---- Pressure -------------------------------------------------------------

long long default_budget() {
  if (const char* env = std::getenv("FRACTALDIM_BUDGET")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end != env && v > 0) return v;
  }
  return 10'000'000LL;
}

PressureResult pressure(const Potential& psi, int alphabet, int depth_max,
                        int eval_depth, std::optional<long long> budget,
                        int threads) {
  if (alphabet < 1) throw ValidationError("pressure: alphabet must be >= 1");
  if (depth_max < 1) throw ValidationError("pressure: depth must be >= 1");
  if (psi.holder_coeff() > 0.0 && psi.holder_rate() >= 1.0)
    throw ValidationError("pressure: potential locality rate must be < 1");
  const long long cap = budget.value_or(default_budget());

  // Refuse up front if the requested depth cannot be enumerated.
  long long total_words = 0;
  int feasible = 0;
  for (int n = 1; n <= depth_max; ++n) {
    double words = std::pow(double(alphabet), n);
    if (words > double(cap) || total_words + (long long)words > cap) break;
    total_words += (long long)words;
    feasible = n;
  }
  if (feasible < depth_max)
    throw CombinatorialBlowup(
        "pressure: enumerating all cylinders to depth " +
        std::to_string(depth_max) + " over " + std::to_string(alphabet) +
        " symbols exceeds the evaluation budget of " + std::to_string(cap) +
        " (depth " + std::to_string(feasible) + " fits)");

  PressureResult out;
  const double coeff = psi.holder_coeff();
  const double rate = psi.holder_rate();

  for (int n = 1; n <= depth_max; ++n) {
    long long count = 1;
    for (int k = 0; k < n; ++k) count *= alphabet;

    struct BlockAcc {
      double m = -std::numeric_limits<double>::infinity();
      double s = 0.0;
      long pruned = 0;
    };
    std::vector<BlockAcc> acc(kFixedBlocks);
    std::mutex err_mu;
    std::exception_ptr err;
    std::atomic<bool> failed{false};

    parallel_blocks(count, threads, [&](int block, std::int64_t lo,
                                        std::int64_t hi) {
      BlockAcc a;
      std::vector<Symbol> word(static_cast<std::size_t>(n));
      try {
        for (std::int64_t idx = lo; idx < hi; ++idx) {
          if (failed.load(std::memory_order_relaxed)) return;
          std::int64_t t = idx;
          for (int k = n - 1; k >= 0; --k) {
            word[static_cast<std::size_t>(k)] =
                1 + static_cast<Symbol>(t % alphabet);
            t /= alphabet;
          }
          double S;
          try {
            const auto tau = SequenceTwoSided::periodic_from_word(
                Word{word, 0}, alphabet);
            S = birkhoff_sum(psi, tau, n, eval_depth);
          } catch (const ZeroWeight&) {
            ++a.pruned;
            continue;
          }
          // Streaming log-sum-exp keeps the block reduction stable.
          if (S > a.m) {
            a.s = a.s * std::exp(a.m - S) + 1.0;
            a.m = S;
          } else {
            a.s += std::exp(S - a.m);
          }
        }
      } catch (...) {
        failed.store(true, std::memory_order_relaxed);
        std::lock_guard<std::mutex> g(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
      acc[static_cast<std::size_t>(block)] = a;
    });
    if (err) std::rethrow_exception(err);

    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const BlockAcc& a : acc) {
      out.pruned_zero_weight += a.pruned;
      if (!(a.s > 0.0)) continue;
      if (a.m > m) {
        s = s * std::exp(m - a.m) + a.s;
        m = a.m;
      } else {
        s += a.s * std::exp(a.m - m);
      }
    }
    if (!(s > 0.0))
      throw ZeroWeight("pressure: every depth-" + std::to_string(n) +
                       " cylinder was pruned");
    // Upgrade the periodic-point value to a cylinder sup with the locality
    // correction; it vanishes for locally determined potentials.
    const double corr =
        coeff > 0.0 ? coeff * rate * (1.0 - std::pow(rate, n)) / (1.0 - rate)
                    : 0.0;
    out.a_n.push_back((m + std::log(s) + corr) / n);
  }

  // Fekete closure over splits n = p + q.  Every padded level upper-bounds
  // the sup-over-cylinder value, whose n * a_n sequence is subadditive, so
  // the best split is an upper bound as well; taking the minimum keeps the
  // reported ladder subadditive without giving up validity.  Levels of a
  // locally determined potential are already exact and pass through.
  for (std::size_t i = 1; i < out.a_n.size(); ++i) {
    const double L = static_cast<double>(i + 1);
    for (std::size_t j = 0; 2 * (j + 1) <= i + 1; ++j) {
      const std::size_t p = j + 1, q = i + 1 - p;
      out.a_n[i] = std::min(out.a_n[i],
                            (p * out.a_n[p - 1] + q * out.a_n[q - 1]) / L);
    }
  }

  out.value = *std::min_element(out.a_n.begin(), out.a_n.end());
  out.aitken = aitken_last3(out.a_n);
  return out;
}

// ---- Gibbs check -----------------------------------------------------------

GibbsCheckResult check_gibbs(const Potential& psi, const CylinderMeasure& mu,
                             double P, int depth, double c_bound,
                             double slope_tol, int eval_depth) {
  GibbsCheckResult out;
  const int deepest = std::min(depth, mu.deepest());
  if (deepest < 1)
    throw ValidationError("check_gibbs: measure stores no cylinder levels");
  out.c_min = std::numeric_limits<double>::infinity();
  out.c_max = 0.0;
  std::vector<double> xs, ys;
  for (int L = 1; L <= deepest; ++L) {
    if (!mu.has_level(L)) continue;
    double lvl_min = std::numeric_limits<double>::infinity();
    double lvl_max = 0.0;
    for (const auto& [word, w] : mu.level(L)) {
      double S;
      try {
        // Re-anchoring the word at position 0 shifts the whole periodic
        // orbit and leaves the Birkhoff sum unchanged.
        const auto tau =
            SequenceTwoSided::periodic_from_word(Word{word, 0},
                                                 mu.alphabet());
        S = birkhoff_sum(psi, tau, L, eval_depth);
      } catch (const ZeroWeight&) {
        if (w > 0.0) lvl_max = std::numeric_limits<double>::infinity();
        continue;  // zero potential mass matching zero measure is consistent
      }
      if (!(w > 0.0)) {
        lvl_min = 0.0;  // positive Gibbs weight against a null cylinder
        continue;
      }
      const double ratio = w / std::exp(S - P * L);
      lvl_min = std::min(lvl_min, ratio);
      lvl_max = std::max(lvl_max, ratio);
    }
    if (!(lvl_max > 0.0)) continue;
    out.c_min = std::min(out.c_min, lvl_min);
    out.c_max = std::max(out.c_max, lvl_max);
    const double env =
        std::max(lvl_max, lvl_min > 0.0
                              ? 1.0 / lvl_min
                              : std::numeric_limits<double>::infinity());
    out.c_n.push_back(env);
    xs.push_back(double(L));
    ys.push_back(std::log(env));
  }
  if (out.c_n.empty())
    throw ValidationError("check_gibbs: no usable cylinder levels");
  out.slope = linear_fit(xs, ys).slope;
  const bool bounded = std::isfinite(out.c_max) && out.c_max <= c_bound &&
                       out.c_min >= 1.0 / c_bound && out.c_min > 0.0;
  out.pass = bounded && out.slope <= slope_tol;
  return out;
}

}  // namespace fractaldim
