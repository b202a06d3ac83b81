#include "fractaldim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fractaldim/rng.hpp"
#include "fractaldim/util.hpp"

namespace fractaldim {

namespace {

struct Stats {
  double mean = 0.0, stddev = 0.0;
};

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  if (v.empty()) return s;
  for (double t : v) s.mean += t;
  s.mean /= double(v.size());
  double acc = 0.0;
  for (double t : v) acc += (t - s.mean) * (t - s.mean);
  s.stddev = std::sqrt(acc / double(v.size()));
  return s;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Shannon entropy of an unnormalized weight table (normalized internally).
template <typename Map>
double table_entropy(const Map& m) {
  double total = 0.0;
  for (const auto& [k, v] : m) total += v;
  if (!(total > 0.0)) return 0.0;
  double H = 0.0;
  for (const auto& [k, v] : m)
    if (v > 0.0) {
      const double q = v / total;
      H -= q * std::log(q);
    }
  return H;
}

}  // namespace

// ---- Lyapunov exponents ----------------------------------------------------

LyapunovReport lyapunov_cylinder(const IFSSystem& sys,
                                 const CylinderMeasure& mu, int eval_depth) {
  LyapunovReport rep;
  for (int L = 1; L <= mu.deepest(); ++L) {
    if (!mu.has_level(L)) continue;
    double acc = 0.0, total = 0.0;
    for (const auto& [word, wgt] : mu.level(L)) {
      if (!(wgt > 0.0)) continue;
      const auto tau =
          SequenceTwoSided::periodic_from_word(Word{word, 0}, mu.alphabet());
      const Point x = code_point_prefix(sys, tau.from_index(1), eval_depth);
      const double m = sys.map(word[0]).deriv_modulus(x);
      if (!(m > 0.0))
        throw NonHyperbolic("map derivative vanishes on a cylinder anchor");
      acc += wgt * std::log(m);
      total += wgt;
      rep.samples++;
    }
    if (!(total > 0.0))
      throw ValidationError("lyapunov_cylinder: level " + std::to_string(L) +
                            " carries no mass");
    rep.by_level.push_back(-acc / total);
  }
  if (rep.by_level.empty())
    throw ValidationError("lyapunov_cylinder: measure stores no levels");
  rep.chi = rep.by_level.back();
  return rep;
}

LyapunovReport lyapunov_trajectory(const IFSSystem& sys,
                                   const ChaosGameRun& run) {
  if (run.pre_states.empty() || run.symbols.empty())
    throw ValidationError(
        "lyapunov_trajectory: run the sampler with path recording");
  LyapunovReport rep;
  std::vector<double> vals;
  vals.reserve(run.pre_states.size());
  for (std::size_t t = static_cast<std::size_t>(run.burn_in);
       t < run.pre_states.size(); ++t) {
    const double m = sys.map(run.symbols[t]).deriv_modulus(run.pre_states[t]);
    if (!(m > 0.0))
      throw NonHyperbolic("map derivative vanishes along the sampled path");
    vals.push_back(std::log(m));
  }
  const Stats s = stats_of(vals);
  rep.chi = -s.mean;
  rep.std_error = s.stddev / std::sqrt(double(vals.size()));
  rep.samples = static_cast<long long>(vals.size());
  return rep;
}

// ---- Entropy ----------------------------------------------------------------

EntropyEstimate entropy_estimate(const CylinderMeasure& mu) {
  EntropyEstimate est;
  double prev = 0.0;
  for (int L = 1; L <= mu.deepest(); ++L) {
    if (!mu.has_level(L))
      throw ValidationError("entropy_estimate: level " + std::to_string(L) +
                            " missing; successive differences need every "
                            "level");
    const double H = mu.entropy(L);
    est.by_level.push_back(H - prev);
    est.ratio.push_back(H / double(L));
    prev = H;
    est.levels = L;
  }
  if (est.by_level.empty())
    throw ValidationError("entropy_estimate: measure stores no levels");
  est.h = est.by_level.back();
  return est;
}

double entropy_trajectory(const WeightSystem& w, const ChaosGameRun& run) {
  if (run.pre_states.empty() || run.symbols.empty())
    throw ValidationError(
        "entropy_trajectory: run the sampler with path recording");
  double acc = 0.0;
  long long n = 0;
  for (std::size_t t = static_cast<std::size_t>(run.burn_in);
       t < run.pre_states.size(); ++t) {
    const double p = w.eval(run.symbols[t], run.pre_states[t]);
    if (!(p > 0.0))
      throw ZeroWeight("sampled path crossed a vanishing weight");
    acc += std::log(p);
    ++n;
  }
  return -acc / double(n);
}

// ---- Projection entropy ------------------------------------------------------

ProjectionEntropyResult projection_entropy(const IFSSystem& sys,
                                           const CylinderMeasure& mu,
                                           const std::vector<double>& deltas,
                                           std::optional<double> cap,
                                           int eval_depth) {
  if (deltas.empty())
    throw ValidationError("projection_entropy: empty delta ladder");
  const int n = mu.deepest();
  if (n < 1 || !mu.has_level(n))
    throw ValidationError("projection_entropy: measure stores no levels");
  const Region& V = sys.domain();

  // Anchor points: x_w = pi(per(w)) and its shift, related exactly by
  // x_w = phi_{w_0}(pi(sigma per(w))).
  struct Row {
    double wgt;
    Symbol s0;
    Point x, xs;
  };
  std::vector<Row> rows;
  rows.reserve(mu.level(n).size());
  for (const auto& [word, wgt] : mu.level(n)) {
    if (!(wgt > 0.0)) continue;
    const auto tau =
        SequenceTwoSided::periodic_from_word(Word{word, 0}, mu.alphabet());
    const Point xs = code_point_prefix(sys, tau.from_index(1), eval_depth);
    rows.push_back(Row{wgt, word[0], sys.map(word[0]).eval(xs), xs});
  }
  if (rows.empty())
    throw ValidationError("projection_entropy: no positive-mass cylinders");

  ProjectionEntropyResult out;
  for (double delta : deltas) {
    if (!(delta > 0.0))
      throw ValidationError("projection_entropy: delta must be positive");
    const long nx =
        std::max(1L, static_cast<long>(std::ceil(V.width(0) / delta)));
    auto cell_of = [&](const Point& p) -> long {
      auto axis = [&](int a) {
        long c = static_cast<long>(std::floor((p.c[a] - V.lo[a]) / delta));
        const long cells = std::max(
            1L, static_cast<long>(std::ceil(V.width(a) / delta)));
        return std::clamp(c, 0L, cells - 1);
      };
      return V.dim == 1 ? axis(0) : axis(0) + nx * axis(1);
    };
    std::map<std::pair<Symbol, long>, double> joint0, joint1;
    std::map<long, double> marg0, marg1;
    for (const Row& r : rows) {
      const long c0 = cell_of(r.x), c1 = cell_of(r.xs);
      joint0[{r.s0, c0}] += r.wgt;
      marg0[c0] += r.wgt;
      joint1[{r.s0, c1}] += r.wgt;
      marg1[c1] += r.wgt;
    }
    const double v = (table_entropy(joint1) - table_entropy(marg1)) -
                     (table_entropy(joint0) - table_entropy(marg0));
    out.deltas.push_back(delta);
    out.values.push_back(v);
  }
  out.estimate = median_of(out.values);
  if (cap) {
    const double clamped = std::clamp(out.estimate, 0.0, *cap);
    out.clamped = clamped != out.estimate;
    out.estimate = clamped;
  } else if (out.estimate < 0.0) {
    out.estimate = 0.0;
    out.clamped = true;
  }
  return out;
}

// ---- Local dimension ----------------------------------------------------------

RLadder RLadder::geometric(double r0, double factor, int count) {
  if (!(r0 > 0.0) || !(factor > 0.0) || factor == 1.0 || count < 2)
    throw ValidationError(
        "radius ladder needs r0 > 0, factor in (0,1) or (1,inf), count >= 2");
  RLadder l;
  double r = r0;
  for (int k = 0; k < count; ++k, r *= factor) l.radii.push_back(r);
  return l;
}

namespace {

template <typename MeasureT>
LocalDim local_dim_impl(const MeasureT& mu, const Point& x,
                        const RLadder& ladder, double floor_mass) {
  std::vector<double> lx, ly;
  for (double r : ladder.radii) {
    if (!(r > 0.0)) continue;
    const double m = mu.ball_mass(x, r);
    if (m <= floor_mass) continue;
    lx.push_back(std::log(r));
    ly.push_back(std::log(m));
  }
  if (lx.size() < 2)
    throw EmptyBall("fewer than two radii carry usable ball mass at (" +
                    format_double(x.c[0]) + ")");
  const LinFit fit = linear_fit(lx, ly);
  LocalDim d;
  d.dim = fit.slope;
  d.r2 = fit.r2;
  d.radii_used = fit.n;
  d.at = x;
  return d;
}

}  // namespace

LocalDim local_dimension(const GridMeasure& mu, const Point& x,
                         const RLadder& ladder, double mass_floor) {
  return local_dim_impl(mu, x, ladder, std::max(mass_floor, 0.0));
}

LocalDim local_dimension(const EmpiricalMeasure& mu, const Point& x,
                         const RLadder& ladder, double mass_floor) {
  // Default floor keeps at least ~100 sample points inside the smallest
  // ball, so per-ball relative error stays near 10%.  Pass an explicit floor
  // when the atoms carry exact (non-sampled) weights.
  const double floor_mass =
      mass_floor > 0.0 ? mass_floor
                       : 100.0 / double(std::max<std::size_t>(mu.size(), 1));
  return local_dim_impl(mu, x, ladder, floor_mass);
}

LocalDim local_dimension_at_time(const IFSSystem& sys, const WeightSystem& w,
                                 const ChaosGameRun& run, long long T,
                                 int depth) {
  if (run.pre_states.empty() || run.symbols.empty())
    throw ValidationError(
        "local_dimension_at_time: run the sampler with path recording");
  if (depth < 2) throw ValidationError("local_dimension_at_time: depth >= 2");
  if (T < depth || T >= static_cast<long long>(run.pre_states.size()))
    throw ValidationError(
        "local_dimension_at_time: time must satisfy depth <= T < steps");

  std::vector<double> lx, ly;
  double loglik = 0.0;
  for (int k = 1; k <= depth; ++k) {
    const std::size_t tj = static_cast<std::size_t>(T - k);
    const double p = w.eval(run.symbols[tj], run.pre_states[tj]);
    if (!(p > 0.0))
      throw ZeroWeight("sampled path crossed a vanishing weight");
    loglik += std::log(p);
    // Composition cell phi_{i_{T-1}} o ... o phi_{i_{T-k}} (V), innermost
    // applied first.
    Region cell = sys.domain();
    for (int j = k; j >= 1; --j)
      cell = sys.map(run.symbols[static_cast<std::size_t>(T - j)])
                 .image_bound(cell);
    const double diam = cell.diam();
    if (!(diam > 0.0)) break;
    lx.push_back(std::log(diam));
    ly.push_back(loglik);
  }
  if (lx.size() < 2)
    throw EmptyBall("composition cells degenerate before two depths");
  const LinFit fit = linear_fit(lx, ly);
  LocalDim d;
  d.dim = fit.slope;
  d.r2 = fit.r2;
  d.radii_used = fit.n;
  d.at = run.pre_states[static_cast<std::size_t>(T)];
  return d;
}

// ---- Exact-dimensionality sweeps ----------------------------------------------

namespace {

DimensionReport report_from(std::vector<LocalDim> locals) {
  DimensionReport rep;
  std::vector<double> dims, r2s;
  for (const LocalDim& d : locals) {
    dims.push_back(d.dim);
    r2s.push_back(d.r2);
  }
  const Stats s = stats_of(dims);
  rep.mean = s.mean;
  rep.stddev = s.stddev;
  rep.median_r2 = median_of(r2s);
  rep.locals = std::move(locals);
  return rep;
}

}  // namespace

DimensionReport exact_dimensionality_test(const GridMeasure& mu,
                                          const RLadder& ladder, int points,
                                          std::uint64_t seed,
                                          double mass_floor) {
  if (points < 1)
    throw ValidationError("exact_dimensionality_test: points >= 1");
  std::vector<double> cdf(mu.bins());
  double acc = 0.0;
  for (std::size_t b = 0; b < mu.bins(); ++b) {
    acc += mu.mass(b);
    cdf[b] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("measure carries no mass");
  std::vector<LocalDim> locals;
  for (int t = 0; t < points; ++t) {
    const double u = rng::uniform01(seed, 7, static_cast<std::uint64_t>(t)) *
                     acc;
    const std::size_t b = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const Point x = mu.bin_center(std::min(b, mu.bins() - 1));
    locals.push_back(local_dimension(mu, x, ladder, mass_floor));
  }
  return report_from(std::move(locals));
}

DimensionReport exact_dimensionality_test(const EmpiricalMeasure& mu,
                                          const RLadder& ladder, int points,
                                          std::uint64_t seed,
                                          double mass_floor) {
  if (points < 1 || mu.size() == 0)
    throw ValidationError("exact_dimensionality_test: need points and samples");
  // Draw atoms by weight so positions come from the measure itself.
  std::vector<double> cdf(mu.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    acc += mu.weight(k);
    cdf[k] = acc;
  }
  if (!(acc > 0.0)) throw ValidationError("measure carries no mass");
  std::vector<LocalDim> locals;
  for (int t = 0; t < points; ++t) {
    const double u =
        rng::uniform01(seed, 7, static_cast<std::uint64_t>(t)) * acc;
    const std::size_t k = std::min(
        static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                 cdf.begin()),
        mu.size() - 1);
    locals.push_back(local_dimension(mu, mu.points[k], ladder, mass_floor));
  }
  return report_from(std::move(locals));
}

DimensionReport exact_dimensionality_orbit(const IFSSystem& sys,
                                           const WeightSystem& w,
                                           const ChaosGameRun& run, int points,
                                           int depth, std::uint64_t seed) {
  if (points < 1)
    throw ValidationError("exact_dimensionality_orbit: points >= 1");
  const long long lo = std::max<long long>(run.burn_in, depth);
  const long long hi = static_cast<long long>(run.pre_states.size());
  if (hi <= lo)
    throw ValidationError("exact_dimensionality_orbit: path too short");
  std::vector<LocalDim> locals;
  for (int t = 0; t < points; ++t) {
    const double u = rng::uniform01(seed, 8, static_cast<std::uint64_t>(t));
    const long long T =
        std::min(lo + static_cast<long long>(u * double(hi - lo)), hi - 1);
    locals.push_back(local_dimension_at_time(sys, w, run, T, depth));
  }
  return report_from(std::move(locals));
}

double dimension_formula(double h, double chi) {
  if (!std::isfinite(chi) || !(chi > 0.0))
    throw NonHyperbolic(
        "dimension formula needs a positive finite Lyapunov exponent, got " +
        format_double(chi));
  if (!std::isfinite(h) || h < 0.0)
    throw ValidationError("dimension formula needs a nonnegative entropy");
  return h / chi;
}

// ---- Box dimension --------------------------------------------------------------

BoxDim box_dimension(const EmpiricalMeasure& mu, const Region& V,
                     const std::vector<double>& deltas) {
  if (mu.size() == 0 || deltas.empty())
    throw ValidationError("box_dimension: need samples and a delta ladder");
  BoxDim out;
  std::vector<double> lx, ly;
  for (double delta : deltas) {
    if (!(delta > 0.0))
      throw ValidationError("box_dimension: delta must be positive");
    const long nx =
        std::max(1L, static_cast<long>(std::ceil(V.width(0) / delta)));
    std::set<long> cells;
    for (const Point& p : mu.points) {
      auto axis = [&](int a) {
        const long n = std::max(
            1L, static_cast<long>(std::ceil(V.width(a) / delta)));
        return std::clamp(
            static_cast<long>(std::floor((p.c[a] - V.lo[a]) / delta)), 0L,
            n - 1);
      };
      cells.insert(V.dim == 1 ? axis(0) : axis(0) + nx * axis(1));
    }
    out.deltas.push_back(delta);
    out.counts.push_back(static_cast<long long>(cells.size()));
    lx.push_back(std::log(1.0 / delta));
    ly.push_back(std::log(double(cells.size())));
  }
  const LinFit fit = linear_fit(lx, ly);
  out.dim = fit.slope;
  out.r2 = fit.r2;
  return out;
}

// ---- Separation ------------------------------------------------------------------

double image_set_gap(const IFSSystem& sys) {
  std::vector<Region> img;
  for (Symbol i = 1; i <= sys.alphabet(); ++i)
    img.push_back(sys.map(i).image_bound(sys.domain()));
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < img.size(); ++a)
    for (std::size_t b = a + 1; b < img.size(); ++b) {
      // Signed per-axis separation; positive iff the closed sets are
      // disjoint along some axis.
      double g = -std::numeric_limits<double>::infinity();
      for (int ax = 0; ax < img[a].dim; ++ax)
        g = std::max(g, std::max(img[b].lo[ax] - img[a].hi[ax],
                                 img[a].lo[ax] - img[b].hi[ax]));
      gap = std::min(gap, g);
    }
  return gap;
}

bool images_strongly_separated(const IFSSystem& sys) {
  return image_set_gap(sys) > 0.0;
}

}  // namespace fractaldim
