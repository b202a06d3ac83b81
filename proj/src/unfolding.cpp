#include "fractaldim/unfolding.hpp"

#include <algorithm>
#include <cmath>

#include "fractaldim/rng.hpp"
#include "fractaldim/util.hpp"

namespace fractaldim {

namespace {

// Image of phi_i . phi_{omega_0} ... phi_{omega_n} (V), innermost first.
Region candidate_image(const IFSSystem& sys, const SequenceOneSided& omega,
                       Symbol i, int n) {
  Region r = sys.domain();
  for (int j = n; j >= 0; --j) r = sys.map(omega.at(j)).image_bound(r);
  return sys.map(i).image_bound(r);
}

}  // namespace

UnfoldIndices unfold_indices(const IFSSystem& sys,
                             const SequenceOneSided& omega, int K, int n_max,
                             std::optional<Region> tail_region) {
  const int N = sys.alphabet();
  if (K == 0) K = N;
  if (K < 1 || K > N)
    throw ValidationError("unfold_indices: K must lie in 1..alphabet");
  if (n_max < 1) throw ValidationError("unfold_indices: n_max must be >= 1");
  if (tail_region && tail_region->dim != sys.domain().dim)
    throw ValidationError("unfold_indices: tail region dimension mismatch");

  const Point x = code_point(sys, omega);
  if (!check_non_accumulation(sys, x) &&
      !(sys.countable_tail() && tail_region))
    throw NonAccumulationFailed(
        "map images accumulate at the coded point; the inductive scan has "
        "no admissible indices");

  std::vector<Point> branch_pts;
  branch_pts.reserve(static_cast<std::size_t>(N));
  for (Symbol l = 1; l <= N; ++l) branch_pts.push_back(sys.map(l).eval(x));
  const double slack = 1e-12 * std::max(1.0, sys.domain().diam());

  UnfoldIndices out;
  std::vector<Region> chosen;
  int resolved = 0;
  int prev_n = 0;
  for (Symbol k = 1; k <= K; ++k) {
    const int start = k == 1 ? 1 : prev_n + 1;
    bool found = false;
    for (int n = start; n <= n_max; ++n) {
      const Region img = candidate_image(sys, omega, k, n);
      bool ok = true;
      for (const Region& prev : chosen)
        if (img.intersects(prev)) {
          ok = false;
          break;
        }
      if (ok)
        for (Symbol l = 1; l <= N; ++l) {
          if (l == k) continue;
          // Conservative membership: boundary contact rejects the candidate.
          if (img.contains(branch_pts[static_cast<std::size_t>(l - 1)],
                           slack)) {
            ok = false;
            break;
          }
        }
      if (ok && tail_region && img.intersects(*tail_region)) ok = false;
      if (ok) {
        out.n.push_back(n);
        chosen.push_back(img);
        resolved = std::max(resolved, n);
        prev_n = n;
        found = true;
        break;
      }
    }
    if (!found)
      throw UnfoldTimeout("no admissible index for fiber symbol " +
                          std::to_string(k) + " up to n_max = " +
                          std::to_string(n_max) +
                          "; the images nearly accumulate");
  }
  out.omega_prefix = Word{omega.prefix(resolved + 1), 0};
  out.tail_verified = !sys.countable_tail() || tail_region.has_value();
  return out;
}

FiberMap fiber_map(const IFSSystem& sys, const SequenceOneSided& omega,
                   Symbol i, int n_max, std::optional<Region> tail_region) {
  if (i < 1 || i > sys.alphabet())
    throw SymbolOutOfAlphabet("fiber symbol " + std::to_string(i) +
                              " outside the working alphabet");
  const UnfoldIndices idx =
      unfold_indices(sys, omega, i, n_max, std::move(tail_region));
  const int ni = idx.n[static_cast<std::size_t>(i - 1)];

  FiberMap fm;
  fm.symbol = i;
  fm.word.start = 0;
  fm.word.symbols.push_back(i);
  for (int j = 0; j <= ni; ++j) fm.word.symbols.push_back(omega.at(j));
  fm.map = compose_word(sys, fm.word);
  fm.image = fm.map.image_bound(sys.domain());

  fm.deriv_sup = 0.0;
  const Region& V = sys.domain();
  for (int t = 0; t < 100; ++t) {
    Point p = V.center();
    const double u = t / 99.0;
    p.c[0] = V.lo[0] + u * V.width(0);
    if (V.dim == 2) p.c[1] = V.lo[1] + u * V.width(1);
    fm.deriv_sup = std::max(fm.deriv_sup, fm.map.deriv_modulus(p));
  }
  return fm;
}

// ---- MaximalSmaleSystem ----------------------------------------------------

struct MaximalSmaleSystem::State {
  IFSSystem base;
  int K;
  int n_max;
  std::optional<Region> tail_region;
  double lambda;
  mutable std::mutex mu;
  mutable std::map<std::pair<Symbol, std::vector<Symbol>>, FiberMap> cache;

  State(IFSSystem b, int k, int nm, std::optional<Region> tr)
      : base(std::move(b)),
        K(k),
        n_max(nm),
        tail_region(std::move(tr)),
        lambda(1.0 / base.deriv_bound()) {}
};

MaximalSmaleSystem::MaximalSmaleSystem(IFSSystem base, int K, int n_max,
                                       std::optional<Region> tail_region) {
  const int N = base.alphabet();
  if (K == 0) K = N;
  if (K < 1 || K > N)
    throw ValidationError("fiber alphabet K must lie in 1..alphabet");
  st_ = std::make_shared<State>(std::move(base), K, n_max,
                                std::move(tail_region));
}

const IFSSystem& MaximalSmaleSystem::base() const { return st_->base; }
int MaximalSmaleSystem::K() const { return st_->K; }
int MaximalSmaleSystem::n_max() const { return st_->n_max; }
double MaximalSmaleSystem::lambda() const { return st_->lambda; }

UnfoldIndices MaximalSmaleSystem::indices_for(
    const SequenceOneSided& omega) const {
  return unfold_indices(st_->base, omega, st_->K, st_->n_max,
                        st_->tail_region);
}

FiberMap MaximalSmaleSystem::fiber_map_for(const SequenceOneSided& omega,
                                           Symbol i) const {
  if (i < 1 || i > st_->K)
    throw SymbolOutOfAlphabet("fiber symbol " + std::to_string(i) +
                              " outside 1.." + std::to_string(st_->K));
  const UnfoldIndices idx =
      unfold_indices(st_->base, omega, i, st_->n_max, st_->tail_region);
  const int ni = idx.n[static_cast<std::size_t>(i - 1)];
  std::pair<Symbol, std::vector<Symbol>> key{i, omega.prefix(ni + 1)};
  {
    std::lock_guard<std::mutex> g(st_->mu);
    auto it = st_->cache.find(key);
    if (it != st_->cache.end()) return it->second;
  }
  FiberMap fm = fiber_map(st_->base, omega, i, st_->n_max, st_->tail_region);
  std::lock_guard<std::mutex> g(st_->mu);
  return st_->cache.emplace(std::move(key), std::move(fm)).first->second;
}

std::vector<FiberMap> MaximalSmaleSystem::cache_entries() const {
  std::lock_guard<std::mutex> g(st_->mu);
  std::vector<FiberMap> out;
  out.reserve(st_->cache.size());
  for (const auto& [k, v] : st_->cache) out.push_back(v);
  return out;
}

// ---- Projection and sampling -------------------------------------------------

SmaleProjection smale_project(const MaximalSmaleSystem& smale,
                              const SequenceTwoSided& tau, int m) {
  if (m < 1) throw ValidationError("smale_project: m must be >= 1");
  Point x = smale.base().domain().center();
  for (int j = m; j >= 1; --j) {
    const SequenceOneSided from = tau.from_index(-j);
    const Symbol i = from.at(0);
    x = smale.fiber_map_for(from.shifted(), i).map.eval(x);
  }
  SmaleProjection out;
  out.point = x;
  out.radius =
      std::pow(smale.lambda(), -m) * smale.base().domain().diam();
  return out;
}

FiberFractalSample fiber_fractal_sample(const MaximalSmaleSystem& smale,
                                        const SequenceOneSided& omega,
                                        int depth_m, long long n_words,
                                        std::uint64_t seed,
                                        std::optional<long long> budget) {
  if (depth_m < 1)
    throw ValidationError("fiber_fractal_sample: depth must be >= 1");
  if (n_words < 1)
    throw ValidationError("fiber_fractal_sample: word budget must be >= 1");
  const long long cap = budget.value_or(default_budget());
  if (n_words > cap)
    throw CombinatorialBlowup("fiber_fractal_sample: " +
                              std::to_string(n_words) +
                              " past words exceed the evaluation budget of " +
                              std::to_string(cap));
  const int K = smale.K();
  double total_d = std::pow(double(K), depth_m);
  const bool exhaustive = total_d <= double(n_words);

  FiberFractalSample out{omega, {}, {}, {}, exhaustive};
  auto project_word = [&](const std::vector<Symbol>& past_block) {
    // past_block lists tau_{-m}..tau_{-1}; the stored past runs backwards.
    std::vector<Symbol> rev(past_block.rbegin(), past_block.rend());
    const SequenceTwoSided tau(
        SequenceOneSided::finite(std::move(rev), smale.base().alphabet()),
        omega);
    const SmaleProjection pr = smale_project(smale, tau, depth_m);
    out.words.push_back(past_block);
    out.points.push_back(pr.point);
    out.radii.push_back(pr.radius);
  };

  if (exhaustive) {
    std::vector<Symbol> w(static_cast<std::size_t>(depth_m), 1);
    for (;;) {
      project_word(w);
      int k = depth_m - 1;
      while (k >= 0 && w[static_cast<std::size_t>(k)] == K) {
        w[static_cast<std::size_t>(k)] = 1;
        --k;
      }
      if (k < 0) break;
      ++w[static_cast<std::size_t>(k)];
    }
  } else {
    std::vector<Symbol> w(static_cast<std::size_t>(depth_m));
    for (long long t = 0; t < n_words; ++t) {
      for (int j = 0; j < depth_m; ++j) {
        const double u = rng::uniform01(
            seed, 3,
            static_cast<std::uint64_t>(t) *
                    static_cast<std::uint64_t>(depth_m) +
                static_cast<std::uint64_t>(j));
        w[static_cast<std::size_t>(j)] =
            std::min<Symbol>(1 + static_cast<Symbol>(u * K), K);
      }
      project_word(w);
    }
  }
  return out;
}

// ---- Fiber potential and dimension ---------------------------------------------

Potential psi_s_potential(const MaximalSmaleSystem& smale, double s) {
  if (!(s > 0.0)) throw ValidationError("fiber potential needs s > 0");
  const IFSSystem& base = smale.base();
  const double beta = base.bdp().beta;
  const double contr = std::pow(base.contraction(), beta);
  // Composed maps obey the distortion bound with constant H/(1-L); the
  // projection radius shrinks like alpha^m.
  const double Hp = base.bdp().H / (1.0 - contr);
  const double rate = std::pow(base.deriv_bound(), beta);
  // Sequences in a common n-cylinder share fiber anchors only to depth n-1,
  // so the declared n-cylinder variation undoes one contraction step.
  const double coeff =
      s * Hp * std::pow(2.0 * base.domain().diam(), beta) / rate;

  auto fn = [smale, s](const SequenceTwoSided& eta, int depth) -> double {
    const long long pres = eta.past_resolution();
    const int m = static_cast<int>(std::min<long long>(depth, pres));
    if (m < 1)
      throw ResolutionExceeded(
          "fiber potential needs at least one resolved past symbol");
    const SmaleProjection pr = smale_project(smale, eta, m);
    const FiberMap fm = smale.fiber_map_for(eta.from_index(1), eta.at(0));
    const double d = fm.map.deriv_modulus(pr.point);
    if (!(d > 0.0))
      throw NonHyperbolic("fiber map derivative vanishes at the projection");
    return s * std::log(d);
  };
  return Potential(Potential::Kind::kFiberGeometric, std::move(fn), coeff,
                   rate, false);
}

bool verify_fiber_osc(const MaximalSmaleSystem& smale,
                      const SequenceOneSided& omega) {
  std::vector<Region> imgs;
  for (Symbol i = 1; i <= smale.K(); ++i)
    imgs.push_back(smale.fiber_map_for(omega, i).image);
  for (std::size_t a = 0; a < imgs.size(); ++a)
    for (std::size_t b = a + 1; b < imgs.size(); ++b)
      if (imgs[a].intersects(imgs[b])) return false;
  return true;
}

EmpiricalMeasure fiber_conditional_measure(const MaximalSmaleSystem& smale,
                                           const Potential& psi,
                                           const SequenceOneSided& omega,
                                           int depth, int eval_depth,
                                           std::optional<long long> budget) {
  if (depth < 1)
    throw ValidationError("fiber_conditional_measure: depth must be >= 1");
  const int K = smale.K();
  const long long cap = budget.value_or(default_budget());
  if (std::pow(double(K), depth) > double(cap))
    throw CombinatorialBlowup(
        "fiber_conditional_measure: past-block enumeration exceeds the "
        "budget");
  EmpiricalMeasure emp;
  std::vector<Symbol> w(static_cast<std::size_t>(depth), 1);
  std::vector<double> logw;
  for (;;) {
    std::vector<Symbol> rev(w.rbegin(), w.rend());
    const SequenceTwoSided eta(SequenceOneSided::periodic(std::move(rev), K),
                               omega);
    double S = 0.0;
    SequenceTwoSided cur = eta;
    for (int k = 1; k <= depth; ++k) {
      cur = cur.shifted_right();
      S += psi.eval(cur, eval_depth);
    }
    logw.push_back(S);
    emp.points.push_back(smale_project(smale, eta, depth).point);
    int k = depth - 1;
    while (k >= 0 && w[static_cast<std::size_t>(k)] == K) {
      w[static_cast<std::size_t>(k)] = 1;
      --k;
    }
    if (k < 0) break;
    ++w[static_cast<std::size_t>(k)];
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double v : logw) z += std::exp(v - m);
  emp.weights.reserve(logw.size());
  for (double v : logw) emp.weights.push_back(std::exp(v - m) / z);
  return emp;
}

FiberDimensionReport fiber_dimension(const MaximalSmaleSystem& smale, double s,
                                     int depth, const SequenceOneSided& omega,
                                     int eval_depth,
                                     std::optional<long long> budget,
                                     int threads) {
  if (depth < 2) throw ValidationError("fiber_dimension: depth must be >= 2");
  const int K = smale.K();
  const Potential psi = psi_s_potential(smale, s);

  FiberDimensionReport rep;
  rep.s = s;
  rep.depth = depth;

  const PressureResult pres =
      pressure(psi, K, depth, eval_depth, budget, threads);
  rep.pressure_value = pres.value;

  const CylinderMeasure mu =
      gibbs_approximation(psi, rep.pressure_value, K, depth, eval_depth,
                          budget);
  rep.gibbs = check_gibbs(psi, mu, rep.pressure_value, depth, 100.0, 0.01,
                          eval_depth);
  rep.entropy = entropy_estimate(mu).h;

  // Lyapunov exponent with respect to the fiber maps at the deepest level.
  double chi = 0.0, total = 0.0;
  for (const auto& [word, wgt] : mu.level(depth)) {
    if (!(wgt > 0.0)) continue;
    const auto tau = SequenceTwoSided::periodic_from_word(Word{word, 0}, K);
    chi -= wgt * psi.eval(tau, eval_depth) / s;
    total += wgt;
  }
  if (!(total > 0.0))
    throw ValidationError("fiber_dimension: Gibbs level carries no mass");
  rep.chi_fiber = chi / total;
  rep.hd = dimension_formula(rep.entropy, rep.chi_fiber);

  // Cross-check: push the conditional measure over depth-m past blocks
  // through the projection and regress ball masses.
  const EmpiricalMeasure emp =
      fiber_conditional_measure(smale, psi, omega, depth, eval_depth, budget);
  const double step = std::exp(-rep.chi_fiber);
  const RLadder ladder = RLadder::geometric(
      smale.base().domain().diam() * step, step,
      std::max(2, depth - 2));
  rep.local_check =
      exact_dimensionality_test(emp, ladder, 33, 17, 1e-14);
  return rep;
}

}  // namespace fractaldim
