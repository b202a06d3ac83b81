// End-to-end acceptance gate: one line per numbered check, nonzero exit if
// any of them fails.  Everything here runs against closed-form oracles or
// independent re-derivations; tolerances are part of the contract.
#include <sys/wait.h>

#include <any>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fractaldim/config.hpp"
#include "fractaldim/dimension.hpp"
#include "fractaldim/errors.hpp"
#include "fractaldim/io.hpp"
#include "fractaldim/measures.hpp"
#include "fractaldim/rscc.hpp"
#include "fractaldim/unfolding.hpp"
#include "fractaldim/weights.hpp"
#include "helpers.hpp"

using namespace fractaldim;
using namespace fractaldim::testing;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int idx, const std::string& what, bool pass,
            const std::string& detail) {
  std::printf("[%s] %d. %s (%s)\n", pass ? "PASS" : "FAIL", idx, what.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(int idx, const std::string& what,
                   const std::function<std::pair<bool, std::string>()>& fn) {
  try {
    const auto [pass, detail] = fn();
    report(idx, what, pass, detail);
  } catch (const std::exception& e) {
    report(idx, what, false, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Separated ternary system with constant halves: the grid fixed point,
//    the sampled chain, the pointwise dimension, and the entropy-over-
//    contraction formula all have to tell one story.
std::pair<bool, std::string> criterion_stationary_agreement() {
  const auto t0 = Clock::now();
  const auto sys = cantor_system();
  const auto w = half_weights();

  const auto st = stationary_measure(sys, w, 4096, 1e-9);
  const auto run = chaos_game(sys, w, 1000000, 1);
  const double ks = ks_distance(st.measure, run.measure);

  const auto rec = chaos_game(sys, w, 300000, 2, 1000, true);
  const auto dim = exact_dimensionality_orbit(sys, w, rec, 128, 20, 31);

  const auto h_proj = projection_entropy(
      sys, CylinderMeasure::bernoulli({0.5, 0.5}, 12),
      RLadder::geometric(0.25, 0.5, 7).radii, std::log(2.0));
  const double chi = lyapunov_trajectory(sys, rec).chi;
  const double formula = dimension_formula(h_proj.estimate, chi);

  const double target = std::log(2.0) / std::log(3.0);
  const double elapsed = seconds_since(t0);
  const bool pass = st.converged && ks <= 0.01 &&
                    std::fabs(dim.mean - target) <= 0.03 &&
                    dim.stddev <= 0.05 &&
                    std::fabs(formula - dim.mean) <= 0.03 && elapsed <= 60.0;
  return {pass, "ks=" + fmt(ks) + " mean=" + fmt(dim.mean) +
                    " std=" + fmt(dim.stddev) + " formula=" + fmt(formula) +
                    " elapsed=" + fmt(elapsed) + "s"};
}

// 2. Place-dependent halves on the same maps: stationarity residual, exact
//    dimensionality, and the entropy/contraction upper bound.
std::pair<bool, std::string> criterion_place_dependent() {
  const auto sys = cantor_system();
  const auto w = place_dependent_weights();

  const auto st = stationary_measure(sys, w, 4096, 1e-9);
  const double tv = total_variation(adjoint_apply(sys, w, st.measure),
                                    st.measure);

  const auto rec = chaos_game(sys, w, 400000, 3, 1000, true);
  const auto dim = exact_dimensionality_orbit(sys, w, rec, 128, 20, 31);
  const double h_sigma = entropy_trajectory(w, rec);
  const double chi = lyapunov_trajectory(sys, rec).chi;

  const bool pass = st.converged && tv < 1e-8 && dim.stddev <= 0.05 &&
                    dim.median_r2 >= 0.98 &&
                    dim.mean <= h_sigma / chi + 0.03;
  return {pass, "tv=" + fmt(tv) + " mean=" + fmt(dim.mean) +
                    " std=" + fmt(dim.stddev) + " r2=" + fmt(dim.median_r2) +
                    " bound=" + fmt(h_sigma / chi)};
}

// 3. Pressure ladder: flat at zero for normalized constant weights, the
//    closed form for constant-derivative geometric potentials, and the
//    dimension root by bisection.
std::pair<bool, std::string> criterion_pressure() {
  const auto sys = cantor_system();
  bool pass = true;

  const auto flat = pressure(potential_from_weights(sys, half_weights()), 2, 8);
  double worst_flat = 0.0;
  for (double a : flat.a_n) worst_flat = std::max(worst_flat, std::fabs(a));
  pass = pass && flat.a_n.size() == 8 && worst_flat <= 1e-13;

  double worst_closed = 0.0;
  for (double s : {0.4, std::log(2.0) / std::log(3.0), 0.8}) {
    const auto pr = pressure(geometric_potential(sys, s), 2, 8);
    const double want = std::log(2.0 * std::pow(3.0, -s));
    for (double a : pr.a_n)
      worst_closed = std::max(worst_closed, std::fabs(a - want));
    worst_closed = std::max(worst_closed, std::fabs(pr.value - want));
  }
  pass = pass && worst_closed <= 1e-10;

  double lo = 0.05, hi = 0.99;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = pressure(geometric_potential(sys, mid), 2, 6).value;
    (p > 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  const double target = std::log(2.0) / std::log(3.0);
  pass = pass && std::fabs(root - target) <= 1e-6;

  return {pass, "flat=" + fmt(worst_flat) + " closed=" + fmt(worst_closed) +
                    " root_err=" + fmt(std::fabs(root - target))};
}

// 4. Gibbs property: the fair-coin product against its own potential sits at
//    constant 1; a mismatched potential is rejected with a growing envelope.
std::pair<bool, std::string> criterion_gibbs() {
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 10);
  const auto own =
      symbol_potential({std::log(0.5), std::log(0.5)});
  const auto g = check_gibbs(own, mu, 0.0, 10);
  const bool self_ok = g.pass && std::fabs(g.c_min - 1.0) <= 1e-12 &&
                       std::fabs(g.c_max - 1.0) <= 1e-12;

  const auto other =
      symbol_potential({std::log(0.85), std::log(0.15)});
  const auto b = check_gibbs(other, mu, 0.0, 10);
  const bool reject_ok =
      !b.pass && b.slope > 0.01 && b.c_n.back() > b.c_n.front();

  return {self_ok && reject_ok,
          "own C in [" + fmt(g.c_min) + "," + fmt(g.c_max) +
              "] mismatch slope=" + fmt(b.slope)};
}

// 5. Unfolding the half-shift overlap pair: exact indices against a brute
//    re-scan, disjoint fiber images, geometric derivative decay, and
//    dominated summability, all inside the time budget.
std::pair<bool, std::string> criterion_unfolding() {
  const auto t0 = Clock::now();
  const auto sys = dyadic_overlap_system();
  const auto omega = SequenceOneSided::periodic({1}, 2);
  bool pass = true;

  const auto idx = unfold_indices(sys, omega);
  pass = pass && idx.n == std::vector<int>{1, 2};

  // Brute oracle: recompute admissibility for every candidate index.
  const Point x = code_point(sys, omega);
  std::vector<Region> chosen;
  int prev = 0;
  for (Symbol k = 1; k <= 2 && pass; ++k) {
    const int nk = idx.n[static_cast<std::size_t>(k - 1)];
    for (int n = (k == 1 ? 1 : prev + 1); n <= nk; ++n) {
      Region img = sys.domain();
      for (int j = n; j >= 0; --j) img = sys.map(omega.at(j)).image_bound(img);
      img = sys.map(k).image_bound(img);
      bool ok = true;
      for (const Region& c : chosen)
        if (img.intersects(c)) ok = false;
      for (Symbol l = 1; l <= 2 && ok; ++l)
        if (l != k && img.contains(sys.map(l).eval(x), 1e-12)) ok = false;
      if (ok != (n == nk)) pass = false;
      if (n == nk) {
        chosen.push_back(img);
        prev = nk;
      }
    }
  }

  MaximalSmaleSystem smale(sys);
  double worst_decay = 0.0;
  for (auto base : {SequenceOneSided::periodic({1}, 2),
                    SequenceOneSided::periodic({2}, 2),
                    SequenceOneSided::periodic({1, 2}, 2)}) {
    const auto f1 = smale.fiber_map_for(base, 1);
    const auto f2 = smale.fiber_map_for(base, 2);
    pass = pass && !f1.image.intersects(f2.image);
    pass = pass && verify_fiber_osc(smale, base);
  }
  for (const auto& fm : smale.cache_entries()) {
    const double bound = std::pow(sys.deriv_bound(), fm.symbol);
    worst_decay = std::max(worst_decay, fm.deriv_sup - bound);
    pass = pass && fm.deriv_sup <= bound + 1e-14;
  }

  const double s = 0.5;
  const auto sum = check_summability(psi_s_potential(smale, s), 2);
  pass = pass && sum.pass;
  double envelope = 0.0;
  for (std::size_t i = 0; i < sum.partial.size(); ++i) {
    envelope += std::pow(sys.deriv_bound(), s * static_cast<double>(i + 1));
    pass = pass && sum.partial[i] <= envelope + 1e-12;
  }

  const double elapsed = seconds_since(t0);
  pass = pass && elapsed <= 5.0;
  return {pass, "n=(" + std::to_string(idx.n[0]) + "," +
                    std::to_string(idx.n[1]) +
                    ") decay_slack=" + fmt(-worst_decay) +
                    " elapsed=" + fmt(elapsed) + "s"};
}

// 6. Fiber dimension: the entropy-over-contraction value against a ball-mass
//    regression on a 2^10-point fiber sample.
std::pair<bool, std::string> criterion_fiber_dimension() {
  const auto sys = dyadic_overlap_system();
  MaximalSmaleSystem smale(sys);
  const auto omega = SequenceOneSided::periodic({1}, 2);

  const auto rep = fiber_dimension(smale, 1.0, 8, omega);
  const auto emp =
      fiber_conditional_measure(smale, psi_s_potential(smale, 1.0), omega, 10);
  const double step = std::exp(-rep.chi_fiber);
  const auto ladder =
      RLadder::geometric(sys.domain().diam() * step, step, 8);
  const auto local = exact_dimensionality_test(emp, ladder, 64, 17, 1e-14);

  const bool pass = emp.points.size() == 1024 &&
                    std::fabs(local.mean - rep.hd) <= 0.05;
  return {pass, "hd=" + fmt(rep.hd) + " sampled=" + fmt(local.mean) +
                    " gap=" + fmt(std::fabs(local.mean - rep.hd))};
}

// Small table-driven random system used to exercise the delayed-window
// identity away from any special structure.
class TableRscc : public Rscc {
 public:
  TableRscc(int S, int K, std::uint64_t seed) : S_(S), K_(K) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    probs_.resize(static_cast<std::size_t>(S_));
    next_.resize(static_cast<std::size_t>(S_));
    for (int s = 0; s < S_; ++s) {
      double total = 0.0;
      for (int i = 0; i < K_; ++i) {
        probs_[s].push_back(unif(gen));
        total += probs_[s].back();
        next_[s].push_back(
            static_cast<int>(gen() % static_cast<std::uint64_t>(S_)));
      }
      for (auto& p : probs_[s]) p /= total;
    }
  }
  std::string name() const override { return "table"; }
  Symbol index_count() const override { return K_; }
  IndexDistribution transition(const State& w) const override {
    const int s = std::any_cast<int>(w);
    IndexDistribution d;
    for (int i = 0; i < K_; ++i) d.support.push_back(i + 1);
    d.probs = probs_[static_cast<std::size_t>(s)];
    return d;
  }
  State advance(const State& w, Symbol index) const override {
    const int s = std::any_cast<int>(w);
    return next_[static_cast<std::size_t>(s)]
                [static_cast<std::size_t>(index - 1)];
  }
  std::string encode_state(const State& w) const override {
    return std::to_string(std::any_cast<int>(w));
  }

 private:
  int S_, K_;
  std::vector<std::vector<double>> probs_;
  std::vector<std::vector<int>> next_;
};

// 7. Random systems: urn frequencies against the exact two-step value, the
//    delayed-window identity, and the bitwise chaos-game bridge.
std::pair<bool, std::string> criterion_rscc() {
  bool pass = true;

  UrnRscc urn(UrnScheme{{1, 1}, {1, 0}});
  const auto w0 = urn.initial_state();
  const auto exact = transfer_probability_m(urn, w0, 2, word_set({{1, 1}}));
  pass = pass && exact.exact &&
         std::fabs(exact.value - 1.0 / 3.0) <= 1e-14;

  const int chains = 100000;
  int hits = 0;
  for (int c = 0; c < chains; ++c) {
    const auto tr =
        simulate_chain(urn, w0, 2, 10000 + static_cast<std::uint64_t>(c));
    if (tr.indices[0] == 1 && tr.indices[1] == 1) ++hits;
  }
  const double freq = static_cast<double>(hits) / chains;
  const double sigma = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / chains);
  pass = pass && std::fabs(freq - 1.0 / 3.0) <= 3.0 * sigma;

  // Delayed windows equal plain windows over a lifted word set.
  std::mt19937_64 gen(2024);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int S = 1 + static_cast<int>(gen() % 4);
    const int K = 2 + static_cast<int>(gen() % 2);
    const int n = 1 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 3);
    TableRscc r(S, K, gen());
    const auto A = word_set({std::vector<Symbol>(static_cast<std::size_t>(m),
                                                 1 + Symbol(gen() % K))});
    const IndexWordPredicate lifted = [n, m, &A](const std::vector<Symbol>& w) {
      if (static_cast<int>(w.size()) != n + m - 1) return false;
      return A(std::vector<Symbol>(w.end() - m, w.end()));
    };
    const Rscc::State st =
        static_cast<int>(gen() % static_cast<std::uint64_t>(S));
    const auto delayed = transfer_probability_mn(r, st, n, m, A);
    const auto plain = transfer_probability_m(r, st, n + m - 1, lifted);
    worst_gap =
        std::max(worst_gap, std::fabs(delayed.value - plain.value));
    pass = pass && delayed.exact && plain.exact;
  }
  pass = pass && worst_gap <= 1e-12;

  // The random-map bridge replays the chaos game exactly.
  const auto sys = cantor_system();
  const auto wts = place_dependent_weights();
  auto bridge = ifs_to_rscc(sys, wts);
  const auto tr = simulate_chain(*bridge, bridge->initial_state(), 2000, 11);
  const auto run = chaos_game(sys, wts, 2000, 11, 0, true);
  bool bitwise = tr.indices.size() == run.symbols.size();
  for (std::size_t t = 0; bitwise && t < tr.indices.size(); ++t)
    bitwise = tr.indices[t] == run.symbols[t] &&
              std::any_cast<Point>(tr.states[t]) == run.pre_states[t];
  pass = pass && bitwise;

  return {pass, "urn_freq=" + fmt(freq) + " (3sigma=" + fmt(3.0 * sigma) +
                    ") window_gap=" + fmt(worst_gap) +
                    " bitwise=" + (bitwise ? std::string("yes") : "no")};
}

// 8. Entropy retained by the coding map: full for separated images, null for
//    coincident branches, never above the shift entropy.
std::pair<bool, std::string> criterion_projection_entropy() {
  const auto deltas = RLadder::geometric(0.25, 0.5, 7).radii;
  const auto mu = CylinderMeasure::bernoulli({0.5, 0.5}, 12);
  const double h_sigma = std::log(2.0);

  const auto separated =
      projection_entropy(cantor_system(), mu, deltas, h_sigma);
  IFSSystem collapsed({ConformalMap::affine1d(1.0 / 3.0, 0.0),
                       ConformalMap::affine1d(1.0 / 3.0, 0.0)},
                      Region::interval(0.0, 1.0), 1.0 / 3.0, 1.0 / 3.0);
  const auto coincident = projection_entropy(collapsed, mu, deltas, h_sigma);
  const auto overlapping =
      projection_entropy(dyadic_overlap_system(), mu, deltas, h_sigma);

  const bool pass = std::fabs(separated.estimate - h_sigma) <= 0.03 &&
                    coincident.estimate <= 0.03 &&
                    separated.estimate <= h_sigma + 0.02 &&
                    coincident.estimate <= h_sigma + 0.02 &&
                    overlapping.estimate <= h_sigma + 0.02;
  return {pass, "separated=" + fmt(separated.estimate) +
                    " coincident=" + fmt(coincident.estimate) +
                    " overlapping=" + fmt(overlapping.estimate) +
                    " h_sigma=" + fmt(h_sigma)};
}

// 9. Determinism of the command-line surface: same seed twice, and worker
//    threads 1 vs 8, must produce byte-identical artifacts (the manifest's
//    elapsed-time field is the only sanctioned difference).
int run_cmd(const std::string& cmd) {
  FILE* pipe = popen((cmd + " >/dev/null 2>&1").c_str(), "r");
  if (!pipe) return -1;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe) != nullptr) {
  }
  const int status = pclose(pipe);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool same_outputs(const fs::path& a, const fs::path& b, std::string* why) {
  std::set<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(a))
    names_a.insert(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(b))
    names_b.insert(e.path().filename().string());
  if (names_a != names_b || names_a.empty()) {
    *why = "output listings differ";
    return false;
  }
  for (const auto& name : names_a) {
    if (name == "manifest.json") continue;
    if (slurp(a / name) != slurp(b / name)) {
      *why = name + " differs";
      return false;
    }
  }
  return true;
}

std::pair<bool, std::string> criterion_determinism() {
  const fs::path cli = FRACTALDIM_CLI_PATH;
  const fs::path src = FRACTALDIM_SOURCE_DIR;
  const fs::path base = fs::temp_directory_path() / "fractaldim_accept";
  fs::remove_all(base);
  fs::create_directories(base);

  struct Job {
    std::string tag;
    std::string config;
    std::string args;
  };
  const std::vector<Job> jobs = {
      {"validate", "cantor.json", "validate"},
      {"stationary", "place_dependent.json",
       "stationary --resolution 1024 --steps 100000 --chaos-sample 5000"},
      {"dimension", "cantor.json",
       "dimension --steps 100000 --depth 8 --points 64 --orbit-depth 16"},
      {"unfold", "dyadic_overlap.json", "unfold --s 1.0"},
      {"rscc", "cantor.json",
       "rscc --model urn --chains 20000 --steps 8 --record 3"},
  };

  bool pass = true;
  std::string detail;
  for (const auto& job : jobs) {
    const std::string cfg = (src / "configs" / job.config).string();
    auto invoke = [&](const std::string& tag, int threads) {
      const fs::path out = base / (job.tag + "_" + tag);
      fs::create_directories(out);
      const std::string cmd = cli.string() + " --config " + cfg +
                              " --seed 42 --threads " +
                              std::to_string(threads) + " --out " +
                              out.string() + " " + job.args;
      return std::make_pair(out, run_cmd(cmd));
    };
    const auto [out_a, rc_a] = invoke("a", 1);
    const auto [out_b, rc_b] = invoke("b", 1);
    const auto [out_c, rc_c] = invoke("c", 8);
    std::string why;
    if (rc_a != 0 || rc_b != 0 || rc_c != 0) {
      pass = false;
      detail += job.tag + ": nonzero exit; ";
      continue;
    }
    if (!same_outputs(out_a, out_b, &why)) {
      pass = false;
      detail += job.tag + " rerun: " + why + "; ";
    }
    if (!same_outputs(out_a, out_c, &why)) {
      pass = false;
      detail += job.tag + " threads: " + why + "; ";
    }
  }
  fs::remove_all(base);
  if (detail.empty()) detail = "5 commands x {rerun, threads 1 vs 8}";
  return {pass, detail};
}

}  // namespace

int main() {
  run_criterion(1, "separated system: fixed point, sampler, and dimension formula agree",
                criterion_stationary_agreement);
  run_criterion(2, "place-dependent weights: stationarity residual and dimension bound",
                criterion_place_dependent);
  run_criterion(3, "pressure ladder: flat case, closed form, and bisection root",
                criterion_pressure);
  run_criterion(4, "gibbs property: exact self-consistency and mismatch rejection",
                criterion_gibbs);
  run_criterion(5, "unfolding: minimal indices, fiber separation, derivative decay",
                criterion_unfolding);
  run_criterion(6, "fiber dimension: formula against sampled ball masses",
                criterion_fiber_dimension);
  run_criterion(7, "random systems: urn frequencies, delayed windows, bitwise bridge",
                criterion_rscc);
  run_criterion(8, "projection entropy: separated, coincident, and overlapping images",
                criterion_projection_entropy);
  run_criterion(9, "determinism: byte-identical reruns and thread invariance",
                criterion_determinism);

  if (g_failures == 0) {
    std::printf("all 9 checks passed\n");
    return 0;
  }
  std::printf("%d check(s) failed\n", g_failures);
  return 1;
}
