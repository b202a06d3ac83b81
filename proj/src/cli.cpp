#include "fractaldim/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fractaldim/config.hpp"
#include "fractaldim/dimension.hpp"
#include "fractaldim/errors.hpp"
#include "fractaldim/io.hpp"
#include "fractaldim/measures.hpp"
#include "fractaldim/rng.hpp"
#include "fractaldim/rscc.hpp"
#include "fractaldim/unfolding.hpp"
#include "fractaldim/util.hpp"
#include "fractaldim/weights.hpp"
#include "json.hpp"

namespace fractaldim {

namespace {

using nlohmann::json;

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
  std::string out_dir = "out";
};

struct Loaded {
  SystemConfig cfg;
  std::string text;
  std::uint64_t seed = 0;
};

Loaded load_required(const GlobalOpts& g) {
  if (g.config_path.empty())
    throw ValidationError("--config is required for this command");
  Loaded l;
  l.text = read_file(g.config_path);
  l.cfg = parse_config(l.text);
  l.seed = g.seed_set ? g.seed : l.cfg.seed;
  return l;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

// Collects output files and writes the run manifest (the only file whose
// bytes may differ between otherwise identical runs, via the timing field).
class OutputSink {
 public:
  OutputSink(const GlobalOpts& g, std::string command,
             const std::string& config_text, std::uint64_t seed)
      : dir_(g.out_dir), start_(std::chrono::steady_clock::now()) {
    std::filesystem::create_directories(dir_);
    man_.command = std::move(command);
    man_.config_hash = hex64(fnv1a64(config_text));
    man_.seed = seed;
    man_.threads = g.threads;
    man_.run_id = run_id_of(config_text, seed, man_.command);
  }

  std::string path(const std::string& name) {
    man_.outputs.push_back(name);
    return (std::filesystem::path(dir_) / name).string();
  }

  void finish() {
    man_.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    write_manifest((std::filesystem::path(dir_) / "manifest.json").string(),
                   man_);
  }

 private:
  std::string dir_;
  std::chrono::steady_clock::time_point start_;
  RunManifest man_;
};

std::vector<Symbol> parse_symbols(const std::string& text, const char* what) {
  std::vector<Symbol> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<Symbol>(std::stol(item)));
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": cannot parse symbol \"" +
                            item + "\"");
    }
  }
  if (out.empty())
    throw ValidationError(std::string(what) + ": empty symbol list");
  return out;
}

std::vector<long long> parse_longs(const std::string& text, const char* what) {
  std::vector<long long> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ValidationError(std::string(what) + ": cannot parse \"" + item +
                            "\"");
    }
  }
  return out;
}

std::string join_symbols(const std::vector<Symbol>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(w[i]);
  }
  return s;
}

json point_json(const Point& p) {
  json j;
  j["x"] = p.c[0];
  if (p.dim == 2) j["y"] = p.c[1];
  return j;
}

// ---------------------------------------------------------------------------

struct StationaryOpts {
  int resolution = 4096;
  long long steps = 1000000;
  int burn_in = 1000;
  long long chaos_sample = 10000;
};

void cmd_stationary(const GlobalOpts& g, const StationaryOpts& o,
                    const std::string& command) {
  Loaded l = load_required(g);
  const IFSSystem sys = build_system(l.cfg);
  const WeightSystem w = build_weights(l.cfg);
  OutputSink sink(g, command, l.text, l.seed);

  const StationaryResult st =
      stationary_measure(sys, w, o.resolution, l.cfg.tol_stationary_tv);
  const ChaosGameRun run = chaos_game(sys, w, o.steps, l.seed, o.burn_in);
  const double ks = ks_distance(st.measure, run.measure);

  if (sys.domain().dim == 1) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(st.measure.bins());
    for (std::size_t b = 0; b < st.measure.bins(); ++b)
      rows.push_back({std::to_string(b),
                      format_double(st.measure.bin_center(b).c[0]),
                      format_double(st.measure.mass(b))});
    write_csv(sink.path("measure_grid.csv"), {"bin", "center", "mass"}, rows);
  } else {
    write_pgm(sink.path("measure_grid.pgm"), st.measure);
  }

  {
    std::vector<std::string> lines;
    const std::size_t n = run.measure.points.size();
    const std::size_t stride = std::max<std::size_t>(
        1, n / static_cast<std::size_t>(std::max<long long>(o.chaos_sample, 1)));
    for (std::size_t k = 0; k < n; k += stride) {
      json j = point_json(run.measure.points[k]);
      j["n"] = static_cast<long long>(k) + o.burn_in;
      lines.push_back(j.dump());
    }
    write_json_lines(sink.path("chaos_points.jsonl"), lines);
  }

  {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(st.tv_history.size());
    for (std::size_t i = 0; i < st.tv_history.size(); ++i)
      rows.push_back({std::to_string(i + 1), format_double(st.tv_history[i])});
    write_csv(sink.path("convergence.csv"), {"iteration", "tv_increment"},
              rows);
  }

  json summary;
  summary["attract_gap"] = st.attract_gap;
  summary["attractive"] = st.attractive;
  summary["burn_in"] = o.burn_in;
  summary["converged"] = st.converged;
  summary["iterations"] = st.iterations;
  summary["ks_distance"] = ks;
  summary["mass_leak_max"] = st.mass_leak_max;
  summary["mean"] = st.measure.mean_1d();
  summary["resolution"] = o.resolution;
  summary["seed"] = l.seed;
  summary["steps"] = o.steps;
  summary["tail_clamps"] = run.tail_clamps;
  summary["tv_last"] = st.tv_last;
  write_file(sink.path("summary.json"), summary.dump(2) + "\n");
  sink.finish();
}

// ---------------------------------------------------------------------------

struct DimensionOpts {
  long long steps = 1000000;
  int burn_in = 1000;
  int depth = 10;
  int points = 256;
  int orbit_depth = 24;
};

void cmd_dimension(const GlobalOpts& g, const DimensionOpts& o,
                   const std::string& command) {
  Loaded l = load_required(g);
  const IFSSystem sys = build_system(l.cfg);
  const WeightSystem w = build_weights(l.cfg);
  OutputSink sink(g, command, l.text, l.seed);

  const ChaosGameRun run =
      chaos_game(sys, w, o.steps, l.seed, o.burn_in, /*record_path=*/true);

  const DimensionReport rep =
      exact_dimensionality_orbit(sys, w, run, o.points, o.orbit_depth, l.seed);

  std::vector<Symbol> syms(run.symbols.begin() + o.burn_in, run.symbols.end());
  const CylinderMeasure mu = empirical_cylinders(syms, sys.alphabet(), o.depth);
  const double h_sigma = entropy_estimate(mu).h;
  const LyapunovReport lyap = lyapunov_trajectory(sys, run);

  const double diam = sys.domain().diam();
  const RLadder deltas = RLadder::geometric(diam / 4.0, 0.5, 8);
  const ProjectionEntropyResult pe =
      projection_entropy(sys, mu, deltas.radii, h_sigma);
  const double formula = dimension_formula(pe.estimate, lyap.chi);

  {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(rep.locals.size());
    for (std::size_t i = 0; i < rep.locals.size(); ++i) {
      const LocalDim& d = rep.locals[i];
      rows.push_back({std::to_string(i), format_double(d.at.c[0]),
                      format_double(d.dim), format_double(d.r2),
                      std::to_string(d.radii_used)});
    }
    write_csv(sink.path("local_dims.csv"),
              {"index", "x", "dimension", "r2", "depths_used"}, rows);
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < pe.deltas.size(); ++i)
      rows.push_back(
          {format_double(pe.deltas[i]), format_double(pe.values[i])});
    write_csv(sink.path("hs_ladder.csv"), {"delta", "h_projection"}, rows);
  }

  json out;
  out["chi"] = lyap.chi;
  out["chi_std_error"] = lyap.std_error;
  out["cylinder_depth"] = o.depth;
  out["formula_dim"] = formula;
  out["h_projection"] = pe.estimate;
  out["h_projection_clamped"] = pe.clamped;
  out["h_sigma"] = h_sigma;
  // Overlaps that collapse distinct symbols leave the projected entropy
  // strictly below the symbolic one; flag gaps beyond estimator noise.
  out["hs_collapsed"] = pe.estimate < h_sigma - 0.05;
  out["mean_local_dim"] = rep.mean;
  out["median_r2"] = rep.median_r2;
  out["points"] = o.points;
  out["seed"] = l.seed;
  out["std_local_dim"] = rep.stddev;
  write_file(sink.path("dimension.json"), out.dump(2) + "\n");
  sink.finish();
}

// ---------------------------------------------------------------------------

struct UnfoldOpts {
  std::string omega = "1";
  int K = 0;
  double s = 0.5;
  int depth = 8;
  int fiber_depth = 10;
  long long fiber_points = 1024;
  int n_max = 1000;
};

void cmd_unfold(const GlobalOpts& g, const UnfoldOpts& o,
                const std::string& command) {
  Loaded l = load_required(g);
  const IFSSystem sys = build_system(l.cfg);
  OutputSink sink(g, command, l.text, l.seed);

  const MaximalSmaleSystem smale(sys, o.K, o.n_max, tail_region_of(l.cfg));
  const SequenceOneSided omega = SequenceOneSided::periodic(
      parse_symbols(o.omega, "--omega"), sys.alphabet());

  const UnfoldIndices idx = smale.indices_for(omega);
  const bool osc = verify_fiber_osc(smale, omega);

  {
    json j;
    j["n"] = idx.n;
    j["omega_prefix"] = idx.omega_prefix.symbols;
    j["tail_verified"] = idx.tail_verified;
    j["fiber_osc"] = osc;
    write_file(sink.path("unfold_indices.json"), j.dump(2) + "\n");
  }

  {
    const FiberFractalSample cloud = fiber_fractal_sample(
        smale, omega, o.fiber_depth, o.fiber_points, l.seed);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(cloud.points.size());
    for (std::size_t i = 0; i < cloud.points.size(); ++i) {
      std::vector<std::string> row{join_symbols(cloud.words[i]),
                                   format_double(cloud.points[i].c[0])};
      if (sys.domain().dim == 2)
        row.push_back(format_double(cloud.points[i].c[1]));
      row.push_back(format_double(cloud.radii[i]));
      rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"word", "x"};
    if (sys.domain().dim == 2) header.push_back("y");
    header.push_back("radius");
    write_csv(sink.path("fiber_points.csv"), header, rows);
  }

  const Potential psi = psi_s_potential(smale, o.s);
  {
    const SummabilityReport summ = check_summability(psi, smale.K());
    json j;
    j["pass"] = summ.pass;
    j["tail"] = summ.tail;
    j["value"] = summ.value;
    j["partial_sums"] = summ.partial;
    std::vector<double> bound;
    double acc = 0.0;
    for (std::size_t i = 1; i <= summ.partial.size(); ++i) {
      acc += std::pow(sys.deriv_bound(), o.s * static_cast<double>(i));
      bound.push_back(acc);
    }
    j["geometric_bound"] = bound;
    write_file(sink.path("summability.json"), j.dump(2) + "\n");
  }

  {
    const FiberDimensionReport fd = fiber_dimension(
        smale, o.s, o.depth, omega, kDefaultEvalDepth, {}, g.threads);
    json j;
    j["chi_fiber"] = fd.chi_fiber;
    j["depth"] = fd.depth;
    j["entropy"] = fd.entropy;
    j["gibbs_c_max"] = fd.gibbs.c_max;
    j["gibbs_c_min"] = fd.gibbs.c_min;
    j["gibbs_pass"] = fd.gibbs.pass;
    j["gibbs_slope"] = fd.gibbs.slope;
    j["hd"] = fd.hd;
    j["local_mean"] = fd.local_check.mean;
    j["local_median_r2"] = fd.local_check.median_r2;
    j["local_std"] = fd.local_check.stddev;
    j["pressure"] = fd.pressure_value;
    j["s"] = fd.s;
    write_file(sink.path("fiber_dimension.json"), j.dump(2) + "\n");
  }
  sink.finish();
}

// ---------------------------------------------------------------------------

struct RsccOpts {
  std::string model = "urn";
  std::string urn_counts = "1,1";
  std::string urn_replacement = "1,0";
  long long chains = 100000;
  long long steps = 10;
  int record = 5;
  int n = 1;
  std::vector<std::string> words;
  // smale model
  std::string omega = "1";
  int K = 0;
  double s = 0.5;
  int past_depth = 3;
  int given = 3;
  int n_max = 1000;
};

void cmd_rscc(const GlobalOpts& g, const RsccOpts& o,
              const std::string& command) {
  std::shared_ptr<Rscc> r;
  Rscc::State w0;
  std::string text;
  std::uint64_t seed = g.seed_set ? g.seed : 1;
  std::optional<MaximalSmaleSystem> smale;  // kept alive for the cross-check

  if (o.model == "urn") {
    UrnScheme scheme{parse_longs(o.urn_counts, "--urn-counts"),
                     parse_longs(o.urn_replacement, "--urn-replacement")};
    auto urn = make_urn(std::move(scheme));
    w0 = urn->initial_state();
    r = std::move(urn);
    text = "urn:" + o.urn_counts + ";" + o.urn_replacement;
  } else if (o.model == "ifs") {
    Loaded l = load_required(g);
    seed = l.seed;
    text = l.text;
    auto ifs = ifs_to_rscc(build_system(l.cfg), build_weights(l.cfg));
    w0 = ifs->initial_state();
    r = std::move(ifs);
  } else if (o.model == "smale") {
    Loaded l = load_required(g);
    seed = l.seed;
    text = l.text;
    const IFSSystem sys = build_system(l.cfg);
    smale.emplace(sys, o.K, o.n_max, tail_region_of(l.cfg));
    const Potential psi = psi_s_potential(*smale, o.s);
    const int depth = o.past_depth + o.given;
    const PressureResult pres = pressure(psi, smale->K(), depth,
                                         kDefaultEvalDepth, {}, g.threads);
    const CylinderMeasure mu0 =
        gibbs_approximation(psi, pres.value, smale->K(), depth);
    CylinderMeasure mu(-o.past_depth, smale->K());
    for (int L = 1; L <= mu0.deepest(); ++L)
      for (const auto& [word, wgt] : mu0.level(L)) mu.set_weight(L, word, wgt);
    auto bridge = smale_to_rscc(*smale, std::move(mu));
    const SequenceOneSided omega = SequenceOneSided::periodic(
        parse_symbols(o.omega, "--omega"), sys.alphabet());
    w0 = bridge->make_state(omega, sys.domain().center());
    r = std::move(bridge);
  } else {
    throw ValidationError("--model must be urn, ifs, or smale");
  }

  OutputSink sink(g, command, text, seed);

  // Word set A for the frequency table.
  std::vector<std::vector<Symbol>> words;
  if (o.words.empty()) {
    words.push_back({1, 1});
  } else {
    for (const auto& ws : o.words)
      words.push_back(parse_symbols(ws, "--word"));
  }
  const int m = static_cast<int>(words.front().size());
  for (const auto& wd : words)
    if (static_cast<int>(wd.size()) != m)
      throw ValidationError("--word entries must share one length");

  {
    std::vector<std::string> lines;
    for (int c = 0; c < o.record; ++c) {
      const std::uint64_t chain_seed = rng::at(seed, 10, c);
      const ChainTrajectory traj = simulate_chain(*r, w0, o.steps, chain_seed);
      for (long long t = 1; t <= o.steps; ++t) {
        json j;
        j["chain"] = c;
        j["n"] = t;
        j["index"] = traj.indices[static_cast<std::size_t>(t - 1)];
        j["state"] =
            r->encode_state(traj.states[static_cast<std::size_t>(t)]);
        lines.push_back(j.dump());
      }
    }
    write_json_lines(sink.path("trajectories.jsonl"), lines);
  }

  {
    const TransferProbability exact =
        transfer_probability_mn(*r, w0, o.n, m, word_set(words));
    const long long T = o.n + m - 1;
    long long hits = 0;
    std::vector<Symbol> window(static_cast<std::size_t>(m));
    for (long long c = 0; c < o.chains; ++c) {
      const std::uint64_t chain_seed =
          rng::at(seed, 10, static_cast<std::uint64_t>(c));
      const ChainTrajectory traj = simulate_chain(*r, w0, T, chain_seed);
      std::copy(traj.indices.begin() + (o.n - 1), traj.indices.end(),
                window.begin());
      bool in = false;
      for (const auto& wd : words)
        if (wd == window) {
          in = true;
          break;
        }
      if (in) ++hits;
    }
    const double emp =
        static_cast<double>(hits) / static_cast<double>(o.chains);
    const double sigma = std::sqrt(
        std::max(exact.value * (1.0 - exact.value), 1e-300) /
        static_cast<double>(o.chains));
    const double z = (emp - exact.value) / sigma;
    std::string wtxt;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i) wtxt += ' ';
      wtxt += join_symbols(words[i]);
    }
    std::vector<std::vector<std::string>> rows{
        {std::to_string(o.n), std::to_string(m), wtxt,
         format_double(exact.value), exact.exact ? "1" : "0",
         format_double(exact.ci95), format_double(emp), format_double(sigma),
         format_double(z), std::abs(z) <= 3.0 ? "1" : "0"}};
    write_csv(sink.path("frequency.csv"),
              {"n", "m", "words", "exact", "exact_is_exact", "ci95",
               "empirical", "sigma", "z", "pass"},
              rows);
  }

  if (o.model == "smale") {
    // Cross-check the update map against directly composed fiber branches.
    auto* sr = dynamic_cast<SmaleRscc*>(r.get());
    const std::optional<Region> tail = tail_region_of(parse_config(text));
    std::vector<std::vector<std::string>> rows;
    Rscc::State cur = w0;
    bool all_ok = true;
    for (long long t = 0; t < std::min<long long>(o.steps, 16); ++t) {
      const SmaleState& s0 = *std::any_cast<SmaleState>(&cur);
      const Symbol head = s0.omega.at(0);
      const FiberMap direct = fiber_map(sr->smale().base(), s0.omega.shifted(),
                                        head, o.n_max, tail);
      const double expect = direct.map.eval(s0.x).c[0];
      cur = r->advance(cur, 1);
      const SmaleState& s1 = *std::any_cast<SmaleState>(&cur);
      const bool ok = s1.x.c[0] == expect;
      all_ok = all_ok && ok;
      rows.push_back({std::to_string(t), format_double(s0.x.c[0]),
                      format_double(s1.x.c[0]), format_double(expect),
                      ok ? "1" : "0"});
    }
    write_csv(sink.path("u_consistency.csv"),
              {"step", "x", "updated", "direct", "match"}, rows);
    if (!all_ok)
      throw NoConvergence("skew-product update disagrees with fiber maps");
  }
  sink.finish();
}

// ---------------------------------------------------------------------------

void cmd_validate(const GlobalOpts& g, const std::string& command) {
  Loaded l = load_required(g);
  const IFSSystem sys = build_system(l.cfg);
  const WeightSystem w = build_weights(l.cfg);
  if (w.count() != sys.alphabet())
    throw ValidationError("weight count does not match the map family");
  w.validate_on(sys.domain());
  OutputSink sink(g, command, l.text, l.seed);

  const BdpEstimate bdp = check_bdp(sys);
  const Point center = sys.domain().center();
  const bool nonacc =
      check_non_accumulation(sys, center, l.cfg.tol_separation);

  json j;
  j["alphabet"] = sys.alphabet();
  j["bdp_H_declared"] = sys.bdp().H;
  j["bdp_H_empirical"] = bdp.H_emp;
  j["bdp_pass"] = bdp.pass;
  j["dim"] = sys.domain().dim;
  j["image_gap"] = image_set_gap(sys);
  j["images_strongly_separated"] = images_strongly_separated(sys);
  j["min_image_separation_center"] = min_image_separation(sys, center);
  j["non_accumulation"] = nonacc;
  j["weights_ok"] = true;
  write_file(sink.path("validation.json"), j.dump(2) + "\n");
  sink.finish();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  GlobalOpts g;
  StationaryOpts so;
  DimensionOpts do_;
  UnfoldOpts uo;
  RsccOpts ro;

  std::string command;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) command += ' ';
    command += argv[i];
  }

  CLI::App app{"Stationary measures, dimension theory, and skew-product "
               "unfolding for contracting map systems"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", g.config_path, "System definition (JSON)");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed (overrides config)");
  app.add_option("--threads", g.threads, "Worker threads for cylinder sums")
      ->check(CLI::Range(1, 256));
  app.add_option("--out", g.out_dir, "Output directory");

  CLI::App* st = app.add_subcommand(
      "stationary", "Grid fixed point of the transfer adjoint + chaos game");
  st->add_option("--resolution", so.resolution, "Grid bins per axis")
      ->check(CLI::Range(2, 1 << 20));
  st->add_option("--steps", so.steps, "Chaos game steps");
  st->add_option("--burn-in", so.burn_in, "Discarded leading steps");
  st->add_option("--chaos-sample", so.chaos_sample,
                 "Max chaos-game points written to JSON lines");

  CLI::App* dm = app.add_subcommand(
      "dimension", "Local dimension, entropies, Lyapunov exponent, formula");
  dm->add_option("--steps", do_.steps, "Chaos game steps");
  dm->add_option("--burn-in", do_.burn_in, "Discarded leading steps");
  dm->add_option("--depth", do_.depth, "Cylinder depth for entropies");
  dm->add_option("--points", do_.points, "Local-dimension sample points");
  dm->add_option("--orbit-depth", do_.orbit_depth,
                 "Coding depth for local-dimension regression");

  CLI::App* un = app.add_subcommand(
      "unfold", "Image-separating word indices, fiber fractal, dimension");
  un->add_option("--omega", uo.omega, "Base itinerary period, e.g. 1 or 1,2");
  un->add_option("--K", uo.K, "Fiber symbols (0 = full alphabet)");
  un->add_option("--s", uo.s, "Exponent of the geometric fiber potential");
  un->add_option("--depth", uo.depth, "Cylinder depth for fiber dimension");
  un->add_option("--fiber-depth", uo.fiber_depth, "Past depth of the cloud");
  un->add_option("--fiber-points", uo.fiber_points, "Cloud size cap");
  un->add_option("--nmax", uo.n_max, "Separation scan limit");

  CLI::App* rs = app.add_subcommand(
      "rscc", "Chains with complete connections: simulation + transfer laws");
  rs->add_option("--model", ro.model, "urn | ifs | smale");
  rs->add_option("--urn-counts", ro.urn_counts, "Initial ball counts");
  rs->add_option("--urn-replacement", ro.urn_replacement,
                 "Balls added per drawn color");
  rs->add_option("--chains", ro.chains, "Chains for the frequency check");
  rs->add_option("--steps", ro.steps, "Steps per recorded trajectory");
  rs->add_option("--record", ro.record, "Trajectories written to JSON lines");
  rs->add_option("--n", ro.n, "Start step of the checked window");
  rs->add_option("--word", ro.words,
                 "Index word of the target set (repeatable)");
  rs->add_option("--omega", ro.omega, "Base itinerary period (smale)");
  rs->add_option("--K", ro.K, "Fiber symbols (smale, 0 = full alphabet)");
  rs->add_option("--s", ro.s, "Fiber potential exponent (smale)");
  rs->add_option("--past-depth", ro.past_depth, "Drawn past-word length");
  rs->add_option("--given", ro.given, "Conditioned future-word length");
  rs->add_option("--nmax", ro.n_max, "Separation scan limit (smale)");

  CLI::App* va = app.add_subcommand(
      "validate", "Parse the config and check the declared constants");
  (void)va;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (st->parsed()) cmd_stationary(g, so, command);
    if (dm->parsed()) cmd_dimension(g, do_, command);
    if (un->parsed()) cmd_unfold(g, uo, command);
    if (rs->parsed()) cmd_rscc(g, ro, command);
    if (va->parsed()) cmd_validate(g, command);
  } catch (const CombinatorialBlowup& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 4;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace fractaldim
