#include "fractaldim/config.hpp"

#include <fstream>
#include <sstream>

#include "fractaldim/errors.hpp"
#include "fractaldim/expr.hpp"
#include "json.hpp"

namespace fractaldim {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const json& require(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(std::string("config: missing \"") + key + "\" in " +
                          where);
  return *it;
}

double num(const json& j, const char* key, const char* where) {
  const json& v = require(j, key, where);
  if (!v.is_number())
    throw ValidationError(std::string("config: \"") + key + "\" in " + where +
                          " must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number())
    throw ValidationError(std::string("config: \"") + key +
                          "\" must be a number");
  return it->get<double>();
}

bool flag_or(const json& j, const char* key, bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean())
    throw ValidationError(std::string("config: \"") + key +
                          "\" must be a boolean");
  return it->get<bool>();
}

std::string text_of(const json& j, const char* key, const char* where) {
  const json& v = require(j, key, where);
  if (!v.is_string())
    throw ValidationError(std::string("config: \"") + key + "\" in " + where +
                          " must be a string");
  return v.get<std::string>();
}

std::vector<double> coords(const json& j, const char* key, const char* where,
                           int dim) {
  const json& v = require(j, key, where);
  if (!v.is_array() || static_cast<int>(v.size()) != dim)
    throw ValidationError(std::string("config: \"") + key + "\" in " + where +
                          " must be an array of " + std::to_string(dim) +
                          " numbers");
  std::vector<double> out;
  for (const auto& c : v) {
    if (!c.is_number())
      throw ValidationError(std::string("config: \"") + key + "\" in " +
                            where + " must contain numbers");
    out.push_back(c.get<double>());
  }
  return out;
}

MapConfig parse_map(const json& j, int index) {
  const std::string where = "maps[" + std::to_string(index) + "]";
  MapConfig m;
  m.kind = text_of(j, "kind", where.c_str());
  if (m.kind == "affine") {
    m.a = num(j, "a", where.c_str());
    m.b = num(j, "b", where.c_str());
  } else if (m.kind == "moebius_branch") {
    const json& v = require(j, "n", where.c_str());
    if (!v.is_number_integer())
      throw ValidationError("config: \"n\" in " + where +
                            " must be an integer");
    m.n = v.get<int>();
  } else if (m.kind == "expression") {
    m.formula = text_of(j, "formula", where.c_str());
    if (j.contains("derivative"))
      m.derivative = text_of(j, "derivative", where.c_str());
  } else if (m.kind == "similarity") {
    m.a_re = num(j, "a_re", where.c_str());
    m.a_im = num(j, "a_im", where.c_str());
    m.b_re = num(j, "b_re", where.c_str());
    m.b_im = num(j, "b_im", where.c_str());
  } else {
    throw ValidationError("config: unknown map kind \"" + m.kind + "\" in " +
                          where);
  }
  return m;
}

WeightConfig parse_weight(const json& j, int index) {
  const std::string where = "weights.entries[" + std::to_string(index) + "]";
  WeightConfig w;
  w.kind = text_of(j, "kind", where.c_str());
  if (w.kind == "constant") {
    w.value = num(j, "value", where.c_str());
  } else if (w.kind == "affine") {
    w.a = num(j, "a", where.c_str());
    w.b = num(j, "b", where.c_str());
  } else if (w.kind == "expression") {
    w.formula = text_of(j, "formula", where.c_str());
  } else {
    throw ValidationError("config: unknown weight kind \"" + w.kind +
                          "\" in " + where);
  }
  return w;
}

json map_to_json(const MapConfig& m) {
  json j;
  j["kind"] = m.kind;
  if (m.kind == "affine") {
    j["a"] = m.a;
    j["b"] = m.b;
  } else if (m.kind == "moebius_branch") {
    j["n"] = m.n;
  } else if (m.kind == "expression") {
    j["formula"] = m.formula;
    if (!m.derivative.empty()) j["derivative"] = m.derivative;
  } else if (m.kind == "similarity") {
    j["a_re"] = m.a_re;
    j["a_im"] = m.a_im;
    j["b_re"] = m.b_re;
    j["b_im"] = m.b_im;
  }
  return j;
}

json weight_to_json(const WeightConfig& w) {
  json j;
  j["kind"] = w.kind;
  if (w.kind == "constant") {
    j["value"] = w.value;
  } else if (w.kind == "affine") {
    j["a"] = w.a;
    j["b"] = w.b;
  } else if (w.kind == "expression") {
    j["formula"] = w.formula;
  }
  return j;
}

}  // namespace

SystemConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config parse error at line " +
                          std::to_string(line_of_offset(text, e.byte)) + ": " +
                          e.what());
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object");

  SystemConfig cfg;
  if (j.contains("name")) cfg.name = text_of(j, "name", "config");

  const json& dom = require(j, "domain", "config");
  {
    const json& d = require(dom, "dim", "domain");
    if (!d.is_number_integer())
      throw ValidationError("config: \"dim\" must be an integer");
    cfg.dim = d.get<int>();
  }
  if (cfg.dim != 1 && cfg.dim != 2)
    throw ValidationError("config: domain dim must be 1 or 2");
  cfg.lo = coords(dom, "lo", "domain", cfg.dim);
  cfg.hi = coords(dom, "hi", "domain", cfg.dim);
  for (int d = 0; d < cfg.dim; ++d)
    if (!(cfg.lo[static_cast<std::size_t>(d)] <
          cfg.hi[static_cast<std::size_t>(d)]))
      throw ValidationError("config: domain lo must be strictly below hi");

  const json& maps = require(j, "maps", "config");
  if (!maps.is_array() || maps.size() < 2)
    throw ValidationError("config: \"maps\" must list at least two maps");
  for (std::size_t i = 0; i < maps.size(); ++i)
    cfg.maps.push_back(parse_map(maps[i], static_cast<int>(i)));

  const json& weights = require(j, "weights", "config");
  const json& entries = require(weights, "entries", "weights");
  if (!entries.is_array() || entries.empty())
    throw ValidationError("config: \"weights.entries\" must be a list");
  for (std::size_t i = 0; i < entries.size(); ++i)
    cfg.weights.push_back(parse_weight(entries[i], static_cast<int>(i)));
  cfg.tail_mass_bound = num_or(weights, "tail_mass_bound", 0.0);
  if (cfg.tail_mass_bound < 0.0)
    throw ValidationError("config: tail_mass_bound must be >= 0");
  if (weights.contains("holder")) {
    const json& h = weights["holder"];
    cfg.holder_C = num(h, "C", "weights.holder");
    cfg.holder_alpha = num(h, "alpha", "weights.holder");
    if (cfg.holder_C < 0.0)
      throw ValidationError("config: weights.holder.C must be >= 0");
    if (!(cfg.holder_alpha > 0.0 && cfg.holder_alpha <= 1.0))
      throw ValidationError("config: weights.holder.alpha must be in (0,1]");
  }

  const json& consts = require(j, "constants", "config");
  cfg.s = num(consts, "s", "constants");
  cfg.alpha = num(consts, "alpha", "constants");
  if (!(cfg.s > 0.0 && cfg.s < 1.0))
    throw ValidationError("config: constants.s must be in (0,1)");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ValidationError("config: constants.alpha must be in (0,1)");
  if (consts.contains("bdp")) {
    const json& b = consts["bdp"];
    cfg.bdp_H = num(b, "H", "constants.bdp");
    cfg.bdp_beta = num(b, "beta", "constants.bdp");
    if (cfg.bdp_H < 0.0)
      throw ValidationError("config: constants.bdp.H must be >= 0");
    if (!(cfg.bdp_beta > 0.0 && cfg.bdp_beta <= 1.0))
      throw ValidationError("config: constants.bdp.beta must be in (0,1]");
  }
  cfg.countable_tail = flag_or(consts, "countable_tail", false);
  cfg.tail_separation_certified =
      flag_or(consts, "tail_separation_certified", false);

  if (j.contains("tail_region")) {
    cfg.has_tail_region = true;
    cfg.tail_lo = coords(j["tail_region"], "lo", "tail_region", cfg.dim);
    cfg.tail_hi = coords(j["tail_region"], "hi", "tail_region", cfg.dim);
  }

  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_unsigned() && !s.is_number_integer())
      throw ValidationError("config: \"seed\" must be an integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    cfg.tol_code_point = num_or(t, "code_point", cfg.tol_code_point);
    cfg.tol_separation = num_or(t, "separation", cfg.tol_separation);
    cfg.tol_stationary_tv = num_or(t, "stationary_tv", cfg.tol_stationary_tv);
    for (double v : {cfg.tol_code_point, cfg.tol_separation,
                     cfg.tol_stationary_tv})
      if (!(v > 0.0))
        throw ValidationError("config: tolerances must be positive");
  }

  if (cfg.weights.size() != cfg.maps.size())
    throw ValidationError(
        "config: weights.entries must match maps one for one (" +
        std::to_string(cfg.weights.size()) + " weights for " +
        std::to_string(cfg.maps.size()) + " maps)");
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string emit_config(const SystemConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["domain"] = {{"dim", cfg.dim}, {"lo", cfg.lo}, {"hi", cfg.hi}};
  json maps = json::array();
  for (const auto& m : cfg.maps) maps.push_back(map_to_json(m));
  j["maps"] = maps;
  json entries = json::array();
  for (const auto& w : cfg.weights) entries.push_back(weight_to_json(w));
  j["weights"] = {{"entries", entries},
                  {"tail_mass_bound", cfg.tail_mass_bound},
                  {"holder", {{"C", cfg.holder_C}, {"alpha", cfg.holder_alpha}}}};
  j["constants"] = {
      {"s", cfg.s},
      {"alpha", cfg.alpha},
      {"bdp", {{"H", cfg.bdp_H}, {"beta", cfg.bdp_beta}}},
      {"countable_tail", cfg.countable_tail},
      {"tail_separation_certified", cfg.tail_separation_certified}};
  if (cfg.has_tail_region)
    j["tail_region"] = {{"lo", cfg.tail_lo}, {"hi", cfg.tail_hi}};
  j["seed"] = cfg.seed;
  j["tolerances"] = {{"code_point", cfg.tol_code_point},
                     {"separation", cfg.tol_separation},
                     {"stationary_tv", cfg.tol_stationary_tv}};
  return j.dump(2) + "\n";
}

IFSSystem build_system(const SystemConfig& cfg) {
  Region V = cfg.dim == 1 ? Region::interval(cfg.lo[0], cfg.hi[0])
                          : Region::box(cfg.lo[0], cfg.lo[1], cfg.hi[0],
                                        cfg.hi[1]);
  std::vector<ConformalMap> maps;
  for (std::size_t i = 0; i < cfg.maps.size(); ++i) {
    const MapConfig& m = cfg.maps[i];
    const std::string where = "maps[" + std::to_string(i) + "]";
    if (m.kind == "affine") {
      if (cfg.dim != 1)
        throw ValidationError("config: affine maps need a 1D domain (" +
                              where + ")");
      maps.push_back(ConformalMap::affine1d(m.a, m.b));
    } else if (m.kind == "moebius_branch") {
      if (cfg.dim != 1)
        throw ValidationError("config: moebius_branch needs a 1D domain (" +
                              where + ")");
      maps.push_back(ConformalMap::moebius_branch(m.n));
    } else if (m.kind == "expression") {
      if (cfg.dim != 1)
        throw ValidationError("config: expression maps need a 1D domain (" +
                              where + ")");
      Expr f;
      try {
        f = Expr::parse(m.formula);
      } catch (const Error& e) {
        throw ValidationError("config: bad formula in " + where + ": " +
                              e.what());
      }
      std::optional<Expr> df;
      if (!m.derivative.empty()) {
        try {
          df = Expr::parse(m.derivative);
        } catch (const Error& e) {
          throw ValidationError("config: bad derivative in " + where + ": " +
                                e.what());
        }
      }
      maps.push_back(ConformalMap::expression1d(std::move(f), std::move(df)));
    } else if (m.kind == "similarity") {
      if (cfg.dim != 2)
        throw ValidationError("config: similarity maps need a 2D domain (" +
                              where + ")");
      maps.push_back(ConformalMap::similarity2d(m.a_re, m.a_im, m.b_re,
                                                m.b_im));
    } else {
      throw ValidationError("config: unknown map kind \"" + m.kind + "\"");
    }
  }
  return IFSSystem(std::move(maps), V, cfg.s, cfg.alpha,
                   BdpConstants{cfg.bdp_H, cfg.bdp_beta}, cfg.countable_tail,
                   cfg.tail_separation_certified);
}

WeightSystem build_weights(const SystemConfig& cfg) {
  std::vector<WeightFn> fns;
  for (std::size_t i = 0; i < cfg.weights.size(); ++i) {
    const WeightConfig& w = cfg.weights[i];
    if (w.kind == "constant") {
      fns.push_back(WeightFn::constant(w.value));
    } else if (w.kind == "affine") {
      fns.push_back(WeightFn::affine(w.a, w.b));
    } else if (w.kind == "expression") {
      try {
        fns.push_back(WeightFn::expression(Expr::parse(w.formula)));
      } catch (const Error& e) {
        throw ValidationError("config: bad weight formula in entry " +
                              std::to_string(i) + ": " + e.what());
      }
    } else {
      throw ValidationError("config: unknown weight kind \"" + w.kind + "\"");
    }
  }
  return WeightSystem(std::move(fns), cfg.tail_mass_bound,
                      HolderConstants{cfg.holder_C, cfg.holder_alpha});
}

std::optional<Region> tail_region_of(const SystemConfig& cfg) {
  if (!cfg.has_tail_region) return std::nullopt;
  if (cfg.dim == 1) return Region::interval(cfg.tail_lo[0], cfg.tail_hi[0]);
  return Region::box(cfg.tail_lo[0], cfg.tail_lo[1], cfg.tail_hi[0],
                     cfg.tail_hi[1]);
}

}  // namespace fractaldim
