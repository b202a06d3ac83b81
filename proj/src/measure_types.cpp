#include "fractaldim/measure_types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fractaldim {

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

GridMeasure::GridMeasure(Region region, int resolution)
    : region_(region), resolution_(resolution) {
  if (!is_power_of_two(resolution))
    throw ValidationError("grid resolution must be a power of two");
  const std::size_t n = region.dim == 1
                            ? static_cast<std::size_t>(resolution)
                            : static_cast<std::size_t>(resolution) *
                                  static_cast<std::size_t>(resolution);
  mass_.assign(n, 0.0);
}

GridMeasure GridMeasure::uniform(Region region, int resolution) {
  GridMeasure g(region, resolution);
  const double w = 1.0 / static_cast<double>(g.mass_.size());
  std::fill(g.mass_.begin(), g.mass_.end(), w);
  return g;
}

GridMeasure GridMeasure::point_mass(Region region, int resolution,
                                    const Point& p) {
  GridMeasure g(region, resolution);
  g.mass_[g.bin_of(p)] = 1.0;
  return g;
}

std::size_t GridMeasure::bin_of(const Point& p) const {
  auto axis_bin = [&](int a) {
    double t = (p.c[a] - region_.lo[a]) / region_.width(a);
    int idx = static_cast<int>(t * resolution_);
    return static_cast<std::size_t>(std::clamp(idx, 0, resolution_ - 1));
  };
  if (region_.dim == 1) return axis_bin(0);
  return axis_bin(1) * static_cast<std::size_t>(resolution_) + axis_bin(0);
}

Point GridMeasure::bin_center(std::size_t idx) const {
  if (region_.dim == 1)
    return Point::d1(region_.lo[0] + (static_cast<double>(idx) + 0.5) *
                                         bin_width(0));
  const std::size_t iy = idx / static_cast<std::size_t>(resolution_);
  const std::size_t ix = idx % static_cast<std::size_t>(resolution_);
  return Point::d2(
      region_.lo[0] + (static_cast<double>(ix) + 0.5) * bin_width(0),
      region_.lo[1] + (static_cast<double>(iy) + 0.5) * bin_width(1));
}

double GridMeasure::total() const {
  double t = 0.0;
  for (double m : mass_) t += m;
  return t;
}

void GridMeasure::normalize() {
  const double t = total();
  if (t <= 0.0) throw ValidationError("normalizing a zero measure");
  for (double& m : mass_) m /= t;
}

double GridMeasure::mean_1d() const {
  if (region_.dim != 1) throw ValidationError("mean_1d on a 2D measure");
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i)
    s += mass_[i] * bin_center(i).c[0];
  return s;
}

double GridMeasure::ball_mass(const Point& x, double r) const {
  if (region_.dim == 1) {
    // Integrate the piecewise-constant density over [x-r, x+r].
    const double w = bin_width(0);
    const double a = x.c[0] - r, b = x.c[0] + r;
    double s = 0.0;
    const int i0 = std::max(
        0, static_cast<int>(std::floor((a - region_.lo[0]) / w)));
    const int i1 = std::min(
        resolution_ - 1,
        static_cast<int>(std::floor((b - region_.lo[0]) / w)));
    for (int i = i0; i <= i1; ++i) {
      const double blo = region_.lo[0] + i * w;
      const double bhi = blo + w;
      const double overlap =
          std::min(b, bhi) - std::max(a, blo);
      if (overlap > 0.0)
        s += mass_[static_cast<std::size_t>(i)] * std::min(1.0, overlap / w);
    }
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (mass_[i] == 0.0) continue;
    if (distance(bin_center(i), x) <= r) s += mass_[i];
  }
  return s;
}

double total_variation(const GridMeasure& a, const GridMeasure& b) {
  if (a.bins() != b.bins())
    throw ValidationError("total_variation: incompatible grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.bins(); ++i)
    s += std::fabs(a.mass(i) - b.mass(i));
  return 0.5 * s;
}

double EmpiricalMeasure::ball_mass(const Point& x, double r) const {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (distance(points[i], x) <= r) s += weight(i);
  return s;
}

double EmpiricalMeasure::mean_1d() const {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    s += weight(i) * points[i].c[0];
  return s;
}

double ks_distance(const GridMeasure& grid, const EmpiricalMeasure& emp) {
  if (grid.dim() != 1)
    throw ValidationError("ks_distance implemented for 1D measures");
  const int res = grid.resolution();
  // Empirical counts binned on the same grid, then both CDFs compared at
  // the shared right bin edges.
  std::vector<double> ecount(static_cast<std::size_t>(res), 0.0);
  double wtot = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    ecount[grid.bin_of(emp.points[i])] += emp.weight(i);
    wtot += emp.weight(i);
  }
  double cg = 0.0, ce = 0.0, worst = 0.0;
  for (int b = 0; b < res; ++b) {
    cg += grid.mass(static_cast<std::size_t>(b));
    ce += ecount[static_cast<std::size_t>(b)] / wtot;
    worst = std::max(worst, std::fabs(cg - ce));
  }
  return worst;
}

CylinderMeasure CylinderMeasure::bernoulli(const std::vector<double>& probs,
                                           int depth, int start) {
  CylinderMeasure mu(start, static_cast<int>(probs.size()));
  std::vector<Symbol> word;
  for (int L = 1; L <= depth; ++L) {
    word.assign(static_cast<std::size_t>(L), 1);
    for (;;) {
      double w = 1.0;
      for (Symbol s : word) w *= probs[static_cast<std::size_t>(s - 1)];
      mu.set_weight(L, word, w);
      int k = L - 1;
      while (k >= 0 && word[static_cast<std::size_t>(k)] ==
                           static_cast<Symbol>(probs.size()))
        word[static_cast<std::size_t>(k--)] = 1;
      if (k < 0) break;
      ++word[static_cast<std::size_t>(k)];
    }
  }
  return mu;
}

const std::map<std::vector<Symbol>, double>& CylinderMeasure::level(
    int L) const {
  if (!has_level(L))
    throw ValidationError("cylinder level " + std::to_string(L) +
                          " not stored");
  return levels_[static_cast<std::size_t>(L - 1)];
}

void CylinderMeasure::set_weight(int L, std::vector<Symbol> word, double w) {
  if (static_cast<int>(word.size()) != L)
    throw ValidationError("cylinder word length mismatch");
  for (Symbol s : word)
    if (s < 1 || s > alphabet_)
      throw SymbolOutOfAlphabet("cylinder word symbol out of alphabet");
  if (L > deepest()) levels_.resize(static_cast<std::size_t>(L));
  levels_[static_cast<std::size_t>(L - 1)][std::move(word)] = w;
}

double CylinderMeasure::weight(int L, const std::vector<Symbol>& word) const {
  const auto& lvl = level(L);
  auto it = lvl.find(word);
  return it == lvl.end() ? 0.0 : it->second;
}

double CylinderMeasure::level_total(int L) const {
  double t = 0.0;
  for (const auto& [w, m] : level(L)) t += m;
  return t;
}

void CylinderMeasure::normalize_level(int L) {
  const double t = level_total(L);
  if (t <= 0.0) throw ValidationError("normalizing a zero cylinder level");
  for (auto& [w, m] : levels_[static_cast<std::size_t>(L - 1)]) m /= t;
}

double CylinderMeasure::entropy(int L) const {
  double h = 0.0;
  for (const auto& [w, m] : level(L))
    if (m > 0.0) h -= m * std::log(m);
  return h;
}

double CylinderMeasure::marginal_error(int L) const {
  if (L < 2) throw ValidationError("marginal_error needs L >= 2");
  const auto& coarse = level(L - 1);
  const auto& fine = level(L);
  double worst = 0.0;
  for (const auto& [w, m] : coarse) {
    double refined = 0.0;
    std::vector<Symbol> child = w;
    child.push_back(1);
    for (Symbol i = 1; i <= alphabet_; ++i) {
      child.back() = i;
      auto it = fine.find(child);
      if (it != fine.end()) refined += it->second;
    }
    worst = std::max(worst, std::fabs(m - refined));
  }
  return worst;
}

}  // namespace fractaldim
