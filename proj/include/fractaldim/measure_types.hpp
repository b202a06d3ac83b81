#pragma once

#include <map>
#include <vector>

#include "geometry.hpp"
#include "symbolic.hpp"

namespace fractaldim {

// Probability measure on a regular grid over a region; resolution is bins
// per axis and must be a power of two.  Total mass is kept at 1 within
// 1e-12 by normalize().
class GridMeasure {
 public:
  GridMeasure(Region region, int resolution);

  static GridMeasure uniform(Region region, int resolution);
  static GridMeasure point_mass(Region region, int resolution, const Point&);

  const Region& region() const { return region_; }
  int resolution() const { return resolution_; }
  int dim() const { return region_.dim; }
  std::size_t bins() const { return mass_.size(); }
  double bin_width(int axis) const {
    return region_.width(axis) / resolution_;
  }

  double& mass(std::size_t idx) { return mass_[idx]; }
  double mass(std::size_t idx) const { return mass_[idx]; }
  const std::vector<double>& masses() const { return mass_; }

  // Flat index of the bin containing p (clamped to the boundary bins).
  std::size_t bin_of(const Point& p) const;
  Point bin_center(std::size_t idx) const;

  double total() const;
  void normalize();

  double mean_1d() const;
  // Mass of the closed ball B(x,r): exact piecewise-constant integral in 1D,
  // bin centers within distance r in 2D.
  double ball_mass(const Point& x, double r) const;

 private:
  Region region_;
  int resolution_;
  std::vector<double> mass_;
};

double total_variation(const GridMeasure& a, const GridMeasure& b);

// Weighted sample cloud; empty weights mean uniform 1/n.
struct EmpiricalMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  double weight(std::size_t i) const {
    return weights.empty() ? 1.0 / static_cast<double>(points.size())
                           : weights[i];
  }
  double ball_mass(const Point& x, double r) const;
  double mean_1d() const;
};

// Kolmogorov-Smirnov distance between a 1D grid measure and a sample cloud,
// evaluated at the grid bin edges.
double ks_distance(const GridMeasure& grid, const EmpiricalMeasure& emp);

// Weights on cylinder words.  Levels 1..depth may all be stored; words at
// level L occupy positions start .. start+L-1.  Refining a word one symbol
// to the right should approximately preserve mass (reported, not enforced).
class CylinderMeasure {
 public:
  CylinderMeasure(int start, int alphabet) : start_(start), alphabet_(alphabet) {}

  static CylinderMeasure bernoulli(const std::vector<double>& probs, int depth,
                                   int start = 0);

  int start() const { return start_; }
  int alphabet() const { return alphabet_; }
  int deepest() const { return static_cast<int>(levels_.size()); }
  bool has_level(int L) const {
    return L >= 1 && L <= deepest() && !levels_[static_cast<std::size_t>(L - 1)].empty();
  }

  const std::map<std::vector<Symbol>, double>& level(int L) const;
  void set_weight(int L, std::vector<Symbol> word, double w);
  double weight(int L, const std::vector<Symbol>& word) const;

  void normalize_level(int L);
  double level_total(int L) const;

  // Shannon entropy -sum w log w of level L.
  double entropy(int L) const;
  // max_w |w(v) - sum_i w(v.i)| between levels L-1 and L.
  double marginal_error(int L) const;

 private:
  int start_;
  int alphabet_;
  std::vector<std::map<std::vector<Symbol>, double>> levels_;
};

// Conditional distribution over past blocks tau_{-m}..tau_{-1} given an
// observed future block, extracted from a joint cylinder measure.
struct ConditionalMeasure {
  Word given;
  int past_depth = 0;
  std::map<std::vector<Symbol>, double> past_weights;
};

}  // namespace fractaldim
