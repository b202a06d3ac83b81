#include "fractaldim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fractaldim {

namespace {

class Affine1D final : public ConformalMap::Impl {
 public:
  Affine1D(double a, double b) : a_(a), b_(b) {
    if (std::fabs(a) >= 1.0)
      throw ValidationError("affine1d: |a| must be < 1 for a contraction");
    if (a == 0.0) throw ValidationError("affine1d: a must be nonzero");
  }
  Point eval(const Point& p) const override {
    return Point::d1(a_ * p.c[0] + b_);
  }
  double deriv_modulus(const Point&) const override { return std::fabs(a_); }
  Region image_bound(const Region& r) const override {
    const double u = a_ * r.lo[0] + b_;
    const double v = a_ * r.hi[0] + b_;
    return Region{1, {std::min(u, v), 0.0}, {std::max(u, v), 0.0}};
  }
  int dim() const override { return 1; }

 private:
  double a_, b_;
};

class MoebiusBranch final : public ConformalMap::Impl {
 public:
  explicit MoebiusBranch(int n) : n_(n) {
    if (n < 1) throw ValidationError("moebius_branch: n must be >= 1");
  }
  Point eval(const Point& p) const override {
    return Point::d1(1.0 / (p.c[0] + n_));
  }
  double deriv_modulus(const Point& p) const override {
    const double d = p.c[0] + n_;
    return 1.0 / (d * d);
  }
  Region image_bound(const Region& r) const override {
    // Monotone decreasing on x > -n.
    return Region{1, {1.0 / (r.hi[0] + n_), 0.0}, {1.0 / (r.lo[0] + n_), 0.0}};
  }
  int dim() const override { return 1; }

 private:
  int n_;
};

class Similarity2D final : public ConformalMap::Impl {
 public:
  Similarity2D(double ar, double ai, double br, double bi)
      : ar_(ar), ai_(ai), br_(br), bi_(bi), mod_(std::hypot(ar, ai)) {
    if (mod_ >= 1.0)
      throw ValidationError("similarity2d: |a| must be < 1 for a contraction");
    if (mod_ == 0.0) throw ValidationError("similarity2d: a must be nonzero");
  }
  Point eval(const Point& p) const override {
    return Point::d2(ar_ * p.c[0] - ai_ * p.c[1] + br_,
                     ai_ * p.c[0] + ar_ * p.c[1] + bi_);
  }
  double deriv_modulus(const Point&) const override { return mod_; }
  Region image_bound(const Region& r) const override {
    // Bounding box of the four transformed corners (the exact image is a
    // rotated box; its axis-aligned hull is a conservative superset).
    double lox = 0, loy = 0, hix = 0, hiy = 0;
    bool first = true;
    for (int cx = 0; cx < 2; ++cx)
      for (int cy = 0; cy < 2; ++cy) {
        const Point q = eval(Point::d2(cx ? r.hi[0] : r.lo[0],
                                       cy ? r.hi[1] : r.lo[1]));
        if (first) {
          lox = hix = q.c[0];
          loy = hiy = q.c[1];
          first = false;
        } else {
          lox = std::min(lox, q.c[0]);
          hix = std::max(hix, q.c[0]);
          loy = std::min(loy, q.c[1]);
          hiy = std::max(hiy, q.c[1]);
        }
      }
    return Region{2, {lox, loy}, {hix, hiy}};
  }
  int dim() const override { return 2; }

 private:
  double ar_, ai_, br_, bi_, mod_;
};

class Expression1DMap final : public ConformalMap::Impl {
 public:
  Expression1DMap(Expr f, std::optional<Expr> df)
      : f_(std::move(f)), df_(std::move(df)) {}
  Point eval(const Point& p) const override {
    return Point::d1(f_.eval(p.c[0]));
  }
  double deriv_modulus(const Point& p) const override {
    if (df_) return std::fabs(df_->eval(p.c[0]));
    // Richardson-extrapolated central difference.
    const double x = p.c[0];
    const double h = 1e-5 * std::max(1.0, std::fabs(x));
    const double d1 = (f_.eval(x + h) - f_.eval(x - h)) / (2.0 * h);
    const double d2 =
        (f_.eval(x + 0.5 * h) - f_.eval(x - 0.5 * h)) / h;
    return std::fabs((4.0 * d2 - d1) / 3.0);
  }
  Region image_bound(const Region& r) const override {
    // 1D conformal maps are strictly monotone; endpoint images bound the
    // image (monotonicity is validated when the system is assembled).
    const double u = f_.eval(r.lo[0]);
    const double v = f_.eval(r.hi[0]);
    return Region{1, {std::min(u, v), 0.0}, {std::max(u, v), 0.0}};
  }
  int dim() const override { return 1; }

 private:
  Expr f_;
  std::optional<Expr> df_;
};

class Composition final : public ConformalMap::Impl {
 public:
  explicit Composition(std::vector<ConformalMap> maps)
      : maps_(std::move(maps)) {
    if (maps_.empty()) throw ValidationError("composition: empty word");
  }
  Point eval(const Point& p) const override {
    Point q = p;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) q = it->eval(q);
    return q;
  }
  double deriv_modulus(const Point& p) const override {
    // Chain rule: multiply factors at the intermediate points, innermost
    // first.
    Point q = p;
    double d = 1.0;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it) {
      d *= it->deriv_modulus(q);
      q = it->eval(q);
    }
    return d;
  }
  Region image_bound(const Region& r) const override {
    Region out = r;
    for (auto it = maps_.rbegin(); it != maps_.rend(); ++it)
      out = it->image_bound(out);
    return out;
  }
  int dim() const override { return maps_.front().dim(); }

 private:
  std::vector<ConformalMap> maps_;
};

}  // namespace

ConformalMap ConformalMap::affine1d(double a, double b) {
  return ConformalMap(std::make_shared<Affine1D>(a, b));
}
ConformalMap ConformalMap::moebius_branch(int n) {
  return ConformalMap(std::make_shared<MoebiusBranch>(n));
}
ConformalMap ConformalMap::similarity2d(double ar, double ai, double br,
                                        double bi) {
  return ConformalMap(std::make_shared<Similarity2D>(ar, ai, br, bi));
}
ConformalMap ConformalMap::expression1d(Expr f, std::optional<Expr> df) {
  return ConformalMap(
      std::make_shared<Expression1DMap>(std::move(f), std::move(df)));
}
ConformalMap ConformalMap::composition(std::vector<ConformalMap> maps) {
  return ConformalMap(std::make_shared<Composition>(std::move(maps)));
}

namespace {

std::vector<Point> sample_points(const Region& V, int samples) {
  std::vector<Point> pts;
  if (V.dim == 1) {
    pts.reserve(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
      const double t = samples == 1 ? 0.5 : double(i) / (samples - 1);
      pts.push_back(Point::d1(V.lo[0] + t * V.width(0)));
    }
  } else {
    const int m = std::max(2, static_cast<int>(std::sqrt(samples)));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        pts.push_back(Point::d2(V.lo[0] + V.width(0) * i / (m - 1),
                                V.lo[1] + V.width(1) * j / (m - 1)));
  }
  return pts;
}

}  // namespace

IFSSystem::IFSSystem(std::vector<ConformalMap> maps, Region V, double s,
                     double alpha, BdpConstants bdp, bool countable_tail,
                     bool tail_separation_certified)
    : maps_(std::move(maps)),
      V_(V),
      s_(s),
      alpha_(alpha),
      bdp_(bdp),
      countable_tail_(countable_tail),
      tail_separation_certified_(tail_separation_certified) {
  if (maps_.size() < 2)
    throw ValidationError("system needs at least two maps");
  if (!(s_ > 0.0 && s_ < 1.0))
    throw ValidationError("contraction bound s must lie in (0,1)");
  if (!(alpha_ > 0.0 && alpha_ < 1.0))
    throw ValidationError("derivative bound alpha must lie in (0,1)");
  // Sampled invariants: images stay in V, pairwise contraction with ratio s,
  // derivative modulus within alpha, and (1D) strict monotonicity.
  const auto pts = sample_points(V_, 17);
  const double slack = 1e-9 * std::max(1.0, V_.diam());
  for (std::size_t mi = 0; mi < maps_.size(); ++mi) {
    const ConformalMap& f = maps_[mi];
    if (f.dim() != V_.dim)
      throw ValidationError("map " + std::to_string(mi + 1) +
                            " has wrong dimension");
    for (const Point& p : pts) {
      if (!V_.contains(f.eval(p), slack))
        throw ValidationError("map " + std::to_string(mi + 1) +
                              " does not keep V invariant");
      if (f.deriv_modulus(p) > alpha_ + 1e-12)
        throw ValidationError("map " + std::to_string(mi + 1) +
                              " violates the derivative bound alpha");
    }
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const double d0 = distance(pts[a], pts[b]);
        const double d1 = distance(f.eval(pts[a]), f.eval(pts[b]));
        if (d1 > s_ * d0 + 1e-12)
          throw ValidationError("map " + std::to_string(mi + 1) +
                                " violates the contraction bound s");
      }
    if (V_.dim == 1) {
      // Conformal on the line means strictly monotone: consecutive sample
      // images must be strictly ordered in a fixed direction.
      int sign = 0;
      for (std::size_t a = 0; a + 1 < pts.size(); ++a) {
        const double d =
            f.eval(pts[a + 1]).c[0] - f.eval(pts[a]).c[0];
        const int sg = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sg == 0 || (sign != 0 && sg != sign))
          throw ValidationError("map " + std::to_string(mi + 1) +
                                " is not strictly monotone on V");
        sign = sg;
      }
    }
  }
}

const ConformalMap& IFSSystem::map(Symbol i) const {
  if (i < 1 || i > alphabet())
    throw SymbolOutOfAlphabet("symbol " + std::to_string(i) +
                              " outside working alphabet {1.." +
                              std::to_string(alphabet()) + "}");
  return maps_[static_cast<std::size_t>(i - 1)];
}

ConformalMap compose_word(const IFSSystem& sys, const Word& w) {
  if (w.symbols.empty()) throw ValidationError("compose_word: empty word");
  std::vector<ConformalMap> chain;
  chain.reserve(w.symbols.size());
  for (Symbol i : w.symbols) chain.push_back(sys.map(i));
  return ConformalMap::composition(std::move(chain));
}

Region code_region_prefix(const IFSSystem& sys, const SequenceOneSided& omega,
                          int n) {
  if (n < 1) throw ValidationError("code_region_prefix: need n >= 1");
  if (omega.resolution() < n)
    throw ResolutionExceeded("sequence resolved to fewer than " +
                             std::to_string(n) + " symbols");
  Region r = sys.domain();
  for (int k = n - 1; k >= 0; --k) r = sys.map(omega.at(k)).image_bound(r);
  return r;
}

Point code_point_prefix(const IFSSystem& sys, const SequenceOneSided& omega,
                        int n) {
  return code_region_prefix(sys, omega, n).center();
}

Point code_point(const IFSSystem& sys, const SequenceOneSided& omega,
                 double tol) {
  if (!(tol > 0.0)) throw ValidationError("code_point: tol must be positive");
  const double diam = sys.domain().diam();
  int n = 1;
  if (tol < diam)
    n = static_cast<int>(
            std::ceil(std::log(tol / diam) / std::log(sys.contraction()))) +
        1;
  for (;;) {
    if (omega.resolution() < n)
      throw ResolutionExceeded(
          "code_point: sequence too shallow for tolerance");
    const Region r = code_region_prefix(sys, omega, n);
    if (r.diam() <= tol) return r.center();
    // Conservative 2D bounds may need a few extra symbols.
    n += std::max(4, n / 2);
  }
}

BdpEstimate check_bdp(const IFSSystem& sys, int samples) {
  const auto pts = sample_points(sys.domain(), samples);
  double H = 0.0;
  for (Symbol i = 1; i <= sys.alphabet(); ++i) {
    const ConformalMap& f = sys.map(i);
    for (std::size_t a = 0; a < pts.size(); ++a)
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const double dist = distance(pts[a], pts[b]);
        if (dist <= 0.0) continue;
        const double num = std::fabs(std::log(f.deriv_modulus(pts[a])) -
                                     std::log(f.deriv_modulus(pts[b])));
        H = std::max(H, num / std::pow(dist, sys.bdp().beta));
      }
  }
  return BdpEstimate{H, H <= sys.bdp().H + 1e-12};
}

double min_image_separation(const IFSSystem& sys, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (Symbol i = 1; i <= sys.alphabet(); ++i)
    for (Symbol j = i + 1; j <= sys.alphabet(); ++j)
      best = std::min(best,
                      distance(sys.map(i).eval(x), sys.map(j).eval(x)));
  return best;
}

bool check_non_accumulation(const IFSSystem& sys, const Point& x,
                            double sep_tol) {
  if (min_image_separation(sys, x) < sep_tol) return false;
  if (sys.countable_tail() && !sys.tail_separation_certified()) return false;
  return true;
}

}  // namespace fractaldim
