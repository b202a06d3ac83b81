#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "expr.hpp"
#include "geometry.hpp"
#include "symbolic.hpp"

namespace fractaldim {

// Conformal contraction with value semantics.  Every map exposes pointwise
// evaluation, the modulus of its derivative, and an enclosure of the image
// of a region (tight for monotone 1D maps, a conservative bounding box for
// 2D similarities).
class ConformalMap {
 public:
  struct Impl {
    virtual ~Impl() = default;
    virtual Point eval(const Point&) const = 0;
    virtual double deriv_modulus(const Point&) const = 0;
    virtual Region image_bound(const Region&) const = 0;
    virtual int dim() const = 0;
  };

  ConformalMap() = default;

  Point eval(const Point& p) const { return impl_->eval(p); }
  double deriv_modulus(const Point& p) const {
    return impl_->deriv_modulus(p);
  }
  Region image_bound(const Region& r) const { return impl_->image_bound(r); }
  int dim() const { return impl_->dim(); }
  bool valid() const { return impl_ != nullptr; }

  // x -> a*x + b on the line.
  static ConformalMap affine1d(double a, double b);
  // Inverse branch x -> 1/(x+n) of the Gauss map.
  static ConformalMap moebius_branch(int n);
  // z -> a*z + b on C ~ R^2 (a = ar + i*ai, b = br + i*bi).
  static ConformalMap similarity2d(double ar, double ai, double br, double bi);
  // 1D map given by an expression; derivative from an optional expression or
  // Richardson-extrapolated central differences.
  static ConformalMap expression1d(Expr f, std::optional<Expr> df = {});
  // phi_{w} = maps[0] o maps[1] o ... o maps.back() (word order, outermost
  // first); derivative by the chain rule, image bounds by nesting.
  static ConformalMap composition(std::vector<ConformalMap> maps);

 private:
  explicit ConformalMap(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Bounded distortion constants: |log|phi'(y)| - log|phi'(z)|| <= H |y-z|^beta.
struct BdpConstants {
  double H = 0.0;
  double beta = 1.0;
};

// Finite working system of conformal contractions phi_1..phi_N on V with a
// common contraction bound s and derivative bound alpha.  Systems truncated
// from a countable family carry that fact plus a user-declared certificate
// for separation of the omitted tail.
class IFSSystem {
 public:
  IFSSystem(std::vector<ConformalMap> maps, Region V, double s, double alpha,
            BdpConstants bdp = {}, bool countable_tail = false,
            bool tail_separation_certified = false);

  int alphabet() const { return static_cast<int>(maps_.size()); }
  const ConformalMap& map(Symbol i) const;
  const Region& domain() const { return V_; }
  double contraction() const { return s_; }
  double deriv_bound() const { return alpha_; }
  const BdpConstants& bdp() const { return bdp_; }
  bool countable_tail() const { return countable_tail_; }
  bool tail_separation_certified() const { return tail_separation_certified_; }

 private:
  std::vector<ConformalMap> maps_;
  Region V_;
  double s_, alpha_;
  BdpConstants bdp_;
  bool countable_tail_, tail_separation_certified_;
};

// Composite map phi_w for a word; validates symbols against the alphabet.
ConformalMap compose_word(const IFSSystem& sys, const Word& w);

// Enclosure of phi_{omega_0..omega_{n-1}}(V) using exactly n symbols.
Region code_region_prefix(const IFSSystem& sys, const SequenceOneSided& omega,
                          int n);

// Coding map pi(omega): nests images until the enclosure diameter is <= tol.
// Throws ResolutionExceeded when the sequence is too shallow for that.
Point code_point(const IFSSystem& sys, const SequenceOneSided& omega,
                 double tol = 1e-12);

// pi evaluated from exactly n symbols (center of the depth-n enclosure).
Point code_point_prefix(const IFSSystem& sys, const SequenceOneSided& omega,
                        int n);

struct BdpEstimate {
  double H_emp = 0.0;
  bool pass = false;
};

// Empirical distortion constant over a sample grid; pass iff it is within
// the declared H.
BdpEstimate check_bdp(const IFSSystem& sys, int samples = 33);

// Smallest pairwise distance between the images phi_i(x), i in {1..N}.
double min_image_separation(const IFSSystem& sys, const Point& x);

// Non-accumulation at x: the finite part requires pairwise separation
// >= sep_tol; the countable tail is accepted only via the declared
// certificate.
bool check_non_accumulation(const IFSSystem& sys, const Point& x,
                            double sep_tol = 1e-9);

}  // namespace fractaldim
