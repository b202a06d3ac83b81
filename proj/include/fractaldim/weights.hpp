#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ifs.hpp"
#include "measure_types.hpp"

namespace fractaldim {

struct HolderConstants {
  double C = 0.0;
  double alpha = 1.0;
};

// One probability weight p_i: V -> [0,1].
class WeightFn {
 public:
  enum class Kind { kConstant, kAffine, kExpression };

  static WeightFn constant(double v) {
    WeightFn f;
    f.kind_ = Kind::kConstant;
    f.a_ = v;
    return f;
  }
  // p(x) = a + b*x (1D).
  static WeightFn affine(double a, double b) {
    WeightFn f;
    f.kind_ = Kind::kAffine;
    f.a_ = a;
    f.b_ = b;
    return f;
  }
  static WeightFn expression(Expr e) {
    WeightFn f;
    f.kind_ = Kind::kExpression;
    f.expr_ = std::move(e);
    return f;
  }

  double eval(const Point& x) const {
    switch (kind_) {
      case Kind::kConstant:
        return a_;
      case Kind::kAffine:
        return a_ + b_ * x.c[0];
      case Kind::kExpression:
        return expr_.eval(x.c[0]);
    }
    return 0.0;
  }
  Kind kind() const { return kind_; }

 private:
  Kind kind_ = Kind::kConstant;
  double a_ = 0.0, b_ = 0.0;
  Expr expr_;
};

// Place-dependent probability vector (p_1..p_N) with a declared bound on the
// omitted tail mass and a uniform Holder modulus shared by all p_i.
class WeightSystem {
 public:
  WeightSystem(std::vector<WeightFn> p, double tail_mass_bound = 0.0,
               HolderConstants holder = {});

  int count() const { return static_cast<int>(p_.size()); }
  double eval(Symbol i, const Point& x) const;
  void probs_into(const Point& x, std::vector<double>& out) const;
  std::vector<double> probs(const Point& x) const;
  double tail_mass_bound() const { return tail_; }
  const HolderConstants& holder() const { return holder_; }

  // Sampled invariants: p_i >= 0 and sum p_i in [1 - tail, 1] on V.
  void validate_on(const Region& V) const;

 private:
  std::vector<WeightFn> p_;
  double tail_;
  HolderConstants holder_;
};

// Potential psi on sequence space.  Evaluation depth bounds how many
// symbols (future, and past where relevant) may be consumed, so the
// declared locality estimate |psi at depth d - limit| <= coeff * rate^d is a
// testable statement.
class Potential {
 public:
  enum class Kind {
    kFromWeights,
    kGeometric,
    kFiberGeometric,
    kSymbolTable,
    kConstant,
    kUser
  };

  using Fn = std::function<double(const SequenceTwoSided&, int)>;

  Potential(Kind kind, Fn fn, double holder_coeff, double holder_rate,
            bool countable = false,
            std::optional<std::function<double(int)>> tail_bound = {})
      : kind_(kind),
        fn_(std::move(fn)),
        holder_coeff_(holder_coeff),
        holder_rate_(holder_rate),
        countable_(countable),
        tail_bound_(std::move(tail_bound)) {}

  double eval(const SequenceTwoSided& eta, int depth) const {
    return fn_(eta, depth);
  }
  // Lift for potentials that ignore the past.
  double eval(const SequenceOneSided& omega, int depth) const;

  Kind kind() const { return kind_; }
  double holder_coeff() const { return holder_coeff_; }
  double holder_rate() const { return holder_rate_; }
  bool countable() const { return countable_; }
  const std::optional<std::function<double(int)>>& tail_bound() const {
    return tail_bound_;
  }

 private:
  Kind kind_;
  Fn fn_;
  double holder_coeff_, holder_rate_;
  bool countable_;
  std::optional<std::function<double(int)>> tail_bound_;
};

// psi(omega) = log p_{omega_0}(pi(sigma omega)); throws ZeroWeight where the
// selected weight vanishes.
Potential potential_from_weights(const IFSSystem& sys, const WeightSystem& w);

// psi_s(omega) = s * log |phi'_{omega_0}(pi(sigma omega))|.  For systems
// declared countable the caller must supply a certified bound on
// sum_{i > N} exp(sup psi_s|[i]) to make summability checks meaningful.
Potential geometric_potential(const IFSSystem& sys, double s,
                              std::optional<std::function<double(int)>>
                                  tail_bound = {});

Potential constant_potential(double c, bool countable = false,
                             std::optional<std::function<double(int)>>
                                 tail_bound = {});

// psi(omega) = table[omega_0 - 1].
Potential symbol_potential(std::vector<double> by_symbol,
                           bool countable = false,
                           std::optional<std::function<double(int)>>
                               tail_bound = {});

constexpr int kDefaultEvalDepth = 48;

// S_n psi(tau) = sum_{k=0}^{n-1} psi(sigma^k tau).
double birkhoff_sum(const Potential& psi, const SequenceTwoSided& tau, int n,
                    int eval_depth = kDefaultEvalDepth);

struct SummabilityReport {
  double value = 0.0;      // finite part + certified tail bound
  bool pass = false;
  std::vector<double> partial;  // partial sums over i <= N
  double tail = 0.0;
};

// sum_{i<=N} exp(sup psi|[i]) with the cylinder sup estimated by seeded
// sampling; countable potentials must certify the tail or TailUncertified
// is thrown.
SummabilityReport check_summability(const Potential& psi, int alphabet,
                                    int samples = 32,
                                    int eval_depth = kDefaultEvalDepth,
                                    std::uint64_t seed = 1);

struct PressureResult {
  std::vector<double> a_n;  // a_n for n = 1..depth
  double value = 0.0;       // inf over computed a_n
  double aitken = 0.0;      // accelerated tail estimate
  long pruned_zero_weight = 0;
};

// a_n = (1/n) log sum over length-n cylinders of exp(sup S_n psi), with the
// sup taken at the periodic extension of the cylinder word plus the
// potential's locality correction coeff*rate^n.  Enumeration is capped by
// `budget` cylinder evaluations (FRACTALDIM_BUDGET overrides the default
// 1e7) and throws CombinatorialBlowup beyond it.
PressureResult pressure(const Potential& psi, int alphabet, int depth_max,
                        int eval_depth = kDefaultEvalDepth,
                        std::optional<long long> budget = {},
                        int threads = 1);

long long default_budget();

struct GibbsCheckResult {
  double c_min = 1.0;
  double c_max = 1.0;
  std::vector<double> c_n;  // per-depth max(C_max, 1/C_min)
  double slope = 0.0;       // trend of log c_n against n
  bool pass = false;
};

// Ratio mu([w]) / exp(S_n psi - P n) over stored cylinder levels; fails on a
// bound breach or a monotone growth trend of the log-ratio envelope.
GibbsCheckResult check_gibbs(const Potential& psi, const CylinderMeasure& mu,
                             double P, int depth, double c_bound = 100.0,
                             double slope_tol = 0.01,
                             int eval_depth = kDefaultEvalDepth);

}  // namespace fractaldim
