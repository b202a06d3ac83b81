#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fractaldim {

// Symbols index the map family and are 1-based; the countable alphabet is
// truncated to a working alphabet {1..N} recorded on each sequence, and
// constructors refuse symbols above it.
using Symbol = std::int32_t;

// A finite block of symbols occupying positions start .. start+size-1.
struct Word {
  std::vector<Symbol> symbols;
  int start = 0;

  int length() const { return static_cast<int>(symbols.size()); }
  int end() const { return start + length() - 1; }
  bool operator==(const Word&) const = default;
  bool operator<(const Word& o) const {
    if (start != o.start) return start < o.start;
    return symbols < o.symbols;
  }
};

// One-sided sequence (omega_0, omega_1, ...).  Two storage forms share one
// type: an eventually periodic description (unbounded resolution) or a
// finite materialized prefix with a declared resolution depth.  Instances
// are immutable; all mutators return new sequences.
class SequenceOneSided {
 public:
  static constexpr long long kUnbounded =
      std::numeric_limits<long long>::max();

  static SequenceOneSided periodic(std::vector<Symbol> period, int alphabet) {
    return eventually_periodic({}, std::move(period), alphabet);
  }

  static SequenceOneSided eventually_periodic(std::vector<Symbol> preperiod,
                                              std::vector<Symbol> period,
                                              int alphabet) {
    if (period.empty())
      throw ValidationError("eventually_periodic: empty period");
    SequenceOneSided s;
    s.pre_ = std::move(preperiod);
    s.period_ = std::move(period);
    s.alphabet_ = alphabet;
    s.check_symbols();
    return s;
  }

  // Materialized prefix produced by a generator; resolution = symbols.size().
  static SequenceOneSided finite(std::vector<Symbol> symbols, int alphabet) {
    SequenceOneSided s;
    s.pre_ = std::move(symbols);
    s.alphabet_ = alphabet;
    s.check_symbols();
    return s;
  }

  Symbol at(int k) const {
    if (k < 0) throw ResolutionExceeded("sequence index is negative");
    if (period_.empty()) {
      if (k >= static_cast<int>(pre_.size()))
        throw ResolutionExceeded("sequence resolved only to depth " +
                                 std::to_string(pre_.size()));
      return pre_[static_cast<std::size_t>(k)];
    }
    if (k < static_cast<int>(pre_.size()))
      return pre_[static_cast<std::size_t>(k)];
    const std::size_t off =
        (static_cast<std::size_t>(k) - pre_.size()) % period_.size();
    return period_[off];
  }

  long long resolution() const {
    return period_.empty() ? static_cast<long long>(pre_.size()) : kUnbounded;
  }

  bool has_periodic_description() const { return !period_.empty(); }
  int alphabet() const { return alphabet_; }

  std::vector<Symbol> prefix(int n) const {
    std::vector<Symbol> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out.push_back(at(k));
    return out;
  }

  // The shifted sequence sigma(omega) = (omega_1, omega_2, ...).
  SequenceOneSided shifted() const {
    SequenceOneSided s(*this);
    if (!s.pre_.empty()) {
      s.pre_.erase(s.pre_.begin());
      return s;
    }
    if (s.period_.empty())
      throw ResolutionExceeded("cannot shift a depth-0 sequence");
    // Rotate the purely periodic description by one.
    std::vector<Symbol> rot(s.period_.begin() + 1, s.period_.end());
    rot.push_back(s.period_.front());
    s.period_ = std::move(rot);
    return s;
  }

  SequenceOneSided prepended(Symbol head) const {
    SequenceOneSided s(*this);
    s.pre_.insert(s.pre_.begin(), head);
    s.check_symbols();
    return s;
  }

  // Exact equality decision; only defined (true/false) when both sides carry
  // periodic descriptions, where agreement on the first
  // max(preperiods) + lcm(periods) symbols decides equality.
  bool definitely_equal(const SequenceOneSided& o) const {
    if (period_.empty() || o.period_.empty()) return false;
    const long long l =
        std::lcm<long long>(static_cast<long long>(period_.size()),
                            static_cast<long long>(o.period_.size()));
    const long long need =
        static_cast<long long>(std::max(pre_.size(), o.pre_.size())) + l;
    for (long long k = 0; k < need; ++k)
      if (at(static_cast<int>(k)) != o.at(static_cast<int>(k))) return false;
    return true;
  }

 private:
  SequenceOneSided() = default;
  void check_symbols() const {
    if (alphabet_ < 1) throw ValidationError("alphabet must be >= 1");
    auto chk = [&](Symbol v) {
      if (v < 1 || v > alphabet_)
        throw SymbolOutOfAlphabet("symbol " + std::to_string(v) +
                                  " outside working alphabet {1.." +
                                  std::to_string(alphabet_) + "}");
    };
    for (Symbol v : pre_) chk(v);
    for (Symbol v : period_) chk(v);
  }

  std::vector<Symbol> pre_, period_;
  int alphabet_ = 0;
};

// Two-sided sequence; position 0 is the first future symbol, position -1 the
// most recent past symbol.  past().at(k) stores position -(k+1).
class SequenceTwoSided {
 public:
  SequenceTwoSided(SequenceOneSided past, SequenceOneSided future)
      : past_(std::move(past)), future_(std::move(future)) {}

  // Bi-infinite periodic extension of a word anchored so the word occupies
  // positions word.start .. word.end().
  static SequenceTwoSided periodic_from_word(const Word& w, int alphabet) {
    if (w.symbols.empty())
      throw ValidationError("periodic_from_word: empty word");
    const int L = w.length();
    auto sym_at = [&](long long pos) {
      long long r = (pos - w.start) % L;
      if (r < 0) r += L;
      return w.symbols[static_cast<std::size_t>(r)];
    };
    std::vector<Symbol> fut, pastrev;
    for (int k = 0; k < L; ++k) fut.push_back(sym_at(k));
    for (int k = 1; k <= L; ++k) pastrev.push_back(sym_at(-k));
    return SequenceTwoSided(SequenceOneSided::periodic(pastrev, alphabet),
                            SequenceOneSided::periodic(fut, alphabet));
  }

  Symbol at(int k) const { return k >= 0 ? future_.at(k) : past_.at(-k - 1); }

  const SequenceOneSided& past() const { return past_; }
  const SequenceOneSided& future() const { return future_; }

  long long past_resolution() const { return past_.resolution(); }

  // sigma: positions slide left by one (future head moves into the past).
  SequenceTwoSided shifted_left() const {
    return SequenceTwoSided(past_.prepended(future_.at(0)),
                            future_.shifted());
  }

  // sigma^{-1}: the most recent past symbol becomes position 0.
  SequenceTwoSided shifted_right() const {
    return SequenceTwoSided(past_.shifted(), future_.prepended(past_.at(0)));
  }

  SequenceTwoSided shifted(int k) const {
    SequenceTwoSided s(*this);
    for (; k > 0; --k) s = s.shifted_left();
    for (; k < 0; ++k) s = s.shifted_right();
    return s;
  }

  // One-sided view (tau_pos, tau_{pos+1}, ...) starting at position pos.
  SequenceOneSided from_index(int pos) const {
    if (pos >= 0) {
      SequenceOneSided s = future_;
      for (int k = 0; k < pos; ++k) s = s.shifted();
      return s;
    }
    SequenceOneSided s = future_;
    for (int k = -1; k >= pos; --k) s = s.prepended(past_.at(-k - 1));
    return s;
  }

 private:
  SequenceOneSided past_, future_;
};

// Cylinder set [word]: all two-sided sequences matching the word on its
// occupied positions.
struct Cylinder {
  Word word;
};

inline bool cylinder_contains(const Cylinder& c, const SequenceTwoSided& a) {
  for (int k = 0; k < c.word.length(); ++k)
    if (a.at(c.word.start + k) != c.word.symbols[static_cast<std::size_t>(k)])
      return false;
  return true;
}

inline SequenceOneSided shift(const SequenceOneSided& s) { return s.shifted(); }
inline SequenceTwoSided shift(const SequenceTwoSided& s) {
  return s.shifted_left();
}

// Value of the symbolic metric together with a flag marking truncation at
// the comparison depth.
struct MetricValue {
  double value = 0.0;
  bool clamped = false;
};

// d_beta(a,b) = exp(-beta * L) where L is the length of the longest common
// prefix.  Convention: sequences differing at position 0 are at distance
// exp(0) = 1, and exactly equal sequences are at distance 0.  When the
// sequences agree through `depth` symbols and equality is undecidable, the
// value clamps to exp(-beta*depth) with `clamped` set.
MetricValue d_beta(const SequenceOneSided& a, const SequenceOneSided& b,
                   double beta, int depth);

}  // namespace fractaldim
