#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace fractaldim {

// ---- least squares ----------------------------------------------------

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
  int n = 0;
};

// Ordinary least squares of y against x.  r2 is defined as 1 when the
// residuals vanish even if the data are constant.
inline LinFit linear_fit(const std::vector<double>& x,
                         const std::vector<double>& y) {
  LinFit f;
  f.n = static_cast<int>(x.size());
  if (f.n < 2) {
    f.slope = 0.0;
    f.intercept = f.n == 1 ? y[0] : 0.0;
    return f;
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < f.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= f.n;
  my /= f.n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < f.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ssres = 0.0;
  for (int i = 0; i < f.n; ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ssres += e * e;
  }
  f.r2 = ssres <= 1e-24 ? 1.0 : (syy > 0.0 ? 1.0 - ssres / syy : 1.0);
  return f;
}

// ---- deterministic parallel map ----------------------------------------

// Runs fn(block, begin, end) over a fixed partition of [0,n) into
// kFixedBlocks contiguous blocks.  The partition does not depend on the
// thread count, so per-block reductions combined in block order give
// byte-identical results for any `threads`.
constexpr int kFixedBlocks = 64;

inline void parallel_blocks(std::int64_t n, int threads,
                            const std::function<void(int, std::int64_t,
                                                     std::int64_t)>& fn) {
  const int nblocks = kFixedBlocks;
  auto block_range = [&](int b, std::int64_t& lo, std::int64_t& hi) {
    lo = n * b / nblocks;
    hi = n * (b + 1) / nblocks;
  };
  if (threads <= 1 || n < 2048) {
    for (int b = 0; b < nblocks; ++b) {
      std::int64_t lo, hi;
      block_range(b, lo, hi);
      if (lo < hi) fn(b, lo, hi);
    }
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int b = next.fetch_add(1);
      if (b >= nblocks) return;
      std::int64_t lo, hi;
      block_range(b, lo, hi);
      if (lo < hi) fn(b, lo, hi);
    }
  };
  const int nt = std::min(threads, nblocks);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// ---- numerics -----------------------------------------------------------

// log(sum(exp(v))) without overflow; terms are accumulated in index order.
inline double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

// Bisection root of a continuous function with f(lo), f(hi) of opposite
// sign; returns the midpoint once the bracket is below xtol.
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, double xtol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw ValidationError("bisect_root: endpoints do not bracket a root");
  while (hi - lo > xtol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Aitken delta-squared acceleration of the last three sequence entries.
inline double aitken_last3(const std::vector<double>& a) {
  const std::size_t n = a.size();
  if (n < 3) return a.empty() ? 0.0 : a.back();
  const double x0 = a[n - 3], x1 = a[n - 2], x2 = a[n - 1];
  const double denom = x2 - 2.0 * x1 + x0;
  if (std::fabs(denom) < 1e-300) return x2;
  const double acc = x2 - (x2 - x1) * (x2 - x1) / denom;
  return std::isfinite(acc) ? acc : x2;
}

// ---- formatting / hashing ----------------------------------------------

// Shortest round-trip decimal form; identical bytes for identical doubles.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace fractaldim
