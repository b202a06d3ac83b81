#include "fractaldim/symbolic.hpp"

#include <cmath>

namespace fractaldim {

MetricValue d_beta(const SequenceOneSided& a, const SequenceOneSided& b,
                   double beta, int depth) {
  if (depth < 1) throw ValidationError("d_beta: depth must be >= 1");
  if (beta <= 0.0) throw ValidationError("d_beta: beta must be positive");
  if (a.resolution() < depth || b.resolution() < depth)
    throw ResolutionExceeded("d_beta: sequences not resolvable to depth " +
                             std::to_string(depth));
  int common = 0;
  while (common < depth && a.at(common) == b.at(common)) ++common;
  if (common < depth) return {std::exp(-beta * common), false};
  if (a.definitely_equal(b)) return {0.0, false};
  return {std::exp(-beta * depth), true};
}

}  // namespace fractaldim
