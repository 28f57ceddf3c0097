#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "netrank/dense.hpp"

namespace netrank {

// Central finite-difference check of analytic gradients. `loss_fn` must
// recompute the scalar loss from the current parameter values; parameters
// are perturbed in place and restored. Returns the maximum relative error
// across all parameter entries. Entries where both gradients are tiny are
// compared absolutely so dead units do not produce spurious blowups.
inline double grad_check(const std::function<double()>& loss_fn,
                         const std::vector<Dense*>& params,
                         const std::vector<const Dense*>& analytic_grads,
                         double epsilon = 1e-5) {
  if (params.size() != analytic_grads.size()) {
    throw std::runtime_error("grad_check: parameter/gradient count mismatch");
  }
  double max_rel = 0.0;
  for (size_t k = 0; k < params.size(); ++k) {
    Dense& p = *params[k];
    const Dense& g = *analytic_grads[k];
    check_shape(p.same_shape(g), "grad_check");
    for (size_t i = 0; i < p.size(); ++i) {
      double orig = p.raw()[i];
      p.raw()[i] = orig + epsilon;
      double lp = loss_fn();
      p.raw()[i] = orig - epsilon;
      double lm = loss_fn();
      p.raw()[i] = orig;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        throw std::runtime_error("grad_check: non-finite loss");
      }
      double numeric = (lp - lm) / (2.0 * epsilon);
      double a = g.raw()[i];
      double denom = std::max(std::abs(a), std::abs(numeric));
      double rel = denom < 1e-6 ? std::abs(a - numeric) : std::abs(a - numeric) / denom;
      max_rel = std::max(max_rel, rel);
    }
  }
  return max_rel;
}

}  // namespace netrank
