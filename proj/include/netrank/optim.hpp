#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "netrank/dense.hpp"

namespace netrank {

// Bias-corrected adaptive-moment optimizer. The moment buffers are keyed by
// parameter order, so the same parameter list must be passed every step.
struct AdamState {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Dense> m, v;

  void init(const std::vector<Dense*>& params) {
    m.clear();
    v.clear();
    for (const Dense* p : params) {
      m.emplace_back(p->rows(), p->cols());
      v.emplace_back(p->rows(), p->cols());
    }
    step = 0;
  }
};

inline void adam_step(const std::vector<Dense*>& params, const std::vector<Dense*>& grads,
                      AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::runtime_error("adam_step: parameter/gradient/state count mismatch");
  }
  ++state.step;
  double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
  double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (size_t k = 0; k < params.size(); ++k) {
    Dense& p = *params[k];
    const Dense& g = *grads[k];
    check_shape(p.same_shape(g) && p.same_shape(state.m[k]), "adam_step");
    for (size_t i = 0; i < p.size(); ++i) {
      double gi = g.raw()[i];
      double& mi = state.m[k].raw()[i];
      double& vi = state.v[k].raw()[i];
      mi = state.beta1 * mi + (1.0 - state.beta1) * gi;
      vi = state.beta2 * vi + (1.0 - state.beta2) * gi * gi;
      double mhat = mi / bc1;
      double vhat = vi / bc2;
      p.raw()[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace netrank
