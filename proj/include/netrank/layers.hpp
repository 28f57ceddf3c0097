#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "netrank/dense.hpp"
#include "netrank/rng.hpp"

namespace netrank {

enum class Mode { Train, Infer };
enum class Activation { Relu, Tanh };

// Symmetric uniform init scaled by fan-in/fan-out.
inline void glorot_init(Dense& w, int fan_in, int fan_out, Rng& rng) {
  double bound = std::sqrt(6.0 / double(fan_in + fan_out));
  for (double& v : w.raw()) v = rng.uniform(-bound, bound);
}

// y = x * W^T + b, rows of x are samples. Backward fills dW/db and returns
// the input gradient.
struct AffineLayer {
  Dense W;   // out x in
  Dense b;   // out x 1
  Dense dW, db;
  Dense x_cache;

  void init(int in_dim, int out_dim, Rng& rng) {
    W = Dense(out_dim, in_dim);
    b = Dense(out_dim, 1);
    glorot_init(W, in_dim, out_dim, rng);
    dW = Dense(out_dim, in_dim);
    db = Dense(out_dim, 1);
  }

  Dense forward(const Dense& x) {
    check_shape(x.cols() == W.cols(), "affine_forward");
    x_cache = x;
    Dense y = matmul_nt(x, W);
    for (int i = 0; i < y.rows(); ++i) {
      for (int j = 0; j < y.cols(); ++j) y.at(i, j) += b.at(j, 0);
    }
    return y;
  }

  Dense backward(const Dense& gy) {
    check_shape(gy.rows() == x_cache.rows() && gy.cols() == W.rows(), "affine_backward");
    dW = matmul_tn(gy, x_cache);
    db.fill(0.0);
    for (int i = 0; i < gy.rows(); ++i) {
      for (int j = 0; j < gy.cols(); ++j) db.at(j, 0) += gy.at(i, j);
    }
    return matmul(gy, W);
  }

  std::vector<Dense*> params() { return {&W, &b}; }
  std::vector<Dense*> grads() { return {&dW, &db}; }
};

// ReLU with subgradient 0 at exactly 0.
struct ReluLayer {
  Dense x_cache;
  Dense forward(const Dense& x) {
    x_cache = x;
    Dense y = x;
    for (double& v : y.raw()) v = v > 0.0 ? v : 0.0;
    return y;
  }
  Dense backward(const Dense& gy) {
    check_shape(gy.same_shape(x_cache), "relu_backward");
    Dense gx = gy;
    for (size_t i = 0; i < gx.size(); ++i) {
      if (!(x_cache.raw()[i] > 0.0)) gx.raw()[i] = 0.0;
    }
    return gx;
  }
};

struct TanhLayer {
  Dense y_cache;
  Dense forward(const Dense& x) {
    Dense y = x;
    for (double& v : y.raw()) v = std::tanh(v);
    y_cache = y;
    return y;
  }
  Dense backward(const Dense& gy) {
    check_shape(gy.same_shape(y_cache), "tanh_backward");
    Dense gx = gy;
    for (size_t i = 0; i < gx.size(); ++i) {
      double y = y_cache.raw()[i];
      gx.raw()[i] *= 1.0 - y * y;
    }
    return gx;
  }
};

inline Dense activation(Activation kind, const Dense& x) {
  Dense y = x;
  if (kind == Activation::Relu) {
    for (double& v : y.raw()) v = v > 0.0 ? v : 0.0;
  } else {
    for (double& v : y.raw()) v = std::tanh(v);
  }
  return y;
}

// Row softmax with max subtraction; rows sum to 1 to tight tolerance even
// for large logits.
inline Dense softmax_rows(const Dense& x) {
  Dense y = x;
  for (int i = 0; i < x.rows(); ++i) {
    auto row = y.row(i);
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : row) v /= sum;
  }
  return y;
}

// Inverted dropout: train mode zeroes entries with probability `rate` and
// scales survivors by 1/(1-rate); infer mode is the identity.
struct DropoutLayer {
  double rate = 0.5;
  Dense mask;

  Dense forward(const Dense& x, Mode mode, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::runtime_error("dropout: rate must be in [0,1)");
    if (mode == Mode::Infer || rate == 0.0) {
      mask = Dense(x.rows(), x.cols(), 1.0);
      return x;
    }
    double keep = 1.0 - rate;
    mask = Dense(x.rows(), x.cols());
    Dense y = x;
    for (size_t i = 0; i < y.size(); ++i) {
      double m = rng.uniform() < rate ? 0.0 : 1.0 / keep;
      mask.raw()[i] = m;
      y.raw()[i] *= m;
    }
    return y;
  }

  Dense backward(const Dense& gy) const {
    check_shape(gy.same_shape(mask), "dropout_backward");
    Dense gx = gy;
    for (size_t i = 0; i < gx.size(); ++i) gx.raw()[i] *= mask.raw()[i];
    return gx;
  }
};

inline Dense dropout(const Dense& x, double rate, Mode mode, Rng& rng) {
  DropoutLayer d;
  d.rate = rate;
  return d.forward(x, mode, rng);
}

// Mean cross-entropy over rows with target >= 0, computed from logits via
// log-sum-exp so finite logits never produce a non-finite loss.
inline double cross_entropy_masked(const Dense& logits, const std::vector<int>& target,
                                   int* count_out = nullptr) {
  check_shape(int(target.size()) == logits.rows(), "cross_entropy_masked");
  double loss = 0.0;
  int count = 0;
  for (int i = 0; i < logits.rows(); ++i) {
    int t = target[size_t(i)];
    if (t < 0) continue;
    auto row = logits.row(i);
    double mx = row[0];
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - mx);
    loss += (mx + std::log(sum)) - row[size_t(t)];
    ++count;
  }
  if (count == 0) throw std::runtime_error("cross_entropy_masked: no targets");
  if (count_out) *count_out = count;
  return loss / double(count);
}

// Gradient of the masked mean cross-entropy w.r.t. the pre-softmax logits.
inline Dense cross_entropy_backward(const Dense& logits, const std::vector<int>& target) {
  int count = 0;
  for (int t : target) {
    if (t >= 0) ++count;
  }
  if (count == 0) throw std::runtime_error("cross_entropy_backward: no targets");
  Dense probs = softmax_rows(logits);
  Dense g(logits.rows(), logits.cols());
  for (int i = 0; i < logits.rows(); ++i) {
    int t = target[size_t(i)];
    if (t < 0) continue;
    for (int j = 0; j < logits.cols(); ++j) {
      g.at(i, j) = (probs.at(i, j) - (j == t ? 1.0 : 0.0)) / double(count);
    }
  }
  return g;
}

}  // namespace netrank
