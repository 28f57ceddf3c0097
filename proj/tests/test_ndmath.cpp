#include <doctest.h>

#include <cmath>
#include <limits>

#include "netrank/dense.hpp"
#include "netrank/grad_check.hpp"
#include "netrank/layers.hpp"
#include "netrank/optim.hpp"
#include "netrank/rng.hpp"

using namespace netrank;

TEST_SUITE_BEGIN("ndmath");

TEST_CASE("affine forward with identity weights") {
  AffineLayer layer;
  Rng rng(1);
  layer.init(2, 2, rng);
  layer.W.fill(0.0);
  layer.W.at(0, 0) = 1.0;
  layer.W.at(1, 1) = 1.0;
  layer.b.at(0, 0) = 1.0;
  layer.b.at(1, 0) = 1.0;
  Dense x(1, 2);
  x.at(0, 0) = 2.0;
  x.at(0, 1) = 3.0;
  Dense y = layer.forward(x);
  CHECK(y.at(0, 0) == 3.0);
  CHECK(y.at(0, 1) == 4.0);

  Dense gy(1, 2, 1.0);
  Dense gx = layer.backward(gy);
  // dW rows equal x, db equals the upstream ones
  CHECK(layer.dW.at(0, 0) == 2.0);
  CHECK(layer.dW.at(0, 1) == 3.0);
  CHECK(layer.dW.at(1, 0) == 2.0);
  CHECK(layer.dW.at(1, 1) == 3.0);
  CHECK(layer.db.at(0, 0) == 1.0);
  CHECK(layer.db.at(1, 0) == 1.0);
  CHECK(gx.at(0, 0) == 1.0);
  CHECK(gx.at(0, 1) == 1.0);
}

TEST_CASE("affine shape mismatch throws") {
  AffineLayer layer;
  Rng rng(1);
  layer.init(3, 2, rng);
  Dense x(1, 4);
  CHECK_THROWS_AS(layer.forward(x), std::runtime_error);
}

TEST_CASE("affine backward matches central finite differences") {
  Rng rng(7);
  AffineLayer layer;
  layer.init(4, 3, rng);
  Dense x(5, 4);
  for (double& v : x.raw()) v = rng.uniform(-1.0, 1.0);
  Dense target(5, 3);
  for (double& v : target.raw()) v = rng.uniform(-1.0, 1.0);

  auto loss_fn = [&]() {
    Dense y = layer.forward(x);
    double s = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
      double d = y.raw()[i] - target.raw()[i];
      s += 0.5 * d * d;
    }
    return s;
  };
  double loss = loss_fn();
  CHECK(std::isfinite(loss));
  Dense y = layer.forward(x);
  Dense gy(5, 3);
  for (size_t i = 0; i < gy.size(); ++i) gy.raw()[i] = y.raw()[i] - target.raw()[i];
  layer.backward(gy);
  double err = grad_check(loss_fn, layer.params(), {&layer.dW, &layer.db}, 1e-5);
  CHECK(err <= 1e-6);
}

TEST_CASE("every layer type passes finite differences at 10 random points") {
  // affine -> relu -> affine -> tanh composite, fresh random point per trial
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    AffineLayer l1, l2;
    l1.init(3, 5, rng);
    l2.init(5, 2, rng);
    ReluLayer relu;
    TanhLayer th;
    Dense x(4, 3), target(4, 2);
    for (double& v : x.raw()) v = rng.uniform(-1.5, 1.5);
    for (double& v : target.raw()) v = rng.uniform(-0.9, 0.9);
    auto loss_fn = [&]() {
      Dense y = th.forward(l2.forward(relu.forward(l1.forward(x))));
      double s = 0.0;
      for (size_t i = 0; i < y.size(); ++i) {
        double d = y.raw()[i] - target.raw()[i];
        s += 0.5 * d * d;
      }
      return s;
    };
    Dense y = th.forward(l2.forward(relu.forward(l1.forward(x))));
    Dense gy(y.rows(), y.cols());
    for (size_t i = 0; i < y.size(); ++i) gy.raw()[i] = y.raw()[i] - target.raw()[i];
    l1.backward(relu.backward(l2.backward(th.backward(gy))));
    double err = grad_check(loss_fn, {&l1.W, &l1.b, &l2.W, &l2.b},
                            {&l1.dW, &l1.db, &l2.dW, &l2.db}, 1e-5);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("grad_check flags a corrupted gradient") {
  Rng rng(9);
  AffineLayer layer;
  layer.init(3, 2, rng);
  Dense x(4, 3);
  for (double& v : x.raw()) v = rng.uniform(0.5, 1.5);
  auto loss_fn = [&]() {
    Dense y = layer.forward(x);
    double s = 0.0;
    for (double v : y.raw()) s += 0.5 * v * v;
    return s;
  };
  Dense y = layer.forward(x);
  layer.backward(y);
  Dense flipped = layer.dW;
  for (double& v : flipped.raw()) v = -v;
  double err = grad_check(loss_fn, {&layer.W}, {&flipped}, 1e-5);
  CHECK(err >= 1.0);
}

TEST_CASE("grad_check rejects a non-finite loss") {
  Dense p(1, 1, 1.0);
  Dense g(1, 1, 0.0);
  auto bad_loss = []() { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(grad_check(bad_loss, {&p}, {&g}, 1e-5), std::runtime_error);
}

TEST_CASE("relu and tanh basics") {
  Dense x(1, 2);
  x.at(0, 0) = -1.0;
  x.at(0, 1) = 2.0;
  Dense r = activation(Activation::Relu, x);
  CHECK(r.at(0, 0) == 0.0);
  CHECK(r.at(0, 1) == 2.0);
  Dense zero(1, 1);
  CHECK(activation(Activation::Tanh, zero).at(0, 0) == 0.0);

  ReluLayer relu;
  relu.forward(x);
  Dense gy(1, 2, 1.0);
  Dense gx = relu.backward(gy);
  CHECK(gx.at(0, 0) == 0.0);  // negative input blocks the gradient
  CHECK(gx.at(0, 1) == 1.0);

  // subgradient at exactly 0 is 0
  Dense at_zero(1, 1, 0.0);
  relu.forward(at_zero);
  Dense g1(1, 1, 1.0);
  CHECK(relu.backward(g1).at(0, 0) == 0.0);

  TanhLayer th;
  Dense ty = th.forward(x);
  for (double v : ty.raw()) CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("softmax rows: symmetry, stability, hand value") {
  Dense x(3, 2);
  x.at(0, 0) = 0.0;
  x.at(0, 1) = 0.0;
  x.at(1, 0) = 1000.0;
  x.at(1, 1) = 1000.0;
  x.at(2, 0) = std::log(2.0);
  x.at(2, 1) = 0.0;
  Dense y = softmax_rows(x);
  CHECK(y.at(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y.at(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y.at(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(y.at(2, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(y.at(2, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) {
    double s = y.at(i, 0) + y.at(i, 1);
    CHECK(std::abs(s - 1.0) <= 1e-9);
  }
}

TEST_CASE("softmax rows sum to 1 and shift invariance (property)") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    Dense x(4, 6);
    for (double& v : x.raw()) v = rng.uniform(-30.0, 30.0);
    Dense y = softmax_rows(x);
    Dense shifted = x;
    for (int i = 0; i < x.rows(); ++i) {
      for (int j = 0; j < x.cols(); ++j) shifted.at(i, j) += 17.25;
    }
    Dense y2 = softmax_rows(shifted);
    for (int i = 0; i < x.rows(); ++i) {
      double s = 0.0;
      for (int j = 0; j < x.cols(); ++j) {
        s += y.at(i, j);
        CHECK(std::abs(y.at(i, j) - y2.at(i, j)) <= 1e-9);
      }
      CHECK(std::abs(s - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("dropout contract") {
  Rng rng(3);
  Dense x(10, 10, 1.0);
  // rate 0 and infer mode are identities
  Rng r1(5);
  Dense y0 = dropout(x, 0.0, Mode::Train, r1);
  CHECK(y0.raw() == x.raw());
  Dense yi = dropout(x, 0.9, Mode::Infer, rng);
  CHECK(yi.raw() == x.raw());
  // same seed gives the same mask
  Rng ra(42), rb(42);
  Dense ya = dropout(x, 0.5, Mode::Train, ra);
  Dense yb = dropout(x, 0.5, Mode::Train, rb);
  CHECK(ya.raw() == yb.raw());
  // rate >= 1 rejected
  Rng rc(1);
  CHECK_THROWS_AS(dropout(x, 1.0, Mode::Train, rc), std::runtime_error);
}

TEST_CASE("inverted dropout preserves expectation within 3 standard errors") {
  Rng rng(123);
  const double rate = 0.5;
  const int trials = 10000;
  double sum = 0.0, sumsq = 0.0;
  Dense ones(1, 100, 1.0);
  for (int t = 0; t < trials; ++t) {
    Dense y = dropout(ones, rate, Mode::Train, rng);
    double mean = 0.0;
    for (double v : y.raw()) mean += v;
    mean /= double(y.size());
    sum += mean;
    sumsq += mean * mean;
  }
  double mean = sum / trials;
  double var = sumsq / trials - mean * mean;
  double se = std::sqrt(var / trials);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se + 1e-12);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  Dense p(2, 2, 1.0);
  Dense g(2, 2, 0.0);
  AdamState st;
  st.init({&p});
  adam_step({&p}, {&g}, st);
  for (double v : p.raw()) CHECK(v == 1.0);
}

TEST_CASE("adam: bias-corrected first step moves by about lr") {
  Dense p(1, 1, 0.5);
  Dense g(1, 1, 1.0);
  AdamState st;
  st.lr = 0.1;
  st.init({&p});
  adam_step({&p}, {&g}, st);
  // mhat = 1, vhat = 1 after correction, so the step is lr/(1+eps)
  CHECK(p.at(0, 0) == doctest::Approx(0.4).epsilon(1e-6));
}

TEST_CASE("adam: identical runs give identical trajectories") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    Dense p(3, 3);
    for (double& v : p.raw()) v = rng.uniform(-1.0, 1.0);
    AdamState st;
    st.init({&p});
    for (int i = 0; i < 25; ++i) {
      Dense g(3, 3);
      for (double& v : g.raw()) v = rng.uniform(-1.0, 1.0);
      adam_step({&p}, {&g}, st);
    }
    return p;
  };
  Dense a = run(77), b = run(77), c = run(78);
  CHECK(a.raw() == b.raw());
  CHECK(a.raw() != c.raw());
}

TEST_CASE("adam shape mismatch throws") {
  Dense p(2, 2), g(2, 3);
  AdamState st;
  st.init({&p});
  CHECK_THROWS_AS(adam_step({&p}, {&g}, st), std::runtime_error);
}

TEST_SUITE_END();
