#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace netrank {

// Row-major dense matrix of 64-bit reals. Rows are samples throughout the
// library; a column vector is (n x 1). Sizes here are desk scale, so all
// math stays in doubles and favors clarity over blocking tricks.
class Dense {
 public:
  Dense() = default;
  Dense(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(size_t(rows) * size_t(cols), fill) {
    if (rows < 0 || cols < 0) throw std::runtime_error("Dense: negative shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t size() const { return data_.size(); }

  double& at(int r, int c) { return data_[size_t(r) * size_t(cols_) + size_t(c)]; }
  double at(int r, int c) const { return data_[size_t(r) * size_t(cols_) + size_t(c)]; }

  std::span<double> row(int r) { return {data_.data() + size_t(r) * size_t(cols_), size_t(cols_)}; }
  std::span<const double> row(int r) const {
    return {data_.data() + size_t(r) * size_t(cols_), size_t(cols_)};
  }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  void fill(double v) { data_.assign(data_.size(), v); }

  bool same_shape(const Dense& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

inline void check_shape(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("shape mismatch: " + what);
}

// C = A * B
inline Dense matmul(const Dense& a, const Dense& b) {
  check_shape(a.cols() == b.rows(), "matmul");
  Dense out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    auto oi = out.row(i);
    for (int k = 0; k < a.cols(); ++k) {
      double aik = ai[size_t(k)];
      if (aik == 0.0) continue;
      auto bk = b.row(k);
      for (int j = 0; j < b.cols(); ++j) oi[size_t(j)] += aik * bk[size_t(j)];
    }
  }
  return out;
}

// C = A * B^T
inline Dense matmul_nt(const Dense& a, const Dense& b) {
  check_shape(a.cols() == b.cols(), "matmul_nt");
  Dense out(a.rows(), b.rows());
  for (int i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    for (int j = 0; j < b.rows(); ++j) {
      auto bj = b.row(j);
      double s = 0.0;
      for (int k = 0; k < a.cols(); ++k) s += ai[size_t(k)] * bj[size_t(k)];
      out.at(i, j) = s;
    }
  }
  return out;
}

// C = A^T * B
inline Dense matmul_tn(const Dense& a, const Dense& b) {
  check_shape(a.rows() == b.rows(), "matmul_tn");
  Dense out(a.cols(), b.cols());
  for (int r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    auto br = b.row(r);
    for (int i = 0; i < a.cols(); ++i) {
      double ari = ar[size_t(i)];
      if (ari == 0.0) continue;
      auto oi = out.row(i);
      for (int j = 0; j < b.cols(); ++j) oi[size_t(j)] += ari * br[size_t(j)];
    }
  }
  return out;
}

inline void add_inplace(Dense& a, const Dense& b, double scale = 1.0) {
  check_shape(a.same_shape(b), "add_inplace");
  for (size_t i = 0; i < a.size(); ++i) a.raw()[i] += scale * b.raw()[i];
}

inline bool all_finite(const Dense& a) {
  for (double v : a.raw()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace netrank
