#pragma once

// Small dense containers and linear algebra generic over the scalar type, so
// the same code runs on doubles and on jets.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "solgeom/error.hpp"
#include "solgeom/jet.hpp"

namespace solgeom {

/// Square n x n matrix, row-major.
template <typename T>
class Mat {
 public:
  Mat() = default;
  Mat(int n, const T& fill) : n_(n), a_(static_cast<std::size_t>(n * n), fill) {}

  int size() const { return n_; }
  T& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  const T& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
  std::span<T> data() { return a_; }
  std::span<const T> data() const { return a_; }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

using JetMatrix = Mat<Jet>;
using JetVector = std::vector<Jet>;

/// Rank-3 array T[k][i][j] of size n^3, used for Christoffel symbols Gamma^k_ij.
template <typename T>
class Arr3 {
 public:
  Arr3() = default;
  Arr3(int n, const T& fill) : n_(n), a_(static_cast<std::size_t>(n * n * n), fill) {}
  int size() const { return n_; }
  T& operator()(int k, int i, int j) { return a_[static_cast<std::size_t>((k * n_ + i) * n_ + j)]; }
  const T& operator()(int k, int i, int j) const {
    return a_[static_cast<std::size_t>((k * n_ + i) * n_ + j)];
  }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

/// Rank-4 array T[l][i][j][k] of size n^4 (Riemann R^l_ijk).
template <typename T>
class Arr4 {
 public:
  Arr4() = default;
  Arr4(int n, const T& fill) : n_(n), a_(static_cast<std::size_t>(n * n * n * n), fill) {}
  int size() const { return n_; }
  T& operator()(int l, int i, int j, int k) {
    return a_[static_cast<std::size_t>(((l * n_ + i) * n_ + j) * n_ + k)];
  }
  const T& operator()(int l, int i, int j, int k) const {
    return a_[static_cast<std::size_t>(((l * n_ + i) * n_ + j) * n_ + k)];
  }

 private:
  int n_ = 0;
  std::vector<T> a_;
};

/// Pivoted Gauss-Jordan inverse; pivots chosen by magnitude of the value
/// (constant term for jets), so indefinite matrices are fine. Also returns
/// the determinant's value.
template <typename T>
Mat<T> invert(const Mat<T>& m, double* det_value = nullptr) {
  const int n = m.size();
  Mat<T> a = m;
  Mat<T> inv(n, m(0, 0) * 0.0);
  for (int i = 0; i < n; ++i) inv(i, i) = inv(i, i) + 1.0;
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(value_of(a(col, col)));
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(value_of(a(r, col)));
      if (v > best) best = v, pivot = r;
    }
    if (best == 0.0) throw DegenerateMetric("singular matrix");
    if (pivot != col) {
      for (int c = 0; c < n; ++c) {
        std::swap(a(col, c), a(pivot, c));
        std::swap(inv(col, c), inv(pivot, c));
      }
      det = -det;
    }
    det *= value_of(a(col, col));
    const T scale = 1.0 / a(col, col);
    for (int c = 0; c < n; ++c) {
      a(col, c) = a(col, c) * scale;
      inv(col, c) = inv(col, c) * scale;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      for (int c = 0; c < n; ++c) {
        a(r, c) = a(r, c) - f * a(col, c);
        inv(r, c) = inv(r, c) - f * inv(col, c);
      }
    }
  }
  if (det_value) *det_value = det;
  return inv;
}

/// <S,T> = g^{ik} g^{jl} S_ij T_kl.
template <typename T>
T hs_inner(const Mat<T>& ginv, const Mat<T>& s, const Mat<T>& t) {
  const int n = ginv.size();
  // (g^-1 S)^i_j then contract with (g^-1 T)^j_i
  Mat<T> a(n, ginv(0, 0) * 0.0), b(n, ginv(0, 0) * 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        a(i, j) = a(i, j) + ginv(i, k) * s(k, j);
        b(i, j) = b(i, j) + ginv(i, k) * t(k, j);
      }
  T sum = ginv(0, 0) * 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) sum = sum + a(i, j) * b(j, i);
  return sum;
}

/// g^{ij} S_ij.
template <typename T>
T trace_with(const Mat<T>& ginv, const Mat<T>& s) {
  T sum = ginv(0, 0) * 0.0;
  for (int i = 0; i < ginv.size(); ++i)
    for (int j = 0; j < ginv.size(); ++j) sum = sum + ginv(i, j) * s(i, j);
  return sum;
}

inline Eigen::MatrixXd values(const JetMatrix& m) {
  Eigen::MatrixXd out(m.size(), m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) out(i, j) = m(i, j).value();
  return out;
}

inline Eigen::VectorXd values(const JetVector& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].value();
  return out;
}

inline Mat<double> to_mat(const Eigen::MatrixXd& m) {
  Mat<double> out(static_cast<int>(m.rows()), 0.0);
  for (int i = 0; i < out.size(); ++i)
    for (int j = 0; j < out.size(); ++j) out(i, j) = m(i, j);
  return out;
}

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd out(m.size(), m.size());
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) out(i, j) = m(i, j);
  return out;
}

}  // namespace solgeom
