#pragma once

// Finite-difference re-implementation of the geometric quantities, used only
// by tests as an independent oracle for the jet engine. Everything here works
// on plain double-valued functions: derivatives come from 4th-order central
// differences (nested for higher derivatives), never from jets.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using MetricFn = std::function<MatX(const Vec&)>;
using VecFn = std::function<Vec(const Vec&)>;
using ScalarFn = std::function<double(const Vec&)>;

inline constexpr double kStep = 1e-3;

/// d/dx_k of any value-returning function via the 5-point stencil.
template <typename F>
auto diff(const F& f, const Vec& x, int k, double h = kStep) -> decltype(f(x)) {
  Vec a = x, b = x, c = x, d = x;
  a(k) += 2 * h;
  b(k) += h;
  c(k) -= h;
  d(k) -= 2 * h;
  return (-f(a) + 8.0 * f(b) - 8.0 * f(c) + f(d)) / (12.0 * h);
}

/// Gamma[k](i, j) = Gamma^k_ij.
inline std::vector<MatX> christoffel(const MetricFn& g, const Vec& x) {
  const int n = static_cast<int>(x.size());
  MatX ginv = g(x).inverse();
  std::vector<MatX> dg;
  for (int k = 0; k < n; ++k) dg.push_back(diff(g, x, k));
  std::vector<MatX> gamma(n, MatX::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
          gamma[k](i, j) += 0.5 * ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
  return gamma;
}

/// Flattened Christoffel symbols so they can be differenced as a vector.
inline Vec christoffel_flat(const MetricFn& g, const Vec& x) {
  const int n = static_cast<int>(x.size());
  auto G = christoffel(g, x);
  Vec out(n * n * n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out((k * n + i) * n + j) = G[k](i, j);
  return out;
}

/// R(l, i, j, k) = R^l_ijk flattened as ((l n + i) n + j) n + k.
inline Vec riemann(const MetricFn& g, const Vec& x) {
  const int n = static_cast<int>(x.size());
  auto G = christoffel(g, x);
  auto flat = [&](const Vec& y) { return christoffel_flat(g, y); };
  std::vector<Vec> dG;
  for (int m = 0; m < n; ++m) dG.push_back(diff(flat, x, m));
  auto dGam = [&](int m, int l, int i, int j) { return dG[m]((l * n + i) * n + j); };
  Vec R = Vec::Zero(n * n * n * n);
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double r = dGam(j, l, k, i) - dGam(k, l, j, i);
          for (int m = 0; m < n; ++m) r += G[l](j, m) * G[m](k, i) - G[l](k, m) * G[m](j, i);
          R(((l * n + i) * n + j) * n + k) = r;
        }
  return R;
}

inline MatX ricci(const MetricFn& g, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec R = riemann(g, x);
  MatX ric = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) ric(i, j) += R(((k * n + i) * n + k) * n + j);
  return ric;
}

inline double scalar_curvature(const MetricFn& g, const Vec& x) {
  return (g(x).inverse() * ricci(g, x)).trace();
}

/// Coordinate formula for L_W T with T given as a function.
inline MatX lie(const VecFn& W, const MetricFn& T, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec w = W(x);
  MatX t = T(x);
  MatX out = MatX::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    out += w(k) * diff(T, x, k);
    Vec dWk = Vec::Zero(n);  // d_i W^k for all i
    for (int i = 0; i < n; ++i) dWk(i) = diff(W, x, i)(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) out(i, j) += t(k, j) * dWk(i) + t(i, k) * dWk(j);
  }
  return out;
}

inline MatX lie_lie(const VecFn& W, const MetricFn& g, const Vec& x) {
  MetricFn lg = [&](const Vec& y) { return lie(W, g, y); };
  return lie(W, lg, x);
}

/// nabla W as a matrix m(i, j) = nabla_j W^i.
inline MatX nabla_vector(const MetricFn& g, const VecFn& W, const Vec& x) {
  const int n = static_cast<int>(x.size());
  auto G = christoffel(g, x);
  Vec w = W(x);
  MatX m(n, n);
  for (int j = 0; j < n; ++j) {
    Vec dj = diff(W, x, j);
    for (int i = 0; i < n; ++i) {
      m(i, j) = dj(i);
      for (int k = 0; k < n; ++k) m(i, j) += G[i](j, k) * w(k);
    }
  }
  return m;
}

inline double divergence(const MetricFn& g, const VecFn& X, const Vec& x) {
  return nabla_vector(g, X, x).trace();
}

/// Closed-form pieces of the trace formula for L_W L_W g.
struct TracePieces {
  double nabla_w_norm2;    // |nabla W|^2
  double div_nabla_w_w;    // div(nabla_W W)
  double ric_ww;           // Ric(W, W)
};

inline TracePieces trace_pieces(const MetricFn& g, const VecFn& W, const Vec& x) {
  MatX gx = g(x);
  MatX ginv = gx.inverse();
  MatX m = nabla_vector(g, W, x);
  TracePieces p{};
  // g_ik g^jl m(i, j) m(k, l)
  p.nabla_w_norm2 = (m.transpose() * gx * m * ginv).trace();
  VecFn nww = [&](const Vec& y) -> Vec { return nabla_vector(g, W, y) * W(y); };
  p.div_nabla_w_w = divergence(g, nww, x);
  Vec w = W(x);
  p.ric_ww = w.dot(ricci(g, x) * w);
  return p;
}

/// Relative comparison with unit floor: |a - b| <= tol * max(1, |b|).
inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

}  // namespace oracle
