#pragma once

// Truncated multivariate Taylor series ("jets").
//
// A Jet of dimension d and order K stores the Taylor coefficients c_alpha for
// every multi-index |alpha| <= K in graded-lexicographic order, so that
//   f(p + eps) = sum_alpha c_alpha eps^alpha + O(|eps|^{K+1}).
// Partial derivatives are alpha! * c_alpha.
//
// Besides the storage order K every jet tracks how many of its orders are
// exact ("valid" order). Seeded coordinates and constants are exact to K;
// differentiating a jet lowers the valid order by one. Binary operations take
// the minimum. Asking for a derivative beyond the valid order throws
// InsufficientOrder, which is how a too-small K surfaces to callers.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace solgeom {

inline constexpr int kDefaultJetOrder = 4;
inline constexpr int kMaxJetDim = 8;

using MultiIndex = std::vector<int>;

/// Index tables shared by all jets of the same (dim, order).
struct JetLayout {
  int dim = 0;
  int order = 0;
  std::vector<MultiIndex> indices;           // graded-lex
  std::vector<int> degree;                   // |alpha| per slot
  std::vector<std::uint32_t> mul_a, mul_b, mul_out;  // convolution triples
  std::vector<std::vector<int>> shift;       // shift[i][slot] = slot of alpha+e_i, or -1
  std::vector<double> factorial;             // alpha! per slot

  std::size_t size() const { return indices.size(); }
  int find(const MultiIndex& alpha) const;  // -1 if |alpha| > order

  static const JetLayout& get(int dim, int order);
};

class Jet {
 public:
  Jet() = default;
  Jet(int dim, int order, double value = 0.0);

  static Jet constant(int dim, int order, double value) { return Jet(dim, order, value); }
  static Jet constant_like(const Jet& like, double value) {
    return Jet(like.dim(), like.order(), value);
  }

  int dim() const { return layout_->dim; }
  int order() const { return layout_->order; }
  int valid_order() const { return valid_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double coeff(const MultiIndex& alpha) const;

  /// Constant term: the value at the expansion point.
  double value() const { return coeffs_.empty() ? 0.0 : coeffs_[0]; }

  /// alpha! * c_alpha. Throws InsufficientOrder when |alpha| exceeds the valid order.
  double partial(const MultiIndex& alpha) const;
  /// First partial d/dx_i at the point.
  double partial(int var) const;

  /// The jet of d/dx_var of this function; valid order drops by one.
  Jet derivative(int var) const;

  bool is_constant() const;
  const JetLayout& layout() const { return *layout_; }
  void set_valid_order(int v) { valid_ = v; }

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator*=(const Jet& o);
  Jet& operator/=(const Jet& o);
  Jet& operator+=(double c);
  Jet& operator-=(double c);
  Jet& operator*=(double c);
  Jet& operator/=(double c);

 private:
  friend Jet operator*(const Jet& a, const Jet& b);
  void check_compatible(const Jet& o) const;

  const JetLayout* layout_ = nullptr;
  std::vector<double> coeffs_;
  int valid_ = 0;
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(Jet a);
Jet operator+(Jet a, double c);
Jet operator+(double c, Jet a);
Jet operator-(Jet a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(Jet a, double c);
Jet operator*(double c, Jet a);
Jet operator/(Jet a, double c);
Jet operator/(double c, const Jet& a);

Jet reciprocal(const Jet& a);
Jet sqrt(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet tanh(const Jet& a);
/// a^p for a real exponent; requires a positive constant term.
Jet pow(const Jet& a, double p);
/// a^n by repeated multiplication; defined for any constant term (n >= 0),
/// nonzero constant term when n < 0.
Jet ipow(const Jet& a, int n);
/// a^b = exp(b log a).
Jet pow(const Jet& a, const Jet& b);

/// One jet per coordinate: coords[i] + eps_i, truncated at `order`.
std::vector<Jet> seed_point(std::span<const double> coords, int order = kDefaultJetOrder);

/// Scalar helpers so generic code can treat double and Jet alike.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& j) { return j.value(); }

}  // namespace solgeom
