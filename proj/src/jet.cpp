#include "solgeom/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "solgeom/error.hpp"

namespace solgeom {
namespace {

void enumerate(int dim, int remaining, MultiIndex& current, int pos,
               std::vector<MultiIndex>& out) {
  if (pos == dim - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    current[pos] = k;
    enumerate(dim, remaining - k, current, pos + 1, out);
  }
}

std::uint64_t encode(const MultiIndex& alpha, int base) {
  std::uint64_t key = 0;
  for (int a : alpha) key = key * static_cast<std::uint64_t>(base) + static_cast<std::uint64_t>(a);
  return key;
}

struct LayoutCache {
  std::mutex mutex;
  std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> layouts;
  std::map<const JetLayout*, std::unordered_map<std::uint64_t, int>> lookup;
};

LayoutCache& cache() {
  static LayoutCache c;
  return c;
}

std::unique_ptr<JetLayout> build_layout(int dim, int order) {
  auto layout = std::make_unique<JetLayout>();
  layout->dim = dim;
  layout->order = order;
  MultiIndex current(static_cast<std::size_t>(dim), 0);
  for (int deg = 0; deg <= order; ++deg) {
    if (dim == 0) {
      if (deg == 0) layout->indices.emplace_back();
      continue;
    }
    enumerate(dim, deg, current, 0, layout->indices);
  }
  const std::size_t n = layout->indices.size();
  layout->degree.resize(n);
  layout->factorial.resize(n);
  std::unordered_map<std::uint64_t, int> slot_of;
  for (std::size_t s = 0; s < n; ++s) {
    const auto& alpha = layout->indices[s];
    layout->degree[s] = std::accumulate(alpha.begin(), alpha.end(), 0);
    double f = 1.0;
    for (int a : alpha)
      for (int k = 2; k <= a; ++k) f *= k;
    layout->factorial[s] = f;
    slot_of.emplace(encode(alpha, order + 1), static_cast<int>(s));
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (layout->degree[a] + layout->degree[b] > order) continue;
      MultiIndex sum = layout->indices[a];
      for (int i = 0; i < dim; ++i) sum[i] += layout->indices[b][i];
      layout->mul_a.push_back(static_cast<std::uint32_t>(a));
      layout->mul_b.push_back(static_cast<std::uint32_t>(b));
      layout->mul_out.push_back(static_cast<std::uint32_t>(slot_of.at(encode(sum, order + 1))));
    }
  }
  layout->shift.assign(static_cast<std::size_t>(dim), std::vector<int>(n, -1));
  for (int i = 0; i < dim; ++i) {
    for (std::size_t s = 0; s < n; ++s) {
      if (layout->degree[s] >= order) continue;
      MultiIndex up = layout->indices[s];
      up[i] += 1;
      layout->shift[i][s] = slot_of.at(encode(up, order + 1));
    }
  }
  return layout;
}

// Evaluates sum_k taylor[k] * (a - a0)^k by Horner's rule.
Jet compose(const Jet& a, const std::vector<double>& taylor) {
  Jet nil = a;
  nil.coeffs()[0] = 0.0;
  Jet result = Jet::constant_like(a, taylor.back());
  result.set_valid_order(a.valid_order());
  for (int k = static_cast<int>(taylor.size()) - 2; k >= 0; --k) {
    result = result * nil;
    result.coeffs()[0] += taylor[static_cast<std::size_t>(k)];
  }
  return result;
}

template <typename Derivs>
std::vector<double> taylor_from_derivatives(int order, Derivs&& nth_derivative) {
  std::vector<double> t(static_cast<std::size_t>(order) + 1);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    t[static_cast<std::size_t>(k)] = nth_derivative(k) / fact;
  }
  return t;
}

}  // namespace

const JetLayout& JetLayout::get(int dim, int order) {
  if (dim < 0 || dim > kMaxJetDim) throw Error("jet dimension out of range: " + std::to_string(dim));
  if (order < 0) throw Error("jet order must be nonnegative");
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  auto key = std::make_pair(dim, order);
  auto it = c.layouts.find(key);
  if (it == c.layouts.end()) {
    auto layout = build_layout(dim, order);
    auto& lookup = c.lookup[layout.get()];
    for (std::size_t s = 0; s < layout->size(); ++s)
      lookup.emplace(encode(layout->indices[s], order + 1), static_cast<int>(s));
    it = c.layouts.emplace(key, std::move(layout)).first;
  }
  return *it->second;
}

int JetLayout::find(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.size()) != dim) throw Error("multi-index has wrong dimension");
  int total = 0;
  for (int a : alpha) {
    if (a < 0) throw Error("multi-index entries must be nonnegative");
    total += a;
  }
  if (total > order) return -1;
  auto& c = cache();
  std::lock_guard<std::mutex> lock(c.mutex);
  return c.lookup.at(this).at(encode(alpha, order + 1));
}

Jet::Jet(int dim, int order, double value)
    : layout_(&JetLayout::get(dim, order)), coeffs_(layout_->size(), 0.0), valid_(order) {
  coeffs_[0] = value;
}

void Jet::check_compatible(const Jet& o) const {
  if (layout_ != o.layout_)
    throw Error("jet arithmetic on mismatched (dim, order)");
}

double Jet::coeff(const MultiIndex& alpha) const {
  int slot = layout_->find(alpha);
  if (slot < 0) throw InsufficientOrder(std::accumulate(alpha.begin(), alpha.end(), 0), order());
  return coeffs_[static_cast<std::size_t>(slot)];
}

double Jet::partial(const MultiIndex& alpha) const {
  int total = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (total > valid_) throw InsufficientOrder(order() - valid_ + total, order());
  int slot = layout_->find(alpha);
  return layout_->factorial[static_cast<std::size_t>(slot)] * coeffs_[static_cast<std::size_t>(slot)];
}

double Jet::partial(int var) const {
  if (valid_ < 1) throw InsufficientOrder(order() - valid_ + 1, order());
  // First-order slots follow the constant slot in graded-lex order.
  return coeffs_[static_cast<std::size_t>(1 + var)];
}

Jet Jet::derivative(int var) const {
  if (var < 0 || var >= dim()) throw Error("derivative variable out of range");
  if (valid_ < 1) throw InsufficientOrder(order() - valid_ + 1, order());
  Jet out(dim(), order(), 0.0);
  const auto& shift = layout_->shift[static_cast<std::size_t>(var)];
  for (std::size_t s = 0; s < coeffs_.size(); ++s) {
    int up = shift[s];
    if (up < 0) continue;
    const int exponent = layout_->indices[static_cast<std::size_t>(up)][static_cast<std::size_t>(var)];
    out.coeffs_[s] = exponent * coeffs_[static_cast<std::size_t>(up)];
  }
  out.valid_ = valid_ - 1;
  return out;
}

bool Jet::is_constant() const {
  for (std::size_t s = 1; s < coeffs_.size(); ++s)
    if (coeffs_[s] != 0.0) return false;
  return true;
}

Jet& Jet::operator+=(const Jet& o) {
  check_compatible(o);
  for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] += o.coeffs_[s];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  check_compatible(o);
  for (std::size_t s = 0; s < coeffs_.size(); ++s) coeffs_[s] -= o.coeffs_[s];
  valid_ = std::min(valid_, o.valid_);
  return *this;
}

Jet& Jet::operator*=(const Jet& o) {
  *this = *this * o;
  return *this;
}

Jet& Jet::operator/=(const Jet& o) {
  *this = *this * reciprocal(o);
  return *this;
}

Jet& Jet::operator+=(double c) {
  coeffs_[0] += c;
  return *this;
}

Jet& Jet::operator-=(double c) {
  coeffs_[0] -= c;
  return *this;
}

Jet& Jet::operator*=(double c) {
  for (double& x : coeffs_) x *= c;
  return *this;
}

Jet& Jet::operator/=(double c) {
  if (c == 0.0) throw DomainError("division by zero");
  for (double& x : coeffs_) x /= c;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  a.check_compatible(b);
  Jet out(a.dim(), a.order(), 0.0);
  const JetLayout& L = *a.layout_;
  const double* pa = a.coeffs_.data();
  const double* pb = b.coeffs_.data();
  double* po = out.coeffs_.data();
  const std::size_t n = L.mul_a.size();
  for (std::size_t t = 0; t < n; ++t) po[L.mul_out[t]] += pa[L.mul_a[t]] * pb[L.mul_b[t]];
  out.valid_ = std::min(a.valid_, b.valid_);
  return out;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
Jet operator-(Jet a) { return a *= -1.0; }
Jet operator+(Jet a, double c) { return a += c; }
Jet operator+(double c, Jet a) { return a += c; }
Jet operator-(Jet a, double c) { return a -= c; }
Jet operator-(double c, const Jet& a) { return -a + c; }
Jet operator*(Jet a, double c) { return a *= c; }
Jet operator*(double c, Jet a) { return a *= c; }
Jet operator/(Jet a, double c) { return a /= c; }
Jet operator/(double c, const Jet& a) { return reciprocal(a) * c; }

Jet reciprocal(const Jet& a) {
  const double a0 = a.value();
  if (a0 == 0.0) throw DomainError("division by a jet with zero constant term");
  return compose(a, taylor_from_derivatives(a.order(), [a0](int k) {
    // d^k/dx^k x^{-1} = (-1)^k k! x^{-k-1}
    double f = 1.0;
    for (int j = 2; j <= k; ++j) f *= j;
    return ((k % 2) ? -f : f) / std::pow(a0, k + 1);
  }));
}

Jet pow(const Jet& a, double p) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("real power of a jet with nonpositive constant term");
  std::vector<double> t(static_cast<std::size_t>(a.order()) + 1);
  double binom = 1.0;
  for (int k = 0; k <= a.order(); ++k) {
    if (k > 0) binom *= (p - (k - 1)) / k;
    t[static_cast<std::size_t>(k)] = std::pow(a0, p - k) * binom;
  }
  return compose(a, t);
}

Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt of a jet with nonpositive constant term");
  return pow(a, 0.5);
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return compose(a, taylor_from_derivatives(a.order(), [e](int) { return e; }));
}

Jet log(const Jet& a) {
  const double a0 = a.value();
  if (!(a0 > 0.0)) throw DomainError("log of a jet with nonpositive constant term");
  std::vector<double> t(static_cast<std::size_t>(a.order()) + 1);
  t[0] = std::log(a0);
  for (int k = 1; k <= a.order(); ++k)
    t[static_cast<std::size_t>(k)] = ((k % 2) ? 1.0 : -1.0) / (k * std::pow(a0, k));
  return compose(a, t);
}

Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  return compose(a, taylor_from_derivatives(a.order(), [&](int k) { return cycle[k % 4]; }));
}

Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  return compose(a, taylor_from_derivatives(a.order(), [&](int k) { return cycle[k % 4]; }));
}

Jet tan(const Jet& a) {
  if (std::cos(a.value()) == 0.0) throw DomainError("tan at a pole");
  return sin(a) / cos(a);
}

Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, taylor_from_derivatives(a.order(), [&](int k) { return (k % 2) ? c : s; }));
}

Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return compose(a, taylor_from_derivatives(a.order(), [&](int k) { return (k % 2) ? s : c; }));
}

Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }

Jet ipow(const Jet& a, int n) {
  if (n < 0) return reciprocal(ipow(a, -n));
  Jet result = Jet::constant_like(a, 1.0);
  result.set_valid_order(a.valid_order());
  Jet base = a;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

Jet pow(const Jet& a, const Jet& b) { return exp(b * log(a)); }

std::vector<Jet> seed_point(std::span<const double> coords, int order) {
  if (order < 1) throw Error("seed_point requires order >= 1");
  const int dim = static_cast<int>(coords.size());
  std::vector<Jet> out;
  out.reserve(coords.size());
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(coords[static_cast<std::size_t>(i)]))
      throw DomainError("non-finite seed coordinate x" + std::to_string(i + 1));
    Jet j(dim, order, coords[static_cast<std::size_t>(i)]);
    j.coeffs()[static_cast<std::size_t>(1 + i)] = 1.0;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace solgeom
