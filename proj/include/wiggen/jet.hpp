#pragma once

// Truncated multivariate power-series ("jet") arithmetic over an arbitrary
// coefficient ring. A jet stores the Taylor coefficients of a function of a
// set of named generating parameters around per-variable expansion centers;
// arithmetic is exact up to the per-variable truncation degrees. Derivatives
// at the center are read off the coefficients, which is what turns one
// closed-form generating function into the whole family it generates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wiggen {

using cplx = std::complex<double>;

// Canonical generating-parameter names used by the state/subtraction layers.
inline constexpr std::string_view kEta = "eta";            // ladder tag
inline constexpr std::string_view kEtaConj = "eta_conj";   // formally independent conjugate tag
inline constexpr std::string_view kTapVar = "J";           // tap-detector projector parameter
inline constexpr std::string_view kCountVar = "K";         // photon-statistics projector parameter
inline constexpr std::string_view kFockVar = "nu";         // Fock-family parameter

/// One generating parameter: name, truncation degree, expansion center.
struct JetVar {
  std::string name;
  int order = 0;
  cplx center = 0.0;

  bool operator==(const JetVar&) const = default;
};

/// Shape of a jet: an ordered list of variables. Jets are composable in
/// arithmetic only when their spaces compare equal (same names, orders and
/// centers, in the same order). A space with no variables is a scalar ring.
class JetSpace {
 public:
  JetSpace() : p_(make({})) {}

  explicit JetSpace(std::vector<JetVar> vars) : p_(make(std::move(vars))) {}

  JetSpace(std::initializer_list<JetVar> vars)
      : p_(make(std::vector<JetVar>(vars))) {}

  int dim() const { return static_cast<int>(p_->vars.size()); }
  int size() const { return p_->size; }
  const JetVar& var(int i) const { return p_->vars[i]; }
  const std::vector<JetVar>& vars() const { return p_->vars; }

  /// Position of a variable by name, or -1.
  int index_of(std::string_view name) const {
    for (int i = 0; i < dim(); ++i)
      if (p_->vars[i].name == name) return i;
    return -1;
  }

  int require(std::string_view name) const {
    int i = index_of(name);
    if (i < 0)
      throw std::invalid_argument("jet space has no variable named '" +
                                  std::string(name) + "'");
    return i;
  }

  bool contains(std::string_view name) const { return index_of(name) >= 0; }

  /// Flat offset of a multi-index; throws when out of the truncation bounds.
  int flat(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != dim())
      throw std::invalid_argument("multi-index rank does not match jet space");
    int k = 0;
    for (int i = 0; i < dim(); ++i) {
      if (idx[i] < 0 || idx[i] > p_->vars[i].order)
        throw std::out_of_range(
            "multi-index exceeds truncation order of variable '" +
            p_->vars[i].name + "' (increase the jet order)");
      k += idx[i] * p_->strides[i];
    }
    return k;
  }

  /// Exponent of variable i at flat offset k.
  int digit(int k, int i) const { return p_->digits[k * dim() + i]; }

  bool operator==(const JetSpace& o) const {
    return p_ == o.p_ || p_->vars == o.p_->vars;
  }
  bool operator!=(const JetSpace& o) const { return !(*this == o); }

 private:
  struct Impl {
    std::vector<JetVar> vars;
    std::vector<int> strides;
    std::vector<int> digits;  // size * dim lookup table
    int size = 1;
  };

  static std::shared_ptr<const Impl> make(std::vector<JetVar> vars) {
    auto impl = std::make_shared<Impl>();
    for (const auto& v : vars) {
      if (v.order < 0)
        throw std::invalid_argument("jet truncation order must be >= 0");
      for (const auto& w : impl->vars)
        if (w.name == v.name)
          throw std::invalid_argument("duplicate jet variable '" + v.name +
                                      "'");
      impl->vars.push_back(v);
    }
    impl->strides.resize(impl->vars.size());
    int s = 1;
    for (size_t i = 0; i < impl->vars.size(); ++i) {
      impl->strides[i] = s;
      s *= impl->vars[i].order + 1;
    }
    impl->size = s;
    const int d = static_cast<int>(impl->vars.size());
    impl->digits.resize(static_cast<size_t>(impl->size) * std::max(d, 1));
    for (int k = 0; k < impl->size; ++k) {
      int rem = k;
      for (int i = d - 1; i >= 0; --i) {
        impl->digits[k * d + i] = rem / impl->strides[i];
        rem %= impl->strides[i];
      }
    }
    return impl;
  }

  std::shared_ptr<const Impl> p_;
};

namespace detail {
inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}
}  // namespace detail

/// Truncated power series with coefficients in C (complex scalars by
/// default; any commutative ring with +, *, scaling by cplx works, which is
/// how symbolic polynomial coefficients are slotted in).
template <class C = cplx>
class Jet {
 public:
  // a jet over the empty space: a plain scalar
  Jet() : space_(), c_(1, C{}) {}

  explicit Jet(JetSpace space)
      : space_(std::move(space)), c_(static_cast<size_t>(space_.size()), C{}) {}

  static Jet constant(JetSpace space, C v) {
    Jet j(std::move(space));
    j.c_[0] = std::move(v);
    return j;
  }

  const JetSpace& space() const { return space_; }

  C& at(int k) { return c_[static_cast<size_t>(k)]; }
  const C& at(int k) const { return c_[static_cast<size_t>(k)]; }

  /// Taylor coefficient at a multi-index.
  const C& coeff(std::span<const int> idx) const { return c_[space_.flat(idx)]; }
  const C& coeff(std::initializer_list<int> idx) const {
    return coeff(std::span<const int>(idx.begin(), idx.size()));
  }
  C& coeff(std::span<const int> idx) { return c_[space_.flat(idx)]; }
  C& coeff(std::initializer_list<int> idx) {
    return coeff(std::span<const int>(idx.begin(), idx.size()));
  }

  /// Derivative at the expansion center: coefficient times the factorials of
  /// the multi-index. Callers wanting Taylor coefficients use coeff().
  C deriv(std::span<const int> idx) const {
    double f = 1.0;
    for (int e : idx) f *= detail::factorial(e);
    return coeff(idx) * cplx(f);
  }
  C deriv(std::initializer_list<int> idx) const {
    return deriv(std::span<const int>(idx.begin(), idx.size()));
  }

  /// Constant term (value of the series at the expansion center).
  const C& value() const { return c_[0]; }

  Jet& operator+=(const Jet& o) {
    check_space(o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    check_space(o);
    for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  Jet operator-() const {
    Jet r(space_);
    for (size_t k = 0; k < c_.size(); ++k) r.c_[k] = -c_[k];
    return r;
  }

  Jet& operator*=(const cplx& s) {
    for (auto& v : c_) v = v * s;
    return *this;
  }
  friend Jet operator*(Jet a, const cplx& s) { return a *= s; }
  friend Jet operator*(const cplx& s, Jet a) { return a *= s; }

  /// Scale every coefficient by a ring element (used to fold monomials in).
  Jet scaled_by(const C& s) const {
    Jet r(space_);
    for (size_t k = 0; k < c_.size(); ++k) r.c_[k] = c_[k] * s;
    return r;
  }

  Jet& operator+=(const cplx& s) {
    c_[0] += C{} + s;  // C must accept cplx addition via construction
    return *this;
  }

  /// Truncated Cauchy product; terms past the truncation bounds are dropped.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.check_space(b);
    const JetSpace& sp = a.space_;
    const int d = sp.dim();
    const int n = sp.size();
    Jet r(sp);
    for (int ia = 0; ia < n; ++ia) {
      if (a.c_[ia] == C{}) continue;
      for (int ib = 0; ib < n; ++ib) {
        if (b.c_[ib] == C{}) continue;
        bool ok = true;
        for (int i = 0; i < d; ++i) {
          if (sp.digit(ia, i) + sp.digit(ib, i) > sp.var(i).order) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        // mixed-radix addition without per-digit overflow is plain addition
        r.c_[ia + ib] += a.c_[ia] * b.c_[ib];
      }
    }
    return r;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }

  bool operator==(const Jet& o) const {
    return space_ == o.space_ && c_ == o.c_;
  }

  /// Apply f to every coefficient, possibly changing the coefficient ring.
  template <class C2, class F>
  Jet<C2> map_coeffs(F&& f) const {
    Jet<C2> r(space_);
    for (int k = 0; k < space_.size(); ++k) r.at(k) = f(c_[k]);
    return r;
  }

  /// Largest nonzero total degree the truncation can hold.
  int max_total_order() const {
    int t = 0;
    for (const auto& v : space_.vars()) t += v.order;
    return t;
  }

 private:
  void check_space(const Jet& o) const {
    if (space_ != o.space_)
      throw std::invalid_argument("jet spaces differ; operands not composable");
  }

  JetSpace space_;
  std::vector<C> c_;
};

/// The series (center + delta) of a named variable: constant term equal to
/// the variable's expansion center, unit coefficient on its first power.
inline Jet<cplx> jet_variable(const JetSpace& space, std::string_view name) {
  int i = space.require(name);
  Jet<cplx> j(space);
  j.at(0) = space.var(i).center;
  if (space.var(i).order >= 1) {
    std::vector<int> idx(space.dim(), 0);
    idx[i] = 1;
    j.at(space.flat(idx)) = 1.0;
  }
  return j;
}

/// exp of a nilpotent jet (zero constant term), any coefficient ring.
template <class C>
Jet<C> jet_exp_nilpotent(const Jet<C>& a) {
  if (!(a.value() == C{}))
    throw std::invalid_argument("jet_exp_nilpotent requires zero constant term");
  Jet<C> one = Jet<C>::constant(a.space(), C{} + cplx(1.0));
  Jet<C> sum = one;
  Jet<C> term = one;
  const int kmax = a.max_total_order();
  for (int k = 1; k <= kmax; ++k) {
    term = term * a;
    term *= cplx(1.0 / k);
    sum += term;
  }
  return sum;
}

/// exp: exact on the constant term, truncated series on the nilpotent part.
inline Jet<cplx> jet_exp(const Jet<cplx>& a) {
  Jet<cplx> nil = a;
  nil.at(0) = 0.0;
  Jet<cplx> r = jet_exp_nilpotent(nil);
  r *= std::exp(a.value());
  return r;
}

namespace detail {
// (c0 + n)^p for nilpotent n via the binomial series around the principal
// value of c0^p. Valid for any real p; requires c0 != 0.
inline Jet<cplx> jet_binomial_pow(const Jet<cplx>& a, double p,
                                  std::string_view what) {
  cplx c0 = a.value();
  if (std::abs(c0) == 0.0)
    throw std::domain_error(std::string("singular jet: ") + std::string(what) +
                            " needs a nonzero constant term");
  Jet<cplx> rel = a;
  rel.at(0) = 0.0;
  rel *= 1.0 / c0;  // n / c0
  Jet<cplx> one = Jet<cplx>::constant(a.space(), 1.0);
  Jet<cplx> sum = one;
  Jet<cplx> term = one;
  const int kmax = a.max_total_order();
  for (int k = 1; k <= kmax; ++k) {
    term = term * rel;
    term *= cplx((p - k + 1) / k);
    sum += term;
  }
  sum *= std::pow(c0, p);
  return sum;
}
}  // namespace detail

inline Jet<cplx> jet_inv(const Jet<cplx>& a) {
  return detail::jet_binomial_pow(a, -1.0, "inverse");
}

/// Principal inverse square root anchored at the constant term.
inline Jet<cplx> jet_inv_sqrt(const Jet<cplx>& a) {
  return detail::jet_binomial_pow(a, -0.5, "inverse square root");
}

/// Fix one variable's exponent to k and drop it from the space;
/// coefficients pick up the k! of the extracted derivative.
template <class C>
Jet<C> jet_extract_partial(const Jet<C>& a, std::string_view name, int k) {
  const JetSpace& sp = a.space();
  int vi = sp.require(name);
  if (k < 0 || k > sp.var(vi).order)
    throw std::out_of_range("partial extraction order exceeds truncation");
  std::vector<JetVar> rest;
  for (int i = 0; i < sp.dim(); ++i)
    if (i != vi) rest.push_back(sp.var(i));
  Jet<C> r{JetSpace(rest)};
  const double f = detail::factorial(k);
  std::vector<int> idx(sp.dim(), 0);
  for (int kr = 0; kr < r.space().size(); ++kr) {
    int j = 0;
    for (int i = 0; i < sp.dim(); ++i)
      idx[i] = (i == vi) ? k : r.space().digit(kr, j++);
    r.at(kr) = a.coeff(idx) * cplx(f);
  }
  return r;
}

/// Embed a jet into a superspace that contains all of its variables
/// (matched by name, order and center); new variables get exponent zero.
template <class C>
Jet<C> jet_extend(const Jet<C>& a, const JetSpace& super) {
  const JetSpace& sp = a.space();
  std::vector<int> pos(sp.dim());
  for (int i = 0; i < sp.dim(); ++i) {
    int j = super.require(sp.var(i).name);
    if (!(super.var(j) == sp.var(i)))
      throw std::invalid_argument("jet_extend: variable '" + sp.var(i).name +
                                  "' differs between spaces");
    pos[i] = j;
  }
  Jet<C> r(super);
  std::vector<int> idx(super.dim(), 0);
  for (int k = 0; k < sp.size(); ++k) {
    std::fill(idx.begin(), idx.end(), 0);
    for (int i = 0; i < sp.dim(); ++i) idx[pos[i]] = sp.digit(k, i);
    r.at(super.flat(idx)) = a.at(k);
  }
  return r;
}

/// Largest absolute coefficient difference between two complex jets.
inline double max_coeff_distance(const Jet<cplx>& a, const Jet<cplx>& b) {
  if (a.space() != b.space())
    throw std::invalid_argument("max_coeff_distance: jet spaces differ");
  double m = 0.0;
  for (int k = 0; k < a.space().size(); ++k)
    m = std::max(m, std::abs(a.at(k) - b.at(k)));
  return m;
}

}  // namespace wiggen
