#pragma once

// Gaussian phase-space forms c*exp(-u|a|^2 - v a^2 - w a*^2 + x a + y a*)
// with coefficients in an arbitrary ring (complex numbers, or jets when the
// form carries generating parameters), polynomial-times-Gaussian states,
// closed-form phase-space integrals and quadrature marginals, and the
// two-mode forms produced by a beam-splitter composition.
//
// Conventions: alpha = (q + i p)/sqrt(2); the phase-space measure is
// d^2alpha = dq dp / (2 pi); the vacuum is 2 exp(-2|alpha|^2) and every
// proper state integrates to one.

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wiggen/jet.hpp"
#include "wiggen/poly2.hpp"

namespace wiggen {

struct PhasePoint {
  double q = 0.0;
  double p = 0.0;

  cplx alpha() const { return cplx(q, p) / std::sqrt(2.0); }

  static PhasePoint from_alpha(cplx a) {
    return {std::sqrt(2.0) * a.real(), std::sqrt(2.0) * a.imag()};
  }
};

enum class Axis { q, p };
enum class Wrt { alpha, alpha_conj };

// ---------------------------------------------------------------------------
// Ring helpers: the same formulas run on complex scalars and on jets.

inline cplx ring_exp(const cplx& z) { return std::exp(z); }
inline cplx ring_inv(const cplx& z) {
  if (std::abs(z) == 0.0) throw std::domain_error("division by zero");
  return 1.0 / z;
}
inline cplx ring_inv_sqrt(const cplx& z) {
  if (std::abs(z) == 0.0) throw std::domain_error("inverse sqrt of zero");
  return 1.0 / std::sqrt(z);
}
inline cplx ring_const_part(const cplx& z) { return z; }
inline cplx ring_from_scalar(const cplx&, cplx v) { return v; }

inline Jet<cplx> ring_exp(const Jet<cplx>& a) { return jet_exp(a); }
inline Jet<cplx> ring_inv(const Jet<cplx>& a) { return jet_inv(a); }
inline Jet<cplx> ring_inv_sqrt(const Jet<cplx>& a) { return jet_inv_sqrt(a); }
inline cplx ring_const_part(const Jet<cplx>& a) { return a.value(); }
inline Jet<cplx> ring_from_scalar(const Jet<cplx>& proto, cplx v) {
  return Jet<cplx>::constant(proto.space(), v);
}

namespace detail {
/// mag is the size of the terms the value was summed from; cancellation can
/// leave rounding noise proportional to that size rather than to the result.
inline double real_checked(cplx z, const char* what, double mag = 0.0) {
  double scale = std::max({1.0, std::abs(z.real()), mag});
  if (std::abs(z.imag()) > 1e-12 * scale)
    throw std::domain_error(std::string(what) +
                            ": imaginary residue exceeds tolerance");
  return z.real();
}
}  // namespace detail

// ---------------------------------------------------------------------------
// GaussianForm

template <class R = cplx>
struct GaussianForm {
  R c, u, v, w, x, y;
};

/// Build a coefficient-wise scalar form in a jet ring.
inline GaussianForm<Jet<cplx>> lift_form(const GaussianForm<cplx>& f,
                                         const JetSpace& space) {
  auto k = [&](cplx z) { return Jet<cplx>::constant(space, z); };
  return {k(f.c), k(f.u), k(f.v), k(f.w), k(f.x), k(f.y)};
}

template <class R>
R evaluate(const GaussianForm<R>& f, PhasePoint pt) {
  cplx a = pt.alpha();
  cplx ac = std::conj(a);
  R e = f.x * a;
  e += f.y * ac;
  e -= f.u * (a * ac);
  e -= f.v * (a * a);
  e -= f.w * (ac * ac);
  return f.c * ring_exp(e);
}

inline double evaluate_real(const GaussianForm<cplx>& f, PhasePoint pt) {
  return detail::real_checked(evaluate(f, pt), "Wigner value");
}

template <class R>
GaussianForm<R> multiply(const GaussianForm<R>& f, const GaussianForm<R>& g) {
  return {f.c * g.c, f.u + g.u, f.v + g.v, f.w + g.w, f.x + g.x, f.y + g.y};
}

/// Substitution alpha -> mu a + nu a* + delta. The starred coefficients give
/// the image of alpha*; for a numeric map they are the complex conjugates,
/// while generating-parameter maps keep them formally independent.
template <class R>
struct AffineMap {
  R mu, nu, delta;
  R mu_c, nu_c, delta_c;
};

template <class R>
GaussianForm<R> affine_substitute(const GaussianForm<R>& f,
                                  const AffineMap<R>& m) {
  const R &u = f.u, &v = f.v, &w = f.w, &x = f.x, &y = f.y;
  const R &mu = m.mu, &nu = m.nu, &de = m.delta;
  const R &muc = m.mu_c, &nuc = m.nu_c, &dec = m.delta_c;
  GaussianForm<R> r{f.c, u, v, w, x, y};
  r.u = u * (mu * muc + nu * nuc) + cplx(2) * (v * (mu * nu) + w * (muc * nuc));
  r.v = u * (mu * nuc) + v * (mu * mu) + w * (nuc * nuc);
  r.w = u * (nu * muc) + v * (nu * nu) + w * (muc * muc);
  r.x = x * mu + y * nuc - u * (mu * dec + de * nuc) -
        cplx(2) * (v * (mu * de) + w * (nuc * dec));
  r.y = x * nu + y * muc - u * (nu * dec + de * muc) -
        cplx(2) * (v * (nu * de) + w * (muc * dec));
  R e = x * de + y * dec - u * (de * dec) - v * (de * de) - w * (dec * dec);
  r.c = f.c * ring_exp(e);
  return r;
}

/// Numeric substitution alpha -> mu a + nu a* + delta with conjugated
/// starred coefficients.
template <class R>
GaussianForm<R> affine_substitute(const GaussianForm<R>& f, cplx mu, cplx nu,
                                  cplx delta) {
  auto k = [&](cplx z) { return ring_from_scalar(f.c, z); };
  AffineMap<R> m{k(mu),            k(nu),            k(delta),
                 k(std::conj(mu)), k(std::conj(nu)), k(std::conj(delta))};
  return affine_substitute(f, m);
}

namespace detail {
/// The full-plane integral converges iff the real part of the quadratic form
/// is positive definite.
inline bool alpha_integrable(cplx u, cplx v, cplx w) {
  double ru = u.real();
  double rs = (v + w).real();
  double id = (v - w).imag();
  return ru + rs > 0.0 && ru * ru - rs * rs - id * id > 0.0;
}

inline void require_alpha_integrable(cplx u, cplx v, cplx w) {
  if (!alpha_integrable(u, v, w))
    throw std::domain_error(
        "phase-space integral diverges: Gaussian quadratic form is not "
        "positive definite");
}
}  // namespace detail

template <class R>
bool integrable(const GaussianForm<R>& f) {
  return detail::alpha_integrable(ring_const_part(f.u), ring_const_part(f.v),
                                  ring_const_part(f.w));
}

/// Closed-form integral over the whole phase plane.
template <class R>
R phase_space_integral(const GaussianForm<R>& f) {
  detail::require_alpha_integrable(ring_const_part(f.u), ring_const_part(f.v),
                                   ring_const_part(f.w));
  R det = f.u * f.u - cplx(4) * (f.v * f.w);
  R e = (f.u * (f.x * f.y) - f.w * (f.x * f.x) - f.v * (f.y * f.y)) *
        ring_inv(det);
  return f.c * ring_inv_sqrt(det) * ring_exp(e);
}

namespace detail {
inline cplx require_kernel_scale(cplx s0) {
  if (!(s0.real() > 0.0))
    throw std::domain_error("kernel scale must have positive real part");
  return s0;
}
}  // namespace detail

/// Integral of f times the diagonal kernel (g/S) exp(-(P/S) |alpha|^2) over
/// the phase plane. S stays a common denominator throughout, so when S and P
/// are first-degree jets every coefficient is polynomial in the parameter
/// and no geometric series enters.
template <class R>
R kernel_integral(const GaussianForm<R>& f, const R& g, const R& S,
                  const R& P) {
  cplx s0 = detail::require_kernel_scale(ring_const_part(S));
  detail::require_alpha_integrable(
      (ring_const_part(f.u) * s0 + ring_const_part(P)) / s0,
      ring_const_part(f.v), ring_const_part(f.w));
  R pu = f.u * S + P;
  R s2 = S * S;
  R det = pu * pu - cplx(4) * ((f.v * f.w) * s2);
  R e = (pu * S * (f.x * f.y) -
         s2 * (f.w * (f.x * f.x) + f.v * (f.y * f.y))) *
        ring_inv(det);
  return f.c * g * ring_inv_sqrt(det) * ring_exp(e);
}

namespace detail {
/// One-axis marginal of a Gaussian form, evaluated at coordinate t on the
/// kept axis. Works in any ring; convergence is the caller's concern.
template <class R>
R marginal_formula(const R& c, const R& u, const R& v, const R& w, const R& x,
                   const R& y, Axis integrate_out, double t) {
  const double s2 = std::sqrt(2.0);
  R m11 = u + v + w;
  R m22 = u - v - w;
  R m12 = (v - w) * cplx(0.0, 1.0);
  R b1 = (x + y) * cplx(1.0 / s2);
  R b2 = (x - y) * cplx(cplx(0.0, 1.0) / s2);
  const cplx two_pi = 2.0 * std::numbers::pi;
  if (integrate_out == Axis::p) {
    R lin = b2 - m12 * cplx(t);
    R e = b1 * cplx(t) - m11 * cplx(0.5 * t * t) +
          lin * lin * ring_inv(m22 * cplx(2));
    return c * ring_inv_sqrt(m22 * two_pi) * ring_exp(e);
  }
  R lin = b1 - m12 * cplx(t);
  R e = b2 * cplx(t) - m22 * cplx(0.5 * t * t) +
        lin * lin * ring_inv(m11 * cplx(2));
  return c * ring_inv_sqrt(m11 * two_pi) * ring_exp(e);
}

inline void require_marginal_integrable(cplx u, cplx v, cplx w,
                                        Axis integrate_out) {
  cplx m = (integrate_out == Axis::p) ? u - v - w : u + v + w;
  if (!(m.real() > 0.0))
    throw std::domain_error("marginal diverges along the integrated axis");
}
}  // namespace detail

/// Marginal density along one quadrature (the other integrated out),
/// evaluated at coordinate t.
inline double marginal_value(const GaussianForm<cplx>& f, Axis integrate_out,
                             double t) {
  detail::require_marginal_integrable(f.u, f.v, f.w, integrate_out);
  return detail::real_checked(
      detail::marginal_formula(f.c, f.u, f.v, f.w, f.x, f.y, integrate_out, t),
      "marginal value");
}

// ---------------------------------------------------------------------------
// PolyGaussian: polynomial in (alpha, alpha*) times a Gaussian form.

template <class R = cplx>
struct PolyGaussian {
  GaussianForm<R> base;
  // (power of alpha, power of alpha*) -> coefficient
  std::map<std::pair<int, int>, R> terms;
};

template <class R>
PolyGaussian<R> as_poly_gaussian(const GaussianForm<R>& f) {
  PolyGaussian<R> r{f, {}};
  r.base.c = ring_from_scalar(f.c, 1.0);
  r.terms[{0, 0}] = f.c;
  return r;
}

template <class R>
R evaluate(const PolyGaussian<R>& f, PhasePoint pt) {
  cplx a = pt.alpha();
  cplx ac = std::conj(a);
  R acc = ring_from_scalar(f.base.c, 0.0);
  for (const auto& [k, coef] : f.terms) {
    cplx m = 1.0;
    for (int i = 0; i < k.first; ++i) m *= a;
    for (int i = 0; i < k.second; ++i) m *= ac;
    acc += coef * m;
  }
  return acc * evaluate(f.base, pt);
}

inline double evaluate_real(const PolyGaussian<cplx>& f, PhasePoint pt) {
  cplx a = pt.alpha();
  cplx ac = std::conj(a);
  cplx acc = 0.0;
  double mag = 0.0;
  for (const auto& [k, coef] : f.terms) {
    cplx m = 1.0;
    for (int i = 0; i < k.first; ++i) m *= a;
    for (int i = 0; i < k.second; ++i) m *= ac;
    acc += coef * m;
    mag += std::abs(coef * m);
  }
  cplx base = evaluate(f.base, pt);
  return detail::real_checked(acc * base, "Wigner value", mag * std::abs(base));
}

template <class R>
PolyGaussian<R> scale(PolyGaussian<R> f, cplx s) {
  for (auto& [k, coef] : f.terms) coef = coef * s;
  return f;
}

/// Multiply by the monomial alpha^dm alpha*^dn.
template <class R>
PolyGaussian<R> multiply_monomial(const PolyGaussian<R>& f, int dm, int dn) {
  if (dm < 0 || dn < 0) throw std::invalid_argument("negative monomial power");
  PolyGaussian<R> r{f.base, {}};
  for (const auto& [k, coef] : f.terms)
    r.terms[{k.first + dm, k.second + dn}] = coef;
  return r;
}

template <class R>
PolyGaussian<R> multiply(const PolyGaussian<R>& f, const GaussianForm<R>& g) {
  PolyGaussian<R> r{multiply(f.base, g), f.terms};
  return r;
}

template <class R>
PolyGaussian<R> multiply(const PolyGaussian<R>& f, const PolyGaussian<R>& g) {
  PolyGaussian<R> r{multiply(f.base, g.base), {}};
  for (const auto& [ka, va] : f.terms)
    for (const auto& [kb, vb] : g.terms) {
      auto key = std::make_pair(ka.first + kb.first, ka.second + kb.second);
      auto it = r.terms.find(key);
      if (it == r.terms.end())
        r.terms[key] = va * vb;
      else
        it->second += va * vb;
    }
  return r;
}

/// Sum of two states over the same Gaussian base.
template <class R>
PolyGaussian<R> add(const PolyGaussian<R>& f, const PolyGaussian<R>& g) {
  auto same = [](const R& a, const R& b) { return a == b; };
  if (!(same(f.base.c, g.base.c) && same(f.base.u, g.base.u) &&
        same(f.base.v, g.base.v) && same(f.base.w, g.base.w) &&
        same(f.base.x, g.base.x) && same(f.base.y, g.base.y)))
    throw std::invalid_argument("PolyGaussian add: Gaussian bases differ");
  PolyGaussian<R> r = f;
  for (const auto& [k, coef] : g.terms) {
    auto it = r.terms.find(k);
    if (it == r.terms.end())
      r.terms[k] = coef;
    else
      it->second += coef;
  }
  return r;
}

/// Derivative with respect to alpha or alpha* (treated as independent).
template <class R>
PolyGaussian<R> differentiate(const PolyGaussian<R>& f, Wrt wrt) {
  PolyGaussian<R> r{f.base, {}};
  auto addt = [&](int m, int n, R v) {
    auto key = std::make_pair(m, n);
    auto it = r.terms.find(key);
    if (it == r.terms.end())
      r.terms[key] = std::move(v);
    else
      it->second += v;
  };
  for (const auto& [k, coef] : f.terms) {
    int m = k.first, n = k.second;
    if (wrt == Wrt::alpha) {
      if (m > 0) addt(m - 1, n, coef * cplx(m));
      addt(m, n + 1, -(f.base.u * coef));
      addt(m + 1, n, -(f.base.v * coef) * cplx(2));
      addt(m, n, f.base.x * coef);
    } else {
      if (n > 0) addt(m, n - 1, coef * cplx(n));
      addt(m + 1, n, -(f.base.u * coef));
      addt(m, n + 1, -(f.base.w * coef) * cplx(2));
      addt(m, n, f.base.y * coef);
    }
  }
  return r;
}

template <class R>
PolyGaussian<R> differentiate(const GaussianForm<R>& f, Wrt wrt) {
  return differentiate(as_poly_gaussian(f), wrt);
}

namespace detail {
/// Attach derivative-probe variables for the two linear sources to the
/// coefficient space, so polynomial prefactors can be contracted against
/// derivatives of a closed-form answer.
struct SourceProbe {
  JetSpace ext;
  std::string xname, yname;
};

inline SourceProbe make_source_probe(const JetSpace& base, int mmax, int nmax,
                                     const char* tag) {
  std::string xn = std::string("_") + tag + "x";
  std::string yn = std::string("_") + tag + "y";
  if (base.contains(xn) || base.contains(yn))
    throw std::invalid_argument("jet space already uses a reserved probe name");
  std::vector<JetVar> vars = base.vars();
  vars.push_back({xn, mmax, 0.0});
  vars.push_back({yn, nmax, 0.0});
  return {JetSpace(std::move(vars)), xn, yn};
}
}  // namespace detail

/// Integral of a polynomial-times-Gaussian over the phase plane, with jet
/// coefficients carried through.
inline Jet<cplx> phase_space_integral(const PolyGaussian<Jet<cplx>>& f) {
  detail::require_alpha_integrable(ring_const_part(f.base.u),
                                   ring_const_part(f.base.v),
                                   ring_const_part(f.base.w));
  int mmax = 0, nmax = 0;
  for (const auto& [k, coef] : f.terms) {
    mmax = std::max(mmax, k.first);
    nmax = std::max(nmax, k.second);
  }
  auto probe = detail::make_source_probe(f.base.c.space(), mmax, nmax, "s");
  GaussianForm<Jet<cplx>> g{
      jet_extend(f.base.c, probe.ext),
      jet_extend(f.base.u, probe.ext),
      jet_extend(f.base.v, probe.ext),
      jet_extend(f.base.w, probe.ext),
      jet_extend(f.base.x, probe.ext) + jet_variable(probe.ext, probe.xname),
      jet_extend(f.base.y, probe.ext) + jet_variable(probe.ext, probe.yname)};
  Jet<cplx> big = phase_space_integral(g);
  Jet<cplx> acc(f.base.c.space());
  for (const auto& [k, coef] : f.terms) {
    Jet<cplx> d = jet_extract_partial(
        jet_extract_partial(big, probe.xname, k.first), probe.yname, k.second);
    acc += coef * d;
  }
  return acc;
}

inline cplx phase_space_integral(const PolyGaussian<cplx>& f) {
  JetSpace scalar{};
  PolyGaussian<Jet<cplx>> g{lift_form(f.base, scalar), {}};
  for (const auto& [k, coef] : f.terms)
    g.terms[k] = Jet<cplx>::constant(scalar, coef);
  return phase_space_integral(g).value();
}

/// Kernel-weighted integral of a polynomial-times-Gaussian, jet
/// coefficients carried through.
inline Jet<cplx> kernel_integral(const PolyGaussian<Jet<cplx>>& f,
                                 const Jet<cplx>& g, const Jet<cplx>& S,
                                 const Jet<cplx>& P) {
  int mmax = 0, nmax = 0;
  for (const auto& [k, coef] : f.terms) {
    mmax = std::max(mmax, k.first);
    nmax = std::max(nmax, k.second);
  }
  auto probe = detail::make_source_probe(f.base.c.space(), mmax, nmax, "s");
  GaussianForm<Jet<cplx>> gg{
      jet_extend(f.base.c, probe.ext),
      jet_extend(f.base.u, probe.ext),
      jet_extend(f.base.v, probe.ext),
      jet_extend(f.base.w, probe.ext),
      jet_extend(f.base.x, probe.ext) + jet_variable(probe.ext, probe.xname),
      jet_extend(f.base.y, probe.ext) + jet_variable(probe.ext, probe.yname)};
  Jet<cplx> big =
      kernel_integral(gg, jet_extend(g, probe.ext), jet_extend(S, probe.ext),
                      jet_extend(P, probe.ext));
  Jet<cplx> acc(f.base.c.space());
  for (const auto& [k, coef] : f.terms) {
    Jet<cplx> d = jet_extract_partial(
        jet_extract_partial(big, probe.xname, k.first), probe.yname, k.second);
    acc += coef * d;
  }
  return acc;
}

/// Marginal of a polynomial-times-Gaussian state at one coordinate.
inline double marginal_value(const PolyGaussian<cplx>& f, Axis integrate_out,
                             double t) {
  detail::require_marginal_integrable(f.base.u, f.base.v, f.base.w,
                                      integrate_out);
  int mmax = 0, nmax = 0;
  for (const auto& [k, coef] : f.terms) {
    mmax = std::max(mmax, k.first);
    nmax = std::max(nmax, k.second);
  }
  auto probe = detail::make_source_probe(JetSpace{}, mmax, nmax, "m");
  auto k = [&](cplx z) { return Jet<cplx>::constant(probe.ext, z); };
  Jet<cplx> val = detail::marginal_formula(
      k(f.base.c), k(f.base.u), k(f.base.v), k(f.base.w),
      k(f.base.x) + jet_variable(probe.ext, probe.xname),
      k(f.base.y) + jet_variable(probe.ext, probe.yname), integrate_out, t);
  cplx acc = 0.0;
  double mag = 0.0;
  for (const auto& [key, coef] : f.terms) {
    cplx term = coef * val.deriv({key.first, key.second});
    acc += term;
    mag += std::abs(term);
  }
  return detail::real_checked(acc, "marginal value", mag);
}

struct MarginalTable {
  Axis integrate_out;
  std::vector<double> coord;
  std::vector<double> density;
};

template <class F>
MarginalTable tabulate_marginal(const F& f, Axis integrate_out, double lo,
                                double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo))
    throw std::invalid_argument("bad marginal range");
  MarginalTable tb{integrate_out, {}, {}};
  int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
  for (int i = 0; i <= n; ++i) {
    double t = lo + i * step;
    tb.coord.push_back(t);
    tb.density.push_back(marginal_value(f, integrate_out, t));
  }
  return tb;
}

// ---------------------------------------------------------------------------
// Derivative extraction with polynomial-valued coefficients: turn a
// jet-coefficient Gaussian form into the polynomial-times-Gaussian member it
// generates at one multi-index.

inline PolyGaussian<cplx> extract_poly(const GaussianForm<Jet<cplx>>& f,
                                       std::span<const int> idx) {
  const JetSpace& sp = f.c.space();
  auto lift = [&](const Jet<cplx>& z) {
    return z.template map_coeffs<Poly2>(
        [](const cplx& v) { return v == cplx{} ? Poly2{} : Poly2::constant(v); });
  };
  auto nilpotent = [&](const Jet<cplx>& z, int pm, int pn, cplx sign) {
    Jet<cplx> n = z;
    n.at(0) = 0.0;
    return lift(n).scaled_by(Poly2::monomial(pm, pn, sign));
  };
  Jet<Poly2> e = nilpotent(f.u, 1, 1, -1.0);
  e += nilpotent(f.v, 2, 0, -1.0);
  e += nilpotent(f.w, 0, 2, -1.0);
  e += nilpotent(f.x, 1, 0, 1.0);
  e += nilpotent(f.y, 0, 1, 1.0);
  Jet<Poly2> val = lift(f.c) * jet_exp_nilpotent(e);
  Poly2 q = val.deriv(idx);
  GaussianForm<cplx> base{1.0,          f.u.value(), f.v.value(),
                          f.w.value(),  f.x.value(), f.y.value()};
  PolyGaussian<cplx> r{base, {}};
  for (const auto& [k, v] : q.t) r.terms[k] = v;
  return r;
}

inline PolyGaussian<cplx> extract_poly(const GaussianForm<Jet<cplx>>& f,
                                       std::initializer_list<int> idx) {
  return extract_poly(f, std::span<const int>(idx.begin(), idx.size()));
}

// ---------------------------------------------------------------------------
// Two-mode forms: the signal mode alpha plus a tap mode beta, as produced by
// feeding a state and the vacuum through a beam splitter. The tap-mode
// linear sources pick up signal-dependent coefficients, which is all the
// extra structure the beta integral needs.

template <class R>
struct TapLinear {
  R c0, a, ac;  // coefficient of 1, alpha, alpha*
};

template <class R = cplx>
struct TwoModeForm {
  R c;
  R ua, va, wa, xa, ya;          // signal-mode quadratic and linear parts
  R ub, vb, wb;                  // tap-mode quadratic part
  TapLinear<R> xb, yb;           // sources of beta and beta*
};

/// Lift a one-mode form g(arg) with arg = ca*alpha + cb*beta (starred
/// coefficients supplied separately) into a two-mode form.
template <class R>
TwoModeForm<R> two_mode_embed(const GaussianForm<R>& g, cplx ca, cplx cb,
                              cplx ca_c, cplx cb_c) {
  auto zero = ring_from_scalar(g.c, 0.0);
  TwoModeForm<R> r{g.c,  zero, zero, zero, zero, zero,
                   zero, zero, zero, {zero, zero, zero}, {zero, zero, zero}};
  r.ua = g.u * (ca * ca_c);
  r.va = g.v * (ca * ca);
  r.wa = g.w * (ca_c * ca_c);
  r.ub = g.u * (cb * cb_c);
  r.vb = g.v * (cb * cb);
  r.wb = g.w * (cb_c * cb_c);
  r.xa = g.x * ca;
  r.ya = g.y * ca_c;
  r.xb.c0 = g.x * cb;
  r.yb.c0 = g.y * cb_c;
  // cross terms: -u(ca cb_c alpha beta* + cb ca_c alpha* beta)
  //              -v(2 ca cb alpha beta) - w(2 ca_c cb_c alpha* beta*)
  r.yb.a = -(g.u * (ca * cb_c));
  r.xb.ac = -(g.u * (cb * ca_c));
  r.xb.a = -(g.v * (2.0 * ca * cb));
  r.yb.ac = -(g.w * (2.0 * ca_c * cb_c));
  return r;
}

template <class R>
TwoModeForm<R> multiply(const TwoModeForm<R>& f, const TwoModeForm<R>& g) {
  TwoModeForm<R> r = f;
  r.c = f.c * g.c;
  r.ua = f.ua + g.ua;
  r.va = f.va + g.va;
  r.wa = f.wa + g.wa;
  r.xa = f.xa + g.xa;
  r.ya = f.ya + g.ya;
  r.ub = f.ub + g.ub;
  r.vb = f.vb + g.vb;
  r.wb = f.wb + g.wb;
  r.xb = {f.xb.c0 + g.xb.c0, f.xb.a + g.xb.a, f.xb.ac + g.xb.ac};
  r.yb = {f.yb.c0 + g.yb.c0, f.yb.a + g.yb.a, f.yb.ac + g.yb.ac};
  return r;
}

/// Integrate the tap mode out against the diagonal kernel
/// (g/S) exp(-(P/S) |beta|^2); the plain trace is the kernel (1, 1, 0).
/// The result is a one-mode Gaussian form whose exponent picked up the
/// completed-square contributions of the signal-dependent tap sources. As in
/// kernel_integral, S stays a common denominator so projector-kernel
/// parameters enter every coefficient polynomially.
template <class R>
GaussianForm<R> integrate_tap(const TwoModeForm<R>& f, const R& g, const R& S,
                              const R& P) {
  cplx s0 = detail::require_kernel_scale(ring_const_part(S));
  detail::require_alpha_integrable(
      (ring_const_part(f.ub) * s0 + ring_const_part(P)) / s0,
      ring_const_part(f.vb), ring_const_part(f.wb));
  R pu = f.ub * S + P;
  R s2 = S * S;
  R det = pu * pu - cplx(4) * ((f.vb * f.wb) * s2);
  R idet = ring_inv(det);

  // E = (pu S xb yb - S^2 (wb xb^2 + vb yb^2)) / det, expanded over
  // {1, alpha, alpha*, alpha^2, alpha*^2, |alpha|^2}
  auto comb = [&](const TapLinear<R>& fl, const TapLinear<R>& gl, const R& coef,
                  R out[6]) {
    R k = coef * idet;
    out[0] += k * (fl.c0 * gl.c0);
    out[1] += k * (fl.c0 * gl.a + fl.a * gl.c0);
    out[2] += k * (fl.c0 * gl.ac + fl.ac * gl.c0);
    out[3] += k * (fl.a * gl.a);
    out[4] += k * (fl.ac * gl.ac);
    out[5] += k * (fl.a * gl.ac + fl.ac * gl.a);
  };
  auto zero = ring_from_scalar(f.c, 0.0);
  R e[6] = {zero, zero, zero, zero, zero, zero};
  comb(f.xb, f.yb, pu * S, e);
  comb(f.xb, f.xb, -(f.wb * s2), e);
  comb(f.yb, f.yb, -(f.vb * s2), e);

  GaussianForm<R> r{f.c * g * ring_inv_sqrt(det) * ring_exp(e[0]),
                    f.ua - e[5],
                    f.va - e[3],
                    f.wa - e[4],
                    f.xa + e[1],
                    f.ya + e[2]};
  return r;
}

template <class R>
GaussianForm<R> integrate_tap(const TwoModeForm<R>& f) {
  auto one = ring_from_scalar(f.c, 1.0);
  auto zero = ring_from_scalar(f.c, 0.0);
  return integrate_tap(f, one, one, zero);
}

}  // namespace wiggen
