#pragma once

// Photon subtraction from a Gaussian input state, in two flavours:
//
//  * the formal ladder-operator definition a^n rho a+^n / tr, realized by a
//    generating function carrying a pair of tag parameters (eta, eta_conj);
//    the n-subtracted member sits at the (n, n) derivative at zero;
//
//  * the heralded process: an unbalanced beam splitter taps off a share
//    zeta of the state, a photon-number projector acts on the tap, and the
//    tap mode is integrated out. The tap projector carries parameter J, so
//    heralding on n detected photons is the n-th J-derivative at zero.
//
// Both routes produce jet-coefficient Gaussian forms; scalar instantiations
// (J = 0 or 1) come from order-zero jets centered at those points and are
// exact. Closed-form reference expressions for the squeezed-thermal family
// live in the closedform namespace and are used as regression anchors.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "wiggen/gaussian.hpp"
#include "wiggen/jet.hpp"
#include "wiggen/states.hpp"

namespace wiggen {

/// Extra truncation orders kept beyond the extracted derivative.
inline constexpr int kOrderMargin = 2;

inline JetSpace ladder_space(int order) {
  return JetSpace{{std::string(kEta), order, 0.0},
                  {std::string(kEtaConj), order, 0.0}};
}

inline JetSpace tap_space(int order, cplx center = 0.0) {
  return JetSpace{{std::string(kTapVar), order, center}};
}

namespace detail {
inline void require_center_zero(const JetSpace& s, std::string_view name) {
  if (s.var(s.require(name)).center != cplx(0.0))
    throw std::invalid_argument("variable '" + std::string(name) +
                                "' must be centered at zero: the family is "
                                "extracted at a vanishing tag");
}
}  // namespace detail

/// Generating function for formally photon-subtracted states: the input
/// Wigner function with its argument shifted by half the tag, times the
/// ladder tag factor. Unnormalized members are (eta, eta_conj) derivatives.
inline GaussianForm<Jet<cplx>> formal_generating(const GaussianForm<cplx>& state,
                                                 const JetSpace& s) {
  detail::require_center_zero(s, kEta);
  detail::require_center_zero(s, kEtaConj);
  auto eta = jet_variable(s, kEta);
  auto etac = jet_variable(s, kEtaConj);
  auto zero = Jet<cplx>(s);
  auto one = Jet<cplx>::constant(s, 1.0);
  auto lifted = lift_form(state, s);
  AffineMap<Jet<cplx>> shift{one, zero, eta * 0.5, one, zero, etac * 0.5};
  auto shifted = affine_substitute(lifted, shift);
  GaussianForm<Jet<cplx>> tag{jet_exp(eta * etac * 0.5), zero, zero, zero,
                              etac, eta};
  return multiply(shifted, tag);
}

inline Jet<cplx> formal_trace_generating(const GaussianForm<cplx>& state,
                                         const JetSpace& s) {
  return phase_space_integral(formal_generating(state, s));
}

namespace detail {
inline cplx subtraction_denominator(const Jet<cplx>& trace_jet,
                                    std::span<const int> idx) {
  cplx den = trace_jet.deriv(idx);
  if (std::abs(den) < 1e-12)
    throw std::domain_error(
        "subtraction weight vanishes: the state has no such photon component "
        "to remove");
  return den;
}
}  // namespace detail

/// Normalized Wigner value of the n-photon formally subtracted state.
inline double formal_subtracted_wigner(const GaussianForm<cplx>& state, int n,
                                       PhasePoint pt) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  if (n == 0) return evaluate_real(state, pt);
  JetSpace s = ladder_space(n + kOrderMargin);
  auto gen = formal_generating(state, s);
  cplx den = detail::subtraction_denominator(phase_space_integral(gen),
                                             std::array{n, n});
  cplx num = evaluate(gen, pt).deriv({n, n});
  return detail::real_checked(num / den, "subtracted Wigner value");
}

/// The same state as an explicit polynomial-times-Gaussian.
inline PolyGaussian<cplx> formal_subtracted_polygaussian(
    const GaussianForm<cplx>& state, int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  JetSpace s = ladder_space(n + kOrderMargin);
  auto gen = formal_generating(state, s);
  cplx den = detail::subtraction_denominator(phase_space_integral(gen),
                                             std::array{n, n});
  return scale(extract_poly(gen, {n, n}), 1.0 / den);
}

enum class OriginSign { negative, nonnegative };

/// Sign of the single-subtraction Wigner function at the origin, evaluated
/// and then asserted against the closed condition on the equivalent
/// squeezed-thermal constants (negative iff T*A > 1).
inline OriginSign negativity_at_origin(const StateSpec& spec) {
  auto eq = equivalent_sts(spec);
  if (eq.A == 1.0 && eq.purity == 1.0)
    throw std::domain_error(
        "vacuum input: single-photon subtraction is undefined");
  double w0 = formal_subtracted_wigner(make_state(spec), 1, {0.0, 0.0});
  bool measured = w0 < 0.0;
  bool closed = eq.purity * eq.A > 1.0;
  if (measured != closed && std::abs(eq.purity * eq.A - 1.0) > 1e-10)
    throw std::logic_error(
        "origin-sign evaluation disagrees with the closed condition");
  return measured ? OriginSign::negative : OriginSign::nonnegative;
}

// ---------------------------------------------------------------------------
// Heralded subtraction

namespace detail {
inline void require_tap_share(double zeta) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("beam-splitter share must lie in (0, 1)");
}
}  // namespace detail

/// Generating function for heralded subtraction: state and vacuum through a
/// beam splitter of reflectivity zeta, projector kernel on the tap mode,
/// tap integrated out. The result is a Gaussian form in alpha whose
/// coefficients are jets in the tap parameter J.
inline GaussianForm<Jet<cplx>> heralded_generating(
    const GaussianForm<cplx>& state, double zeta, const JetSpace& s) {
  detail::require_tap_share(zeta);
  s.require(kTapVar);
  const double rt = std::sqrt(1.0 - zeta);
  const double rz = std::sqrt(zeta);
  const cplx irz(0.0, rz);
  auto mixed =
      multiply(two_mode_embed(lift_form(state, s), rt, irz, rt, -irz),
               two_mode_embed(lift_form(vacuum_form(), s), irz, rt, -irz, rt));
  auto one = Jet<cplx>::constant(s, 1.0);
  auto jv = jet_variable(s, kTapVar);
  return integrate_tap(mixed, Jet<cplx>::constant(s, 2.0), one + jv,
                       (one - jv) * cplx(2));
}

inline Jet<cplx> heralded_trace_generating(const GaussianForm<cplx>& state,
                                           double zeta, const JetSpace& s) {
  return phase_space_integral(heralded_generating(state, zeta, s));
}

/// Probabilities of heralding 0..n_max detected photons.
inline std::vector<double> herald_probabilities(const GaussianForm<cplx>& state,
                                                double zeta, int n_max) {
  if (n_max < 0) throw std::invalid_argument("herald count must be >= 0");
  JetSpace s = tap_space(n_max);
  Jet<cplx> tr = heralded_trace_generating(state, zeta, s);
  std::vector<double> p(static_cast<size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n)
    p[static_cast<size_t>(n)] =
        detail::real_checked(tr.coeff({n}), "herald probability");
  return p;
}

inline double herald_probability(const GaussianForm<cplx>& state, double zeta,
                                 int n) {
  if (n < 0) throw std::invalid_argument("herald count must be >= 0");
  return herald_probabilities(state, zeta, n).back();
}

/// Normalized Wigner value of the state heralded on n detected photons.
inline double heralded_subtracted_wigner(const GaussianForm<cplx>& state,
                                         double zeta, int n, PhasePoint pt) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  JetSpace s = tap_space(n + kOrderMargin);
  auto gen = heralded_generating(state, zeta, s);
  cplx den = detail::subtraction_denominator(phase_space_integral(gen),
                                             std::array{n});
  cplx num = evaluate(gen, pt).deriv({n});
  return detail::real_checked(num / den, "subtracted Wigner value");
}

inline PolyGaussian<cplx> heralded_subtracted_polygaussian(
    const GaussianForm<cplx>& state, double zeta, int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  JetSpace s = tap_space(n + kOrderMargin);
  auto gen = heralded_generating(state, zeta, s);
  cplx den = detail::subtraction_denominator(phase_space_integral(gen),
                                             std::array{n});
  return scale(extract_poly(gen, {n}), 1.0 / den);
}

namespace detail {
inline GaussianForm<cplx> scalar_form(const GaussianForm<Jet<cplx>>& f) {
  if (f.c.space().size() != 1)
    throw std::invalid_argument("form is not a scalar instantiation");
  return {f.c.value(), f.u.value(), f.v.value(),
          f.w.value(), f.x.value(), f.y.value()};
}
}  // namespace detail

/// State conditioned on a click of a detector that cannot resolve photon
/// number: the all-outcomes form (tap parameter set to one) minus the
/// vacuum-outcome form, renormalized by the click probability.
struct ClickConditionedState {
  GaussianForm<cplx> any_outcome;     // J = 1 instantiation; unit trace
  GaussianForm<cplx> vacuum_outcome;  // J = 0 instantiation; trace P(0)
  double p_no_click = 0.0;
  double p_click = 0.0;

  double value(PhasePoint pt) const {
    return (evaluate_real(any_outcome, pt) -
            evaluate_real(vacuum_outcome, pt)) /
           p_click;
  }

  double marginal(Axis integrate_out, double t) const {
    return (marginal_value(any_outcome, integrate_out, t) -
            marginal_value(vacuum_outcome, integrate_out, t)) /
           p_click;
  }

  double integral() const {
    return (detail::real_checked(phase_space_integral(any_outcome),
                                 "trace") -
            p_no_click) /
           p_click;
  }
};

inline ClickConditionedState npnr_state(const GaussianForm<cplx>& state,
                                        double zeta) {
  detail::require_tap_share(zeta);
  auto f1 = detail::scalar_form(
      heralded_generating(state, zeta, tap_space(0, 1.0)));
  auto f0 = detail::scalar_form(
      heralded_generating(state, zeta, tap_space(0, 0.0)));
  double p0 = detail::real_checked(phase_space_integral(f0),
                                   "no-click probability");
  double pc = 1.0 - p0;
  if (pc < 1e-14)
    throw std::domain_error(
        "click probability vanishes: no state is heralded by a click");
  return {f1, f0, p0, pc};
}

inline double npnr_value(const GaussianForm<cplx>& state, double zeta,
                         PhasePoint pt) {
  return npnr_state(state, zeta).value(pt);
}

/// Largest pointwise gap between the single-photon heralded state at this
/// tap share and the formal single-subtraction state, over the standard
/// comparison window.
inline double small_zeta_check(const GaussianForm<cplx>& state, double zeta) {
  auto formal = formal_subtracted_polygaussian(state, 1);
  auto heralded = heralded_subtracted_polygaussian(state, zeta, 1);
  double dev = 0.0;
  for (int i = -80; i <= 80; ++i)
    for (int j = -80; j <= 80; ++j) {
      PhasePoint pt{i * 0.05, j * 0.05};
      dev = std::max(dev, std::abs(evaluate_real(heralded, pt) -
                                   evaluate_real(formal, pt)));
    }
  return dev;
}

enum class SubtractionMethod { formal, heralded };

/// One subtracted state with the bookkeeping used to normalize it.
struct SubtractionResult {
  SubtractionMethod method = SubtractionMethod::formal;
  int n = 0;
  double zeta = 0.0;
  PolyGaussian<cplx> wigner;        // normalized
  double trace_derivative = 0.0;    // denominator of the normalization
  double herald_probability = 0.0;  // heralded route only
};

inline SubtractionResult formal_subtraction(const GaussianForm<cplx>& state,
                                            int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  JetSpace s = ladder_space(n + kOrderMargin);
  auto gen = formal_generating(state, s);
  auto tr = phase_space_integral(gen);
  cplx den = detail::subtraction_denominator(tr, std::array{n, n});
  SubtractionResult r;
  r.method = SubtractionMethod::formal;
  r.n = n;
  r.wigner = scale(extract_poly(gen, {n, n}), 1.0 / den);
  r.trace_derivative = den.real();
  return r;
}

inline SubtractionResult heralded_subtraction(const GaussianForm<cplx>& state,
                                              double zeta, int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  JetSpace s = tap_space(n + kOrderMargin);
  auto gen = heralded_generating(state, zeta, s);
  auto tr = phase_space_integral(gen);
  cplx den = detail::subtraction_denominator(tr, std::array{n});
  SubtractionResult r;
  r.method = SubtractionMethod::heralded;
  r.n = n;
  r.zeta = zeta;
  r.wigner = scale(extract_poly(gen, {n}), 1.0 / den);
  r.trace_derivative = den.real();
  r.herald_probability =
      detail::real_checked(tr.coeff({n}), "herald probability");
  return r;
}

// ---------------------------------------------------------------------------
// Closed-form reference expressions for the squeezed-thermal family,
// transcribed independently of the generic pipeline.

namespace closedform {

/// Formal-subtraction generating function for a squeezed thermal state,
/// with the shifted-argument exponent expanded by hand.
inline GaussianForm<Jet<cplx>> formal_generating_sts(double T, double A,
                                                     cplx B,
                                                     const JetSpace& s) {
  auto eta = jet_variable(s, kEta);
  auto etac = jet_variable(s, kEtaConj);
  cplx Bc = std::conj(B);
  GaussianForm<Jet<cplx>> f{
      Jet<cplx>(s),
      Jet<cplx>::constant(s, 2.0 * T * A),
      Jet<cplx>::constant(s, T * Bc),
      Jet<cplx>::constant(s, T * B),
      eta * (-T * Bc) + etac * (1.0 - T * A),
      eta * (1.0 - T * A) + etac * (-T * B)};
  Jet<cplx> e = (eta * etac) * (0.5 * (1.0 - T * A)) +
                (eta * eta) * (-0.25 * T * Bc) +
                (etac * etac) * (-0.25 * T * B);
  f.c = jet_exp(e) * (2.0 * T);
  return f;
}

inline Jet<cplx> formal_trace_sts(double T, double A, cplx B,
                                  const JetSpace& s) {
  auto eta = jet_variable(s, kEta);
  auto etac = jet_variable(s, kEtaConj);
  cplx Bc = std::conj(B);
  Jet<cplx> e = (eta * etac) * ((A - T) / (2.0 * T)) +
                (eta * eta) * (-Bc / (4.0 * T)) +
                (etac * etac) * (-B / (4.0 * T));
  return jet_exp(e);
}

/// The printed normalized single-subtraction member of the family.
inline PolyGaussian<cplx> one_subtracted_sts(double T, double A, cplx B) {
  cplx Bc = std::conj(B);
  GaussianForm<cplx> base{1.0, 2.0 * T * A, T * Bc, T * B, 0.0, 0.0};
  double g = T * A - 1.0;
  double norm = 4.0 * T * T / (A - T);
  PolyGaussian<cplx> r{base, {}};
  r.terms[{1, 1}] = norm * ((1.0 - T * T) + g * 2.0 * T * A);
  r.terms[{2, 0}] = norm * g * T * Bc;
  r.terms[{0, 2}] = norm * g * T * B;
  r.terms[{0, 0}] = norm * g * (-0.5);
  return r;
}

/// Heralded generating function for the squeezed thermal family.
inline GaussianForm<Jet<cplx>> heralded_generating_sts(double T, double A,
                                                       cplx B, double zeta,
                                                       const JetSpace& s) {
  auto j = jet_variable(s, kTapVar);
  auto one = Jet<cplx>::constant(s, 1.0);
  cplx Bc = std::conj(B);
  double r = 2.0 * T * A - 1.0 - T * T;
  Jet<cplx> opj = one + j;
  Jet<cplx> kk = one + opj * ((T * A - 1.0) * zeta) +
                 (opj * opj) * (-0.25 * r * zeta * zeta);
  Jet<cplx> ik = jet_inv(kk);
  Jet<cplx> u = ik * ((1.0 - zeta) * T * 2.0 * A) +
                ik * (one * (zeta * (1.0 + T * T)) + j * (zeta * (T * T - 1.0))) +
                ik * (one - j * j) * (0.5 * zeta * zeta * r);
  GaussianForm<Jet<cplx>> f{jet_inv_sqrt(kk) * (2.0 * T),
                            u,
                            ik * ((1.0 - zeta) * T * Bc),
                            ik * ((1.0 - zeta) * T * B),
                            Jet<cplx>(s),
                            Jet<cplx>(s)};
  return f;
}

inline Jet<cplx> heralded_trace_sts(double T, double A, double zeta,
                                    const JetSpace& s) {
  auto j = jet_variable(s, kTapVar);
  auto one = Jet<cplx>::constant(s, 1.0);
  double r = 2.0 * T * A - 1.0 - T * T;
  Jet<cplx> omj = one - j;
  Jet<cplx> arg = one + omj * ((A - T) * zeta / T) +
                  (omj * omj) * (-0.25 * r * zeta * zeta / (T * T));
  return jet_inv_sqrt(arg);
}

}  // namespace closedform

}  // namespace wiggen
