#pragma once

// Photon-number statistics through the projector kernel: multiplying a
// state's Wigner function by the kernel carrying parameter K and tracing
// gives a generating function whose K^n coefficient at K=0 is P(n) and
// whose K-derivatives at K=1 give the moments. Stacked on top of the
// subtraction generating functions this yields double generating functions:
// one index pair selects the subtracted state, the K index reads off its
// statistics.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "wiggen/fock.hpp"
#include "wiggen/gaussian.hpp"
#include "wiggen/jet.hpp"
#include "wiggen/photon_distribution.hpp"
#include "wiggen/states.hpp"
#include "wiggen/subtraction.hpp"

namespace wiggen {

inline constexpr int kDefaultReport = 40;

/// Projector-family kernel in the statistics parameter K.
inline GaussianForm<Jet<cplx>> projection_generating(const JetSpace& s) {
  return fock_generating(s, kCountVar);
}

namespace detail {

inline double real_checked_ratio(cplx num, cplx den, const char* what) {
  return real_checked(num / den, what);
}

inline JetSpace count_space(int order, cplx center) {
  return JetSpace{{std::string(kCountVar), order, center}};
}

inline JetSpace with_count_var(const JetSpace& s, int order, cplx center) {
  std::vector<JetVar> vars = s.vars();
  vars.push_back({std::string(kCountVar), order, center});
  return JetSpace(std::move(vars));
}

/// Trace against the projector kernel, with the kernel's denominator 1 + K
/// kept common rather than expanded into a series.
template <class Lifted>
Jet<cplx> count_kernel_trace(const Lifted& lifted, const JetSpace& s) {
  auto one = Jet<cplx>::constant(s, 1.0);
  auto kv = jet_variable(s, kCountVar);
  return kernel_integral(lifted, Jet<cplx>::constant(s, 2.0), one + kv,
                         (one - kv) * cplx(2));
}

template <class State>
Jet<cplx> count_trace(const State& state, const JetSpace& s) {
  if constexpr (std::is_same_v<State, GaussianForm<cplx>>) {
    return count_kernel_trace(lift_form(state, s), s);
  } else {
    PolyGaussian<Jet<cplx>> lifted{lift_form(state.base, s), {}};
    for (const auto& [k, coef] : state.terms)
      lifted.terms[k] = Jet<cplx>::constant(s, coef);
    return count_kernel_trace(lifted, s);
  }
}

}  // namespace detail

/// Photon statistics of a state given by its (Poly)Gaussian Wigner
/// function. Probabilities come from K-coefficients around zero, moments
/// from K-derivatives at one; the state's own trace normalizes both.
template <class State>
PhotonDistribution distribution(const State& state,
                                int n_report = kDefaultReport) {
  if (n_report < 0) throw std::invalid_argument("report length must be >= 0");
  Jet<cplx> probs =
      detail::count_trace(state, detail::count_space(n_report, 0.0));
  Jet<cplx> moments = detail::count_trace(state, detail::count_space(2, 1.0));
  cplx norm = moments.coeff({0});  // trace of the state
  if (std::abs(norm) < 1e-12)
    throw std::domain_error("statistics of an unnormalizable state");
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1);
  double sum = 0.0;
  for (int n = 0; n <= n_report; ++n) {
    d.p[static_cast<size_t>(n)] = detail::real_checked_ratio(
        probs.coeff({n}), norm, "photon probability");
    sum += d.p[static_cast<size_t>(n)];
  }
  d.tail_mass = 1.0 - sum;
  cplx c1 = moments.coeff({1});
  cplx c2 = moments.coeff({2});
  d.mean = detail::real_checked_ratio(c1, norm, "mean photon number");
  d.second_moment =
      detail::real_checked_ratio(c1 + 2.0 * c2, norm, "second moment");
  return d;
}

/// Photon statistics of the n-th squeezed Fock family member, read straight
/// from the joint (nu, K) generating function with both kernel denominators
/// kept common. Coefficients of the joint trace are bounded by one, so this
/// stays accurate at member orders where integrating the assembled member
/// term by term loses digits.
inline PhotonDistribution fock_statistics(int n, const SqueezeParams& sq,
                                          int n_report = kDefaultReport) {
  if (n < 0) throw std::invalid_argument("member index must be >= 0");
  if (n_report < 0) throw std::invalid_argument("report length must be >= 0");
  double A = sq.a_const();
  double b2 = std::norm(sq.b_const());
  auto gen = [&](const JetSpace& s) {
    auto nu = jet_variable(s, kFockVar);
    auto kv = jet_variable(s, kCountVar);
    auto one = Jet<cplx>::constant(s, 1.0);
    auto pu = (one - nu) * (one + kv) * (2.0 * A) +
              (one - kv) * (one + nu) * cplx(2);
    auto det = pu * pu -
               ((one - nu) * (one - nu)) * ((one + kv) * (one + kv)) *
                   (4.0 * b2);
    return jet_inv_sqrt(det) * cplx(4);
  };
  Jet<cplx> probs =
      gen(detail::with_count_var(detail::fock_space(n), n_report, 0.0));
  Jet<cplx> moments =
      gen(detail::with_count_var(detail::fock_space(n), 2, 1.0));
  cplx norm = moments.coeff({n, 0});
  if (std::abs(norm) < 1e-12)
    throw std::domain_error("statistics of an unnormalizable state");
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1);
  double sum = 0.0;
  for (int k = 0; k <= n_report; ++k) {
    d.p[static_cast<size_t>(k)] = detail::real_checked_ratio(
        probs.coeff({n, k}), norm, "photon probability");
    sum += d.p[static_cast<size_t>(k)];
  }
  d.tail_mass = 1.0 - sum;
  cplx c1 = moments.coeff({n, 1});
  cplx c2 = moments.coeff({n, 2});
  d.mean = detail::real_checked_ratio(c1, norm, "mean photon number");
  d.second_moment =
      detail::real_checked_ratio(c1 + 2.0 * c2, norm, "second moment");
  return d;
}

/// Double generating function of formal subtraction and photon statistics:
/// eta-pair derivatives pick the subtracted state, K indexes its statistics.
inline Jet<cplx> double_generating_formal(const GaussianForm<cplx>& state,
                                          const JetSpace& s) {
  return detail::count_kernel_trace(formal_generating(state, s), s);
}

/// K-derivative of the double generating function at K=1: a generating
/// function for the mean photon number of the subtracted states.
inline Jet<cplx> mean_generating_formal(const GaussianForm<cplx>& state,
                                        const JetSpace& s) {
  JetSpace s3 = detail::with_count_var(s, 1, 1.0);
  return jet_extract_partial(double_generating_formal(state, s3), kCountVar, 1);
}

/// Statistics of the n-photon formally subtracted state.
inline PhotonDistribution subtracted_distribution_formal(
    const GaussianForm<cplx>& state, int n, int n_report = kDefaultReport) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  if (n_report < 0) throw std::invalid_argument("report length must be >= 0");
  JetSpace eta2 = ladder_space(n + kOrderMargin);
  Jet<cplx> probs = double_generating_formal(
      state, detail::with_count_var(eta2, n_report, 0.0));
  Jet<cplx> moments =
      double_generating_formal(state, detail::with_count_var(eta2, 2, 1.0));
  cplx norm = moments.coeff({n, n, 0});
  if (std::abs(norm) < 1e-12)
    throw std::domain_error("statistics of an unnormalizable state");
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1);
  double sum = 0.0;
  for (int k = 0; k <= n_report; ++k) {
    d.p[static_cast<size_t>(k)] = detail::real_checked_ratio(
        probs.coeff({n, n, k}), norm, "photon probability");
    sum += d.p[static_cast<size_t>(k)];
  }
  d.tail_mass = 1.0 - sum;
  cplx c1 = moments.coeff({n, n, 1});
  cplx c2 = moments.coeff({n, n, 2});
  d.mean = detail::real_checked_ratio(c1, norm, "mean photon number");
  d.second_moment =
      detail::real_checked_ratio(c1 + 2.0 * c2, norm, "second moment");
  return d;
}

/// Double generating function of heralded subtraction (tap parameter J) and
/// photon statistics of the heralded state (parameter K).
inline Jet<cplx> double_generating_heralded(const GaussianForm<cplx>& state,
                                            double zeta, const JetSpace& s) {
  return detail::count_kernel_trace(heralded_generating(state, zeta, s), s);
}

/// Statistics of the state heralded on n detected tap photons.
inline PhotonDistribution subtracted_distribution_heralded(
    const GaussianForm<cplx>& state, double zeta, int n,
    int n_report = kDefaultReport) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  if (n_report < 0) throw std::invalid_argument("report length must be >= 0");
  JetSpace tap = tap_space(n + kOrderMargin);
  Jet<cplx> probs = double_generating_heralded(
      state, zeta, detail::with_count_var(tap, n_report, 0.0));
  Jet<cplx> moments = double_generating_heralded(
      state, zeta, detail::with_count_var(tap, 2, 1.0));
  cplx norm = moments.coeff({n, 0});
  if (std::abs(norm) < 1e-12)
    throw std::domain_error("statistics of an unnormalizable state");
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1);
  double sum = 0.0;
  for (int k = 0; k <= n_report; ++k) {
    d.p[static_cast<size_t>(k)] = detail::real_checked_ratio(
        probs.coeff({n, k}), norm, "photon probability");
    sum += d.p[static_cast<size_t>(k)];
  }
  d.tail_mass = 1.0 - sum;
  cplx c1 = moments.coeff({n, 1});
  cplx c2 = moments.coeff({n, 2});
  d.mean = detail::real_checked_ratio(c1, norm, "mean photon number");
  d.second_moment =
      detail::real_checked_ratio(c1 + 2.0 * c2, norm, "second moment");
  return d;
}

/// Statistics of the click-conditioned (non-resolving detector) state,
/// recombined from the two scalar instantiations of the heralded family.
inline PhotonDistribution npnr_distribution(const GaussianForm<cplx>& state,
                                            double zeta,
                                            int n_report = kDefaultReport) {
  ClickConditionedState cc = npnr_state(state, zeta);
  PhotonDistribution d1 = distribution(cc.any_outcome, n_report);
  PhotonDistribution d0 = distribution(cc.vacuum_outcome, n_report);
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1);
  for (int k = 0; k <= n_report; ++k)
    d.p[static_cast<size_t>(k)] =
        (d1.p[static_cast<size_t>(k)] -
         cc.p_no_click * d0.p[static_cast<size_t>(k)]) /
        cc.p_click;
  d.mean = (d1.mean - cc.p_no_click * d0.mean) / cc.p_click;
  d.second_moment =
      (d1.second_moment - cc.p_no_click * d0.second_moment) / cc.p_click;
  double sum = 0.0;
  for (double v : d.p) sum += v;
  d.tail_mass = 1.0 - sum;
  return d;
}

// ---------------------------------------------------------------------------
// Closed-form reference expressions for the squeezed-thermal family.

namespace closedform {

/// Double generating function for formal subtraction plus statistics.
inline Jet<cplx> double_generating_formal_sts(double T, double A, cplx B,
                                              const JetSpace& s) {
  auto eta = jet_variable(s, kEta);
  auto etac = jet_variable(s, kEtaConj);
  auto kv = jet_variable(s, kCountVar);
  auto one = Jet<cplx>::constant(s, 1.0);
  cplx Bc = std::conj(B);
  Jet<cplx> opk = one + kv;
  Jet<cplx> omk = one - kv;
  Jet<cplx> den =
      (opk * opk) * (T * T) + (omk * opk) * (2.0 * T * A) + omk * omk;
  Jet<cplx> hh = eta * etac;
  Jet<cplx> num = hh * (kv * (1.0 + T * T - 2.0 * T * A) -
                        one * (1.0 - T * T)) +
                  (eta * eta) * (T * Bc) + (etac * etac) * (T * B);
  return jet_inv_sqrt(den) * (2.0 * T) * jet_exp(-(num * jet_inv(den)));
}

/// Mean-photon-number generating function for formal subtraction.
inline Jet<cplx> mean_generating_formal_sts(double T, double A, cplx B,
                                            const JetSpace& s) {
  auto eta = jet_variable(s, kEta);
  auto etac = jet_variable(s, kEtaConj);
  auto one = Jet<cplx>::constant(s, 1.0);
  cplx Bc = std::conj(B);
  double am = A - T;
  Jet<cplx> poly = one * (am / (2.0 * T)) +
                   (eta * etac) * ((A * A - 1.0 + am * am) / (4.0 * T * T)) +
                   (eta * eta) * (-am * Bc / (4.0 * T * T)) +
                   (etac * etac) * (-am * B / (4.0 * T * T));
  return poly * formal_trace_sts(T, A, B, s);
}

/// Double generating function for heralded subtraction plus statistics.
inline Jet<cplx> double_generating_heralded_sts(double T, double A,
                                                double zeta,
                                                const JetSpace& s) {
  auto j = jet_variable(s, kTapVar);
  auto kv = jet_variable(s, kCountVar);
  auto one = Jet<cplx>::constant(s, 1.0);
  double r = 2.0 * T * A - 1.0 - T * T;
  Jet<cplx> q = kv * (1.0 - zeta) + j * zeta;
  Jet<cplx> arg = (one - q * q) * r - (j - kv) * (2.0 * (1.0 - T * T) * zeta) +
                  one * (2.0 + 2.0 * T * T) + kv * (2.0 * T * T - 2.0);
  return jet_inv_sqrt(arg) * (2.0 * T);
}

/// Mean-photon-number generating function for heralded subtraction.
inline Jet<cplx> mean_generating_heralded_sts(double T, double A, double zeta,
                                              const JetSpace& s) {
  auto j = jet_variable(s, kTapVar);
  auto one = Jet<cplx>::constant(s, 1.0);
  double r = 2.0 * T * A - 1.0 - T * T;
  Jet<cplx> w = one * (1.0 - zeta) + j * zeta;
  Jet<cplx> num = ((w * w) * r + one * (1.0 - T * T)) * (2.0 * T * (1.0 - zeta));
  Jet<cplx> den = (one - w * w) * r + (one - j) * (2.0 * (1.0 - T * T) * zeta) +
                  one * (4.0 * T * T);
  return num * jet_inv_sqrt(den) * jet_inv(den);
}

}  // namespace closedform

}  // namespace wiggen
