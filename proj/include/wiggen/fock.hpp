#pragma once

// Fock states and squeezed Fock states through one generating function: a
// geometric kernel in a diagonal parameter whose nu^n coefficient is the
// n-photon Wigner function. Squeezing is an argument substitution on the
// kernel. Members come from the coefficient's binomial expansion; a
// Laguerre-recurrence evaluator provides an independent check.

#include <cmath>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "wiggen/gaussian.hpp"
#include "wiggen/jet.hpp"
#include "wiggen/states.hpp"

namespace wiggen {

/// Geometric kernel 2/(1+nu) exp(-2 |alpha|^2 (1-nu)/(1+nu)). Its nu^n
/// coefficient at nu=0 is the n-photon Wigner function; at nu=1 it is the
/// flat function 1. The same kernel with the statistics parameter K plays
/// the role of the photon-number projector family.
inline GaussianForm<Jet<cplx>> fock_generating(const JetSpace& s,
                                               std::string_view var = kFockVar) {
  auto nu = jet_variable(s, var);
  auto one = Jet<cplx>::constant(s, 1.0);
  auto ip = jet_inv(one + nu);
  auto zero = Jet<cplx>(s);
  return {ip * cplx(2),           (one - nu) * ip * cplx(2), zero, zero,
          zero,                   zero};
}

/// Same kernel after squeezing: the quadratic form picks up the squeezing
/// constants A and B.
inline GaussianForm<Jet<cplx>> squeezed_fock_generating(
    const SqueezeParams& sq, const JetSpace& s,
    std::string_view var = kFockVar) {
  return bogoliubov(fock_generating(s, var), sq);
}

namespace closedform {
/// Independently transcribed squeezed kernel, used to anchor the
/// substitution route.
inline GaussianForm<Jet<cplx>> squeezed_fock_generating_direct(
    const SqueezeParams& sq, const JetSpace& s,
    std::string_view var = kFockVar) {
  auto nu = jet_variable(s, var);
  auto one = Jet<cplx>::constant(s, 1.0);
  auto ip = jet_inv(one + nu);
  auto zero = Jet<cplx>(s);
  double A = sq.a_const();
  cplx B = sq.b_const();
  auto ratio = (one - nu) * ip;
  return {ip * cplx(2),       ratio * (2.0 * A), ratio * std::conj(B),
          ratio * B,          zero,              zero};
}
}  // namespace closedform

namespace detail {
inline JetSpace fock_space(int n) {
  return JetSpace{{std::string(kFockVar), n, 0.0}};
}

/// The kernel's nu^n coefficient assembled directly: with Q the quadratic
/// form in the exponent at nu = 0, the member is
/// 2 (-1)^n e^{-Q} sum_k C(n,k) (-2Q)^k / k!. The weights are exact, so
/// high orders stay well conditioned where order-n jet extraction through
/// the kernel's pole at nu = -1 loses digits.
inline PolyGaussian<cplx> fock_member(int n, double A, cplx B) {
  GaussianForm<cplx> base{1.0, 2.0 * A, std::conj(B), B, 0.0, 0.0};
  Poly2 q = Poly2::monomial(1, 1, 2.0 * A);
  if (B != cplx{}) {
    q += Poly2::monomial(2, 0, std::conj(B));
    q += Poly2::monomial(0, 2, B);
  }
  std::vector<double> coef(static_cast<size_t>(n) + 1);
  coef[0] = 1.0;
  for (int k = 1; k <= n; ++k)
    coef[static_cast<size_t>(k)] =
        coef[static_cast<size_t>(k) - 1] * (-2.0) * (n - k + 1) / (k * k);
  Poly2 acc = Poly2::constant(coef[static_cast<size_t>(n)]);
  for (int k = n - 1; k >= 0; --k)
    acc = acc * q + Poly2::constant(coef[static_cast<size_t>(k)]);
  double front = (n % 2 == 0) ? 2.0 : -2.0;
  PolyGaussian<cplx> r{base, {}};
  for (const auto& [k, v] : acc.t) r.terms[k] = front * v;
  return r;
}
}  // namespace detail

/// The n-photon Fock state as a polynomial-times-Gaussian form.
inline PolyGaussian<cplx> fock_polygaussian(int n) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  return detail::fock_member(n, 1.0, 0.0);
}

/// Wigner function of the n-photon Fock state at one point.
inline double fock_wigner(int n, PhasePoint pt) {
  return evaluate_real(fock_polygaussian(n), pt);
}

inline PolyGaussian<cplx> squeezed_fock_polygaussian(int n,
                                                     const SqueezeParams& sq) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  return detail::fock_member(n, sq.a_const(), sq.b_const());
}

inline double squeezed_fock_wigner(int n, const SqueezeParams& sq,
                                   PhasePoint pt) {
  return evaluate_real(squeezed_fock_polygaussian(n, sq), pt);
}

/// Independent Fock Wigner evaluator: 2 (-1)^n L_n(4|alpha|^2) e^{-2|alpha|^2}
/// with the Laguerre polynomial built by the three-term recurrence.
inline double laguerre_oracle(int n, PhasePoint pt) {
  if (n < 0) throw std::invalid_argument("photon number must be >= 0");
  double z = std::norm(pt.alpha());
  double x = 4.0 * z;
  double lm1 = 1.0;          // L_0
  double l = 1.0 - x;        // L_1
  if (n == 0) l = lm1;
  for (int k = 1; k < n; ++k) {
    double lp = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
    lm1 = l;
    l = lp;
  }
  double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return 2.0 * sign * l * std::exp(-2.0 * z);
}

}  // namespace wiggen
