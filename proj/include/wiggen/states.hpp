#pragma once

// Gaussian input states: vacuum, thermal, squeezed vacuum, squeezed thermal
// and squeezed vacuum after a lossy channel. The canonical user-facing
// parameters are the mean photon number of the squeezing, its phase, and a
// purity or channel transmission; the quadratic-form constants A and B are
// always derived from those.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include "wiggen/gaussian.hpp"

namespace wiggen {

/// Squeeze transformation xi = r e^{i phi}; the state-level constants are
/// A = cosh(2r), B = e^{i phi} sinh(2r).
struct SqueezeParams {
  double r = 0.0;
  double phi = 0.0;

  double a_const() const { return std::cosh(2.0 * r); }
  cplx b_const() const { return std::polar(std::sinh(2.0 * r), phi); }
};

/// Squeezing constants from the mean photon number of the squeezed vacuum:
/// A = 1 + 2 nbar, |B| = 2 sqrt(nbar (nbar + 1)).
inline std::pair<double, cplx> ab_from_mean_n(double mean_n, double phi) {
  if (!(mean_n >= 0.0))
    throw std::invalid_argument("mean photon number must be >= 0");
  double a = 1.0 + 2.0 * mean_n;
  cplx b = std::polar(2.0 * std::sqrt(mean_n * (mean_n + 1.0)), phi);
  return {a, b};
}

inline SqueezeParams squeeze_from_mean_n(double mean_n, double phi) {
  if (!(mean_n >= 0.0))
    throw std::invalid_argument("mean photon number must be >= 0");
  return {0.5 * std::asinh(2.0 * std::sqrt(mean_n * (mean_n + 1.0))), phi};
}

enum class StateKind {
  vacuum,
  thermal,
  squeezed_vacuum,
  squeezed_thermal,
  lossy_squeezed,
};

inline std::string_view kind_name(StateKind k) {
  switch (k) {
    case StateKind::vacuum: return "vacuum";
    case StateKind::thermal: return "thermal";
    case StateKind::squeezed_vacuum: return "squeezed_vacuum";
    case StateKind::squeezed_thermal: return "squeezed_thermal";
    case StateKind::lossy_squeezed: return "lossy_squeezed";
  }
  throw std::invalid_argument("unknown state kind");
}

inline StateKind kind_from_name(std::string_view s) {
  if (s == "vacuum") return StateKind::vacuum;
  if (s == "thermal") return StateKind::thermal;
  if (s == "squeezed_vacuum") return StateKind::squeezed_vacuum;
  if (s == "squeezed_thermal") return StateKind::squeezed_thermal;
  if (s == "lossy_squeezed") return StateKind::lossy_squeezed;
  throw std::invalid_argument("unknown state kind '" + std::string(s) + "'");
}

struct StateSpec {
  StateKind kind = StateKind::vacuum;
  double mean_n = 0.0;       // mean photon number of the squeezing
  double phi = 0.0;          // squeeze phase
  double purity = 1.0;       // thermal purity T
  double transmission = 1.0; // channel transmission t (lossy kind)
  double A = 1.0;            // derived
  cplx B = 0.0;              // derived
};

inline StateSpec make_spec(StateKind kind, double mean_n = 0.0,
                           double phi = 0.0, double purity = 1.0,
                           double transmission = 1.0) {
  StateSpec s;
  s.kind = kind;
  s.phi = phi;
  switch (kind) {
    case StateKind::vacuum:
      break;
    case StateKind::thermal:
      if (!(purity > 0.0 && purity <= 1.0))
        throw std::invalid_argument("thermal purity must lie in (0, 1]");
      s.purity = purity;
      break;
    case StateKind::squeezed_vacuum:
      s.mean_n = mean_n;
      break;
    case StateKind::squeezed_thermal:
      if (!(purity > 0.0 && purity <= 1.0))
        throw std::invalid_argument("thermal purity must lie in (0, 1]");
      s.mean_n = mean_n;
      s.purity = purity;
      break;
    case StateKind::lossy_squeezed:
      if (!(transmission > 0.0 && transmission <= 1.0))
        throw std::invalid_argument("channel transmission must lie in (0, 1]");
      s.mean_n = mean_n;
      s.transmission = transmission;
      break;
  }
  if (kind == StateKind::squeezed_vacuum ||
      kind == StateKind::squeezed_thermal ||
      kind == StateKind::lossy_squeezed) {
    auto [a, b] = ab_from_mean_n(s.mean_n, phi);
    s.A = a;
    s.B = b;
  }
  return s;
}

inline GaussianForm<cplx> vacuum_form() { return {2.0, 2.0, 0.0, 0.0, 0.0, 0.0}; }

/// Squeezed thermal Wigner function built from (T, A, B) directly.
inline GaussianForm<cplx> squeezed_thermal_form(double purity, double A,
                                                cplx B) {
  if (!(purity > 0.0 && purity <= 1.0))
    throw std::invalid_argument("thermal purity must lie in (0, 1]");
  if (std::abs(A * A - std::norm(B) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "squeezing constants must satisfy A^2 - |B|^2 = 1");
  double T = purity;
  return {2.0 * T, 2.0 * T * A, T * std::conj(B), T * B, 0.0, 0.0};
}

struct LossEquivalent {
  double purity;  // T of the equivalent squeezed thermal state
  double A;
  cplx B;
};

/// A squeezed vacuum sent through a loss channel of transmission t equals a
/// squeezed thermal state with these constants.
inline LossEquivalent loss_equivalence(double transmission, double A, cplx B) {
  if (!(transmission > 0.0 && transmission <= 1.0))
    throw std::invalid_argument("channel transmission must lie in (0, 1]");
  if (std::abs(A * A - std::norm(B) - 1.0) > 1e-9)
    throw std::invalid_argument(
        "squeezing constants must satisfy A^2 - |B|^2 = 1");
  double t = transmission;
  double a = 1.0 - t;
  double T = 1.0 / std::sqrt(1.0 + 2.0 * t * a * (A - 1.0));
  return {T, (a + t * A) * T, t * B * T};
}

inline double purity_after_loss(double transmission, double A) {
  double t = transmission;
  return 1.0 / std::sqrt(1.0 + 2.0 * t * (1.0 - t) * (A - 1.0));
}

inline GaussianForm<cplx> make_state(const StateSpec& s) {
  switch (s.kind) {
    case StateKind::vacuum:
      return vacuum_form();
    case StateKind::thermal:
      return {2.0 * s.purity, 2.0 * s.purity, 0.0, 0.0, 0.0, 0.0};
    case StateKind::squeezed_vacuum:
      return squeezed_thermal_form(1.0, s.A, s.B);
    case StateKind::squeezed_thermal:
      return squeezed_thermal_form(s.purity, s.A, s.B);
    case StateKind::lossy_squeezed: {
      // attenuated form written over the raw channel parameters; equals the
      // equivalent squeezed thermal state
      double t = s.transmission;
      double a = 1.0 - t;
      double N = 1.0 + 2.0 * t * a * (s.A - 1.0);
      return {2.0 / std::sqrt(N),
              2.0 * (a + t * s.A) / N,
              t * std::conj(s.B) / N,
              t * s.B / N,
              0.0,
              0.0};
    }
  }
  throw std::invalid_argument("unknown state kind");
}

/// (T, A, B) of the squeezed-thermal form this spec is equivalent to.
inline LossEquivalent equivalent_sts(const StateSpec& s) {
  switch (s.kind) {
    case StateKind::vacuum:
      return {1.0, 1.0, 0.0};
    case StateKind::thermal:
      return {s.purity, 1.0, 0.0};
    case StateKind::squeezed_vacuum:
      return {1.0, s.A, s.B};
    case StateKind::squeezed_thermal:
      return {s.purity, s.A, s.B};
    case StateKind::lossy_squeezed:
      return loss_equivalence(s.transmission, s.A, s.B);
  }
  throw std::invalid_argument("unknown state kind");
}

/// Squeeze an arbitrary Gaussian Wigner function.
template <class R>
GaussianForm<R> bogoliubov(const GaussianForm<R>& f, const SqueezeParams& sq) {
  cplx mu = std::cosh(sq.r);
  cplx nu = std::polar(std::sinh(sq.r), sq.phi);
  return affine_substitute(f, mu, nu, cplx(0.0));
}

/// tr(rho^2) of the state with this Wigner function.
inline double state_purity(const GaussianForm<cplx>& f) {
  return detail::real_checked(phase_space_integral(multiply(f, f)), "purity");
}

}  // namespace wiggen
