#pragma once

// Independent cross-check machinery: truncated density matrices in the Fock
// basis. States are built by matrix exponentials of the squeeze generator,
// photon subtraction by ladder-operator products, heralding by binomial
// beam-splitter amplitudes, and Wigner values by the displaced-parity trace.
// Nothing here shares code with the generating-function pipeline; numerical
// agreement between the two routes is the point.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "wiggen/gaussian.hpp"
#include "wiggen/photon_distribution.hpp"

namespace wiggen::fockspace {

using Mat = Eigen::MatrixXcd;

// Truncation defaults; chosen so that doubling them moves the checked
// quantities by far less than the comparison tolerances.
inline constexpr int kDefaultDim = 120;
inline constexpr int kDefaultSignalDim = 112;
inline constexpr int kDefaultTapDim = 30;

inline Mat lowering_op(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
  return a;
}

inline Mat vacuum_dm(int dim) {
  Mat r = Mat::Zero(dim, dim);
  r(0, 0) = 1.0;
  return r;
}

inline Mat fock_dm(int n, int dim) {
  if (n < 0 || n >= dim)
    throw std::invalid_argument("Fock index outside truncation");
  Mat r = Mat::Zero(dim, dim);
  r(n, n) = 1.0;
  return r;
}

/// Thermal state of purity T: geometric diagonal with ratio (1-T)/(1+T),
/// normalized over the truncated space.
inline Mat thermal_dm(double purity, int dim) {
  if (!(purity > 0.0 && purity <= 1.0))
    throw std::invalid_argument("thermal purity must lie in (0, 1]");
  double lam = (1.0 - purity) / (1.0 + purity);
  Mat r = Mat::Zero(dim, dim);
  double sum = 0.0;
  double w = 1.0;
  for (int k = 0; k < dim; ++k, w *= lam) {
    r(k, k) = w;
    sum += w;
  }
  return r / sum;
}

/// Squeeze operator exp((conj(xi) a^2 - xi a+^2)/2) with xi = r e^{i phi}.
inline Mat squeeze_op(double r, double phi, int dim) {
  Mat a = lowering_op(dim);
  cplx xi = std::polar(r, phi);
  Mat g = 0.5 * (std::conj(xi) * (a * a).eval() -
                 xi * (a.adjoint() * a.adjoint()).eval());
  return g.exp();
}

inline Mat squeeze_dm(const Mat& rho, double r, double phi) {
  Mat s = squeeze_op(r, phi, static_cast<int>(rho.rows()));
  return s * rho * s.adjoint();
}

/// Displacement operator exp(alpha a+ - conj(alpha) a).
inline Mat displacement_op(cplx alpha, int dim) {
  Mat a = lowering_op(dim);
  Mat g = alpha * a.adjoint() - std::conj(alpha) * a;
  return g.exp();
}

/// Displaced-parity Wigner value with a prebuilt displacement operator.
inline double wigner_given_displacement(const Mat& rho, const Mat& disp) {
  Mat m = disp.adjoint() * rho * disp;
  cplx s = 0.0;
  double sign = 1.0;
  for (int k = 0; k < m.rows(); ++k, sign = -sign) s += sign * m(k, k);
  return 2.0 * s.real();
}

inline double wigner_from_dm(const Mat& rho, PhasePoint pt) {
  Mat d = displacement_op(pt.alpha(), static_cast<int>(rho.rows()));
  return wigner_given_displacement(rho, d);
}

/// Unnormalized subtraction weight tr(a^n rho a+^n).
inline double subtraction_weight(const Mat& rho, int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  Mat a = lowering_op(static_cast<int>(rho.rows()));
  Mat top = rho;
  for (int k = 0; k < n; ++k) top = a * top * a.adjoint();
  return top.trace().real();
}

/// Normalized a^n rho a+^n / tr.
inline Mat annihilate(const Mat& rho, int n) {
  if (n < 0) throw std::invalid_argument("subtraction count must be >= 0");
  Mat a = lowering_op(static_cast<int>(rho.rows()));
  Mat top = rho;
  for (int k = 0; k < n; ++k) top = a * top * a.adjoint();
  double tr = top.trace().real();
  if (tr < 1e-14)
    throw std::domain_error(
        "subtraction weight vanishes: the state has no such photon component "
        "to remove");
  return top / tr;
}

namespace detail {
/// Binomial coefficients by the addition rule, exact in double up to the
/// needed sizes.
inline double binom(int n, int k) {
  static thread_local std::vector<std::vector<double>> rows{{1.0}};
  if (k < 0 || k > n) return 0.0;
  while (static_cast<int>(rows.size()) <= n) {
    const auto& prev = rows.back();
    std::vector<double> next(prev.size() + 1, 1.0);
    for (size_t i = 1; i + 1 < next.size(); ++i)
      next[i] = prev[i - 1] + prev[i];
    rows.push_back(std::move(next));
  }
  return rows[static_cast<size_t>(n)][static_cast<size_t>(k)];
}

/// Amplitude of |m, 0> -> |m-k, k> under a beam splitter of reflectivity
/// zeta with vacuum in the second port.
inline cplx split_amplitude(int m, int k, double zeta) {
  cplx irz(0.0, std::sqrt(zeta));
  cplx amp = std::sqrt(binom(m, k)) *
             std::pow(std::sqrt(1.0 - zeta), double(m - k));
  cplx phase = 1.0;
  for (int i = 0; i < k; ++i) phase *= irz;
  return amp * phase;
}
}  // namespace detail

/// Two-mode density matrix over a signal x tap product basis; only used to
/// cross-check the reduced single-mode formulas.
struct TwoModeState {
  int dim_a = 0;
  int dim_b = 0;
  Mat m;  // (dim_a * dim_b) square, index ia * dim_b + ib

  int idx(int ia, int ib) const { return ia * dim_b + ib; }
};

/// Send rho and a vacuum through a beam splitter of reflectivity zeta.
inline TwoModeState beamsplit_with_vacuum(const Mat& rho, double zeta,
                                          int dim_a, int dim_b) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("beam-splitter share must lie in (0, 1)");
  int dim_in = static_cast<int>(rho.rows());
  TwoModeState ts{dim_a, dim_b, Mat::Zero(dim_a * dim_b, dim_a * dim_b)};
  for (int m = 0; m < dim_in; ++m)
    for (int mp = 0; mp < dim_in; ++mp) {
      cplx r = rho(m, mp);
      if (r == cplx{}) continue;
      for (int k = 0; k <= m; ++k) {
        if (m - k >= dim_a || k >= dim_b) continue;
        cplx ca = detail::split_amplitude(m, k, zeta);
        for (int kp = 0; kp <= mp; ++kp) {
          if (mp - kp >= dim_a || kp >= dim_b) continue;
          cplx cb = detail::split_amplitude(mp, kp, zeta);
          ts.m(ts.idx(m - k, k), ts.idx(mp - kp, kp)) += ca * std::conj(cb) * r;
        }
      }
    }
  return ts;
}

inline Mat partial_trace_tap(const TwoModeState& ts) {
  Mat r = Mat::Zero(ts.dim_a, ts.dim_a);
  for (int ia = 0; ia < ts.dim_a; ++ia)
    for (int ja = 0; ja < ts.dim_a; ++ja)
      for (int ib = 0; ib < ts.dim_b; ++ib)
        r(ia, ja) += ts.m(ts.idx(ia, ib), ts.idx(ja, ib));
  return r;
}

struct HeraldResult {
  Mat rho;            // normalized heralded state
  double probability; // chance of the heralding outcome
};

inline HeraldResult herald_from_two_mode(const TwoModeState& ts, int n_detect) {
  if (n_detect < 0 || n_detect >= ts.dim_b)
    throw std::invalid_argument("herald count outside tap truncation");
  Mat r = Mat::Zero(ts.dim_a, ts.dim_a);
  for (int ia = 0; ia < ts.dim_a; ++ia)
    for (int ja = 0; ja < ts.dim_a; ++ja)
      r(ia, ja) = ts.m(ts.idx(ia, n_detect), ts.idx(ja, n_detect));
  double p = r.trace().real();
  if (p < 1e-300) throw std::domain_error("herald probability vanishes");
  return {r / p, p};
}

/// Herald directly from the input state: tap off a share zeta, detect
/// n photons in the tap, return the conditioned signal state. Algebraically
/// the reduction of the two-mode route; kept independent of mode caps.
inline HeraldResult beamsplit_and_herald(const Mat& rho, double zeta,
                                         int n_detect) {
  if (!(zeta > 0.0 && zeta < 1.0))
    throw std::invalid_argument("beam-splitter share must lie in (0, 1)");
  if (n_detect < 0) throw std::invalid_argument("herald count must be >= 0");
  int dim_in = static_cast<int>(rho.rows());
  int dim_out = dim_in;
  Mat r = Mat::Zero(dim_out, dim_out);
  for (int i = 0; i + n_detect < dim_in; ++i)
    for (int j = 0; j + n_detect < dim_in; ++j) {
      cplx ca = detail::split_amplitude(i + n_detect, n_detect, zeta);
      cplx cb = detail::split_amplitude(j + n_detect, n_detect, zeta);
      r(i, j) = ca * std::conj(cb) * rho(i + n_detect, j + n_detect);
    }
  double p = r.trace().real();
  if (p < 1e-300) throw std::domain_error("herald probability vanishes");
  return {r / p, p};
}

inline PhotonDistribution photon_dist_dm(const Mat& rho, int n_report) {
  if (n_report < 0) throw std::invalid_argument("report length must be >= 0");
  int dim = static_cast<int>(rho.rows());
  PhotonDistribution d;
  d.p.resize(static_cast<size_t>(n_report) + 1, 0.0);
  double sum = 0.0;
  for (int n = 0; n < dim; ++n) {
    double pn = rho(n, n).real();
    if (n <= n_report) {
      d.p[static_cast<size_t>(n)] = pn;
      sum += pn;
    }
    d.mean += n * pn;
    d.second_moment += double(n) * n * pn;
  }
  d.tail_mass = 1.0 - sum;
  return d;
}

// --- sanity measures used by the invariant tests ---

inline double hermiticity_error(const Mat& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

inline double trace_error(const Mat& rho) {
  return std::abs(rho.trace() - cplx(1.0));
}

inline double min_eigenvalue(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es((rho + rho.adjoint()) / 2.0);
  return es.eigenvalues().minCoeff();
}

}  // namespace wiggen::fockspace
