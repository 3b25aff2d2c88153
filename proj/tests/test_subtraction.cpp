#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wiggen/fock.hpp"
#include "wiggen/fock_basis.hpp"
#include "wiggen/subtraction.hpp"

using namespace wiggen;
using Catch::Matchers::WithinAbs;

namespace {

const double kB3 = 2.0 * std::sqrt(2.0);

GaussianForm<cplx> sts(double T) { return squeezed_thermal_form(T, 3.0, kB3); }

double grid_dev(const PolyGaussian<cplx>& a, const PolyGaussian<cplx>& b,
                double lo = -4.0, double hi = 4.0, double step = 0.1) {
  double dev = 0.0;
  for (double q = lo; q <= hi; q += step)
    for (double p = lo; p <= hi; p += step)
      dev = std::max(dev,
                     std::abs(evaluate_real(a, {q, p}) -
                              evaluate_real(b, {q, p})));
  return dev;
}

}  // namespace

TEST_CASE("formal generating function matches the closed form") {
  auto s = ladder_space(3);
  for (double T : {1.0, 0.9}) {
    auto gen = formal_generating(sts(T), s);
    auto anchor = closedform::formal_generating_sts(T, 3.0, kB3, s);
    CHECK(max_coeff_distance(gen.c, anchor.c) < 1e-12);
    CHECK(max_coeff_distance(gen.u, anchor.u) < 1e-12);
    CHECK(max_coeff_distance(gen.v, anchor.v) < 1e-12);
    CHECK(max_coeff_distance(gen.w, anchor.w) < 1e-12);
    CHECK(max_coeff_distance(gen.x, anchor.x) < 1e-12);
    CHECK(max_coeff_distance(gen.y, anchor.y) < 1e-12);
  }
}

TEST_CASE("formal trace generating function") {
  auto s = ladder_space(3);

  SECTION("matches the closed form") {
    for (double T : {1.0, 0.9, 0.6}) {
      auto tr = formal_trace_generating(sts(T), s);
      auto anchor = closedform::formal_trace_sts(T, 3.0, kB3, s);
      CHECK(max_coeff_distance(tr, anchor) < 1e-12);
    }
  }

  SECTION("constant term is the trace of the input") {
    auto tr = formal_trace_generating(sts(0.9), s);
    CHECK_THAT(tr.coeff({0, 0}).real(), WithinAbs(1.0, 1e-12));
  }

  SECTION("first derivative is the mean photon number") {
    auto tr = formal_trace_generating(sts(0.9), s);
    CHECK_THAT(tr.deriv({1, 1}).real(),
               WithinAbs((3.0 - 0.9) / (2.0 * 0.9), 1e-12));
  }

  SECTION("vacuum cannot be subtracted from") {
    auto tr = formal_trace_generating(vacuum_form(), s);
    CHECK_THAT(std::abs(tr.deriv({1, 1})), WithinAbs(0.0, 1e-13));
    CHECK_THROWS_AS(formal_subtracted_wigner(vacuum_form(), 1, {0.0, 0.0}),
                    std::domain_error);
  }
}

TEST_CASE("formal subtraction origin values") {
  SECTION("pinned values") {
    CHECK_THAT(formal_subtracted_wigner(sts(1.0), 1, {0.0, 0.0}),
               WithinAbs(-2.0, 1e-10));
    CHECK_THAT(formal_subtracted_wigner(sts(0.9), 1, {0.0, 0.0}),
               WithinAbs(-1.311428571429, 1e-9));
  }

  SECTION("closed origin formula across parameters") {
    for (double T : {1.0, 0.8, 0.5})
      for (double A : {1.5, 3.0, 4.0}) {
        cplx B = std::sqrt(A * A - 1.0);
        auto f = squeezed_thermal_form(T, A, B);
        CHECK_THAT(formal_subtracted_wigner(f, 1, {0.0, 0.0}),
                   WithinAbs(-2.0 * T * T * (T * A - 1.0) / (A - T), 1e-10));
      }
  }

  SECTION("n=0 returns the input state") {
    PhasePoint pt{0.7, -0.2};
    CHECK_THAT(formal_subtracted_wigner(sts(0.9), 0, pt),
               WithinAbs(evaluate_real(sts(0.9), pt), 1e-13));
  }
}

TEST_CASE("single subtraction closed form") {
  for (double T : {1.0, 0.9}) {
    auto pg = formal_subtracted_polygaussian(sts(T), 1);
    auto anchor = closedform::one_subtracted_sts(T, 3.0, kB3);
    CHECK_THAT(grid_dev(pg, anchor), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("polygaussian and pointwise formal routes agree") {
  for (int n : {1, 2, 3}) {
    auto pg = formal_subtracted_polygaussian(sts(0.9), n);
    for (double q = -2.0; q <= 2.0; q += 0.4)
      CHECK_THAT(evaluate_real(pg, {q, 0.3}),
                 WithinAbs(formal_subtracted_wigner(sts(0.9), n, {q, 0.3}),
                           1e-11));
    CHECK_THAT(phase_space_integral(pg).real(), WithinAbs(1.0, 1e-9));
  }
}

TEST_CASE("single subtraction equals the squeezed single photon state") {
  auto pg = formal_subtracted_polygaussian(sts(1.0), 1);
  auto sf = squeezed_fock_polygaussian(1, squeeze_from_mean_n(1.0, 0.0));
  CHECK_THAT(grid_dev(pg, sf, -4.0, 4.0, 0.05), WithinAbs(0.0, 1e-12));

  // for three photons the two families genuinely differ
  auto pg3 = formal_subtracted_polygaussian(sts(1.0), 3);
  auto sf3 = squeezed_fock_polygaussian(3, squeeze_from_mean_n(1.0, 0.0));
  CHECK(grid_dev(pg3, sf3, -3.0, 3.0, 0.05) > 1e-3);
}

TEST_CASE("origin sign criterion") {
  CHECK(negativity_at_origin(make_spec(StateKind::squeezed_thermal, 1.0, 0.0,
                                       0.9)) == OriginSign::negative);
  CHECK(negativity_at_origin(make_spec(StateKind::squeezed_thermal, 0.0023,
                                       0.0, 0.9)) == OriginSign::nonnegative);
  CHECK_THROWS_AS(negativity_at_origin(make_spec(StateKind::vacuum)),
                  std::domain_error);
}

TEST_CASE("formal subtraction against the Fock oracle") {
  for (double T : {1.0, 0.9}) {
    auto rho = fockspace::squeeze_dm(
        fockspace::thermal_dm(T, fockspace::kDefaultDim),
        0.5 * std::acosh(3.0), 0.0);
    for (int n : {1, 3}) {
      auto pg = formal_subtracted_polygaussian(sts(T), n);
      auto sub = fockspace::annihilate(rho, n);
      double dev = 0.0;
      for (double q = -3.0; q <= 3.0; q += 0.2)
        dev = std::max(dev, std::abs(evaluate_real(pg, {q, 0.0}) -
                                     fockspace::wigner_from_dm(sub, {q, 0.0})));
      CHECK_THAT(dev, WithinAbs(0.0, 1e-7));
    }
  }
}

TEST_CASE("heralded generating function matches the closed form") {
  auto s = tap_space(3);
  double zeta = 0.2;
  for (double T : {1.0, 0.9}) {
    auto gen = heralded_generating(sts(T), zeta, s);
    auto anchor = closedform::heralded_generating_sts(T, 3.0, kB3, zeta, s);
    CHECK(max_coeff_distance(gen.c, anchor.c) < 1e-12);
    CHECK(max_coeff_distance(gen.u, anchor.u) < 1e-12);
    CHECK(max_coeff_distance(gen.v, anchor.v) < 1e-12);
    CHECK(max_coeff_distance(gen.w, anchor.w) < 1e-12);
    CHECK(max_coeff_distance(gen.x, anchor.x) < 1e-13);
    CHECK(max_coeff_distance(gen.y, anchor.y) < 1e-13);
  }
}

TEST_CASE("herald probabilities") {
  double zeta = 0.2;

  SECTION("trace closed form") {
    auto s = tap_space(4);
    for (double T : {1.0, 0.9}) {
      auto tr = heralded_trace_generating(sts(T), zeta, s);
      auto anchor = closedform::heralded_trace_sts(T, 3.0, zeta, s);
      CHECK(max_coeff_distance(tr, anchor) < 1e-12);
    }
  }

  SECTION("unit scalar at J=1") {
    auto s = tap_space(0, 1.0);
    auto tr = heralded_trace_generating(sts(0.9), zeta, s);
    CHECK_THAT(tr.value().real(), WithinAbs(1.0, 1e-12));
  }

  SECTION("vacuum input never heralds") {
    auto p = herald_probabilities(vacuum_form(), zeta, 4);
    CHECK_THAT(p[0], WithinAbs(1.0, 1e-13));
    for (int n = 1; n <= 4; ++n)
      CHECK_THAT(p[static_cast<size_t>(n)], WithinAbs(0.0, 1e-13));
  }

  SECTION("two-mode oracle agreement") {
    auto rho = fockspace::squeeze_dm(
        fockspace::thermal_dm(0.9, fockspace::kDefaultSignalDim),
        0.5 * std::acosh(3.0), 0.0);
    auto p = herald_probabilities(sts(0.9), zeta, 4);
    for (int n = 0; n <= 4; ++n)
      CHECK_THAT(p[static_cast<size_t>(n)],
                 WithinAbs(fockspace::beamsplit_and_herald(rho, zeta, n)
                               .probability,
                           1e-6));
  }
}

TEST_CASE("heralded subtraction") {
  double zeta = 0.2;

  SECTION("n=0 heralding is a normalized state") {
    auto pg = heralded_subtracted_polygaussian(sts(0.9), zeta, 0);
    CHECK_THAT(phase_space_integral(pg).real(), WithinAbs(1.0, 1e-10));
  }

  SECTION("small tap share approaches formal subtraction") {
    double w = heralded_subtracted_wigner(sts(1.0), 1e-3, 1, {0.0, 0.0});
    CHECK_THAT(w, WithinAbs(-2.0, 1e-2));
    CHECK(small_zeta_check(sts(1.0), 1e-3) <
          small_zeta_check(sts(1.0), 1e-2));
  }

  SECTION("pointwise and polynomial routes agree") {
    for (int n : {1, 2}) {
      auto pg = heralded_subtracted_polygaussian(sts(0.9), zeta, n);
      for (double q = -2.0; q <= 2.0; q += 0.5)
        CHECK_THAT(evaluate_real(pg, {q, -0.3}),
                   WithinAbs(heralded_subtracted_wigner(sts(0.9), zeta, n,
                                                        {q, -0.3}),
                             1e-11));
    }
  }

  SECTION("two-mode oracle slice") {
    auto rho = fockspace::squeeze_dm(
        fockspace::vacuum_dm(fockspace::kDefaultSignalDim),
        0.5 * std::acosh(3.0), 0.0);
    auto h = fockspace::beamsplit_and_herald(rho, zeta, 3);
    auto pg = heralded_subtracted_polygaussian(sts(1.0), zeta, 3);
    double dev = 0.0;
    for (double q = -3.0; q <= 3.0; q += 0.2)
      dev = std::max(dev, std::abs(evaluate_real(pg, {q, 0.0}) -
                                   fockspace::wigner_from_dm(h.rho, {q, 0.0})));
    CHECK_THAT(dev, WithinAbs(0.0, 1e-5));
  }

  SECTION("invalid tap shares are rejected") {
    CHECK_THROWS_AS(heralded_subtracted_wigner(sts(1.0), 0.0, 1, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(heralded_subtracted_wigner(sts(1.0), 1.0, 1, {0.0, 0.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("click conditioned state") {
  double zeta = 0.2;

  SECTION("vacuum input never clicks") {
    CHECK_THROWS_AS(npnr_state(vacuum_form(), zeta), std::domain_error);
  }

  SECTION("normalization and mixture identity") {
    auto click = npnr_state(sts(1.0), zeta);
    CHECK_THAT(click.p_click + click.p_no_click, WithinAbs(1.0, 1e-12));
    CHECK_THAT(click.integral(), WithinAbs(1.0, 1e-10));

    // recombine from the number-resolved members
    auto probs = herald_probabilities(sts(1.0), zeta, 24);
    for (double q : {0.0, 0.5, 1.2})
      for (double p : {0.0, -0.8}) {
        double mix = 0.0;
        for (int n = 1; n <= 24; ++n)
          mix += probs[static_cast<size_t>(n)] *
                 heralded_subtracted_wigner(sts(1.0), zeta, n, {q, p});
        mix /= click.p_click;
        CHECK_THAT(click.value({q, p}), WithinAbs(mix, 1e-8));
      }
  }

  SECTION("small tap share approaches the single subtraction") {
    auto click = npnr_state(sts(1.0), 1e-3);
    CHECK_THAT(click.value({0.0, 0.0}), WithinAbs(-2.0, 2e-2));
  }
}

TEST_CASE("subtraction driver") {
  auto r1 = formal_subtraction(sts(0.9), 1);
  CHECK(r1.method == SubtractionMethod::formal);
  CHECK_THAT(evaluate_real(r1.wigner, {0.0, 0.0}),
             WithinAbs(-1.311428571429, 1e-9));

  auto r2 = heralded_subtraction(sts(0.9), 0.2, 1);
  CHECK(r2.method == SubtractionMethod::heralded);
  CHECK(r2.herald_probability > 0.0);
  CHECK_THAT(phase_space_integral(r2.wigner).real(), WithinAbs(1.0, 1e-10));
}
