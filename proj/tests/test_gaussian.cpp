#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wiggen/gaussian.hpp"
#include "wiggen/states.hpp"

using namespace wiggen;
using Catch::Matchers::WithinAbs;

namespace {

// Trapezoid sums converge geometrically for entire integrands with Gaussian
// decay, so a few hundred points per axis give near machine precision once
// the box covers the support.
template <class F>
double quad2d(F&& f, double qc, double pc, double half_width, int n = 320) {
  double h = 2.0 * half_width / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      sum += f(PhasePoint{qc - half_width + i * h, pc - half_width + j * h});
  return sum * h * h / (2.0 * M_PI);
}

template <class F>
double quad1d(F&& f, double center, double half_width, int n = 2000) {
  double h = 2.0 * half_width / n;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) sum += f(center - half_width + i * h);
  return sum * h / (2.0 * M_PI);
}

struct RandomForm {
  GaussianForm<cplx> form;
  double qc, pc, half_width;
};

// Real-valued integrable form: u real, w = conj(v), y = conj(x),
// u^2 > 4|v|^2 for convergence.
RandomForm random_physical_form(std::mt19937& gen) {
  std::uniform_real_distribution<double> uu(0.6, 3.0), frac(0.0, 0.85),
      ang(0.0, 6.28), xr(-0.8, 0.8);
  double u = uu(gen);
  cplx v = std::polar(0.5 * u * frac(gen), ang(gen));
  cplx x(xr(gen), xr(gen));
  GaussianForm<cplx> f{1.0, u, v, std::conj(v), x, std::conj(x)};
  double decay = 0.5 * (u - 2.0 * std::abs(v));
  cplx a0 = (u * std::conj(x) - 2.0 * std::conj(v) * x) /
            (u * u - 4.0 * std::norm(v));
  PhasePoint c = PhasePoint::from_alpha(a0);
  return {f, c.q, c.p, 10.0 / std::sqrt(decay)};
}

}  // namespace

TEST_CASE("form evaluation") {
  auto vac = vacuum_form();
  CHECK_THAT(evaluate_real(vac, {0.0, 0.0}), WithinAbs(2.0, 1e-15));
  CHECK_THAT(evaluate_real(vac, {1.0, 1.0}),
             WithinAbs(2.0 * std::exp(-2.0), 1e-15));

  auto thermal = squeezed_thermal_form(0.9, 1.0, 0.0);
  CHECK_THAT(evaluate_real(thermal, {0.0, 0.0}), WithinAbs(1.8, 1e-15));
}

TEST_CASE("affine substitution") {
  auto vac = vacuum_form();

  SECTION("identity map") {
    auto same = affine_substitute(vac, 1.0, 0.0, 0.0);
    for (double q : {-1.0, 0.3, 2.0}) {
      PhasePoint pt{q, 0.7};
      CHECK_THAT(evaluate_real(same, pt),
                 WithinAbs(evaluate_real(vac, pt), 1e-14));
    }
  }

  SECTION("Bogoliubov map produces the squeezed form") {
    SqueezeParams sq{0.5 * std::acosh(3.0), 0.0};
    auto squ = bogoliubov(vac, sq);
    auto direct = squeezed_thermal_form(1.0, 3.0, 2.0 * std::sqrt(2.0));
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
      PhasePoint pt{pos(gen), pos(gen)};
      CHECK_THAT(evaluate_real(squ, pt),
                 WithinAbs(evaluate_real(direct, pt), 1e-12));
    }
  }

  SECTION("substitution commutes with evaluation") {
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> r(-0.7, 0.7);
    for (int i = 0; i < 20; ++i) {
      cplx mu(1.0 + r(gen), r(gen)), nu(r(gen), r(gen)), de(r(gen), r(gen));
      auto mapped = affine_substitute(vacuum_form(), mu, nu, de);
      cplx a0(r(gen), r(gen));
      cplx moved = mu * a0 + nu * std::conj(a0) + de;
      auto lhs = evaluate(mapped, PhasePoint::from_alpha(a0));
      auto rhs = evaluate(vacuum_form(), PhasePoint::from_alpha(moved));
      CHECK_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-12));
    }
  }
}

TEST_CASE("phase space integral") {
  SECTION("vacuum integrates to one") {
    CHECK_THAT(phase_space_integral(vacuum_form()).real(),
               WithinAbs(1.0, 1e-14));
  }

  SECTION("pure squeezed form has unit trace") {
    auto squ = squeezed_thermal_form(1.0, 3.0, 2.0 * std::sqrt(2.0));
    CHECK_THAT(phase_space_integral(squ).real(), WithinAbs(1.0, 1e-13));
  }

  SECTION("form with linear terms matches quadrature") {
    GaussianForm<cplx> f{1.0, 2.0, 0.0, 0.0, cplx(0.3, 0.1), cplx(0.3, -0.1)};
    double ref = quad2d([&](PhasePoint pt) { return evaluate_real(f, pt); },
                        0.2, 0.0, 9.0, 900);
    CHECK_THAT(phase_space_integral(f).real(), WithinAbs(ref, 1e-10));
  }

  SECTION("random physical forms match quadrature") {
    std::mt19937 gen(2024);
    for (int i = 0; i < 20; ++i) {
      auto [f, qc, pc, hw] = random_physical_form(gen);
      double ref = quad2d([&](PhasePoint pt) { return evaluate_real(f, pt); },
                          qc, pc, hw);
      CHECK_THAT(phase_space_integral(f).real(), WithinAbs(ref, 1e-8));
    }
  }

  SECTION("divergent forms are rejected") {
    GaussianForm<cplx> bad{1.0, 1.0, 0.6, 0.6, 0.0, 0.0};  // u^2 < 4vw
    CHECK_THROWS_AS(phase_space_integral(bad), std::domain_error);
    GaussianForm<cplx> neg{1.0, -1.0, 0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(phase_space_integral(neg), std::domain_error);
    CHECK_FALSE(integrable(neg));
    CHECK(integrable(vacuum_form()));
  }

  SECTION("kernel weighting matches folding the kernel into the form") {
    std::mt19937 gen(77);
    std::uniform_real_distribution<double> sr(0.5, 2.5), pr(-0.4, 1.2);
    for (int i = 0; i < 20; ++i) {
      auto [f, qc, pc, hw] = random_physical_form(gen);
      cplx g(sr(gen), 0.3 * pr(gen));
      cplx s(sr(gen), 0.3 * pr(gen));
      cplx p(pr(gen), 0.2 * pr(gen));
      GaussianForm<cplx> folded = f;
      folded.c *= g / s;
      folded.u += p / s;
      if (!integrable(folded)) continue;
      cplx a = kernel_integral(f, g, s, p);
      cplx b = phase_space_integral(folded);
      CHECK_THAT(std::abs(a - b), WithinAbs(0.0, 1e-12));
    }
    GaussianForm<cplx> vac = vacuum_form();
    CHECK_THROWS_AS(kernel_integral(vac, cplx(1.0), cplx(-1.0), cplx(0.0)),
                    std::domain_error);
  }
}

TEST_CASE("polynomial prefactors") {
  auto vac = vacuum_form();

  SECTION("monomial multiplication and evaluation") {
    auto pg = multiply_monomial(as_poly_gaussian(vac), 1, 1);  // |alpha|^2 W
    PhasePoint pt{1.2, -0.4};
    double a2 = std::norm(pt.alpha());
    CHECK_THAT(evaluate_real(pg, pt),
               WithinAbs(a2 * evaluate_real(vac, pt), 1e-14));
  }

  SECTION("integral of a polynomial times Gaussian matches quadrature") {
    std::mt19937 gen(99);
    for (int i = 0; i < 10; ++i) {
      auto [f, qc, pc, hw] = random_physical_form(gen);
      auto pg = multiply_monomial(as_poly_gaussian(f), 1, 1);
      pg = add(pg, multiply_monomial(as_poly_gaussian(f), 2, 2));
      double ref = quad2d([&](PhasePoint pt) { return evaluate_real(pg, pt); },
                          qc, pc, hw);
      CHECK_THAT(phase_space_integral(pg).real(), WithinAbs(ref, 5e-8));
    }
  }

  SECTION("adding requires a shared base") {
    auto a = as_poly_gaussian(vac);
    auto b = as_poly_gaussian(squeezed_thermal_form(0.9, 1.0, 0.0));
    CHECK_THROWS_AS(add(a, b), std::invalid_argument);
  }
}

TEST_CASE("differentiation") {
  SECTION("linear exponent differentiates to its slope") {
    GaussianForm<cplx> f{1.0, 0.0, 0.0, 0.0, cplx(0.4, 0.2), 0.0};
    auto d = differentiate(as_poly_gaussian(f), Wrt::alpha);
    PhasePoint pt{0.7, 0.1};
    CHECK_THAT(std::abs(evaluate(d, pt) - cplx(0.4, 0.2) * evaluate(f, pt)),
               WithinAbs(0.0, 1e-14));
  }

  SECTION("mixed second derivative of the vacuum at the origin") {
    auto d =
        differentiate(differentiate(as_poly_gaussian(vacuum_form()), Wrt::alpha),
                      Wrt::alpha_conj);
    CHECK_THAT(evaluate(d, {0.0, 0.0}).real(), WithinAbs(-4.0, 1e-14));
  }

  SECTION("derivatives match finite differences") {
    auto pg = multiply_monomial(
        as_poly_gaussian(squeezed_thermal_form(0.9, 3.0, 2.0 * std::sqrt(2.0))),
        1, 0);
    auto da = differentiate(pg, Wrt::alpha);
    cplx a0(0.35, -0.6);
    double h = 1e-5;
    // central difference in the holomorphic direction
    cplx fd = (evaluate(pg, PhasePoint::from_alpha(a0 + h)) -
               evaluate(pg, PhasePoint::from_alpha(a0 - h))) /
                  (2.0 * h) -
              (evaluate(pg, PhasePoint::from_alpha(a0 + cplx(0, h))) -
               evaluate(pg, PhasePoint::from_alpha(a0 - cplx(0, h)))) *
                  cplx(0, 1.0) / (2.0 * h);
    CHECK_THAT(std::abs(0.5 * fd - evaluate(da, PhasePoint::from_alpha(a0))),
               WithinAbs(0.0, 1e-7));
  }
}

TEST_CASE("marginals") {
  SECTION("vacuum marginal is the ground state density") {
    auto vac = vacuum_form();
    CHECK_THAT(marginal_value(vac, Axis::p, 0.0),
               WithinAbs(1.0 / std::sqrt(M_PI), 1e-14));
    CHECK_THAT(marginal_value(vac, Axis::p, 1.0),
               WithinAbs(std::exp(-1.0) / std::sqrt(M_PI), 1e-14));
  }

  SECTION("marginal matches direct 1D quadrature") {
    auto f = squeezed_thermal_form(0.9, 3.0, 2.0 * std::sqrt(2.0));
    for (double q : {0.0, 0.4, -1.1}) {
      double ref = quad1d(
          [&](double p) {
            return evaluate_real(f, {q, p});
          },
          0.0, 25.0, 4000);
      CHECK_THAT(marginal_value(f, Axis::p, q), WithinAbs(ref, 1e-10));
    }
  }

  SECTION("polynomial marginal matches quadrature") {
    auto pg = multiply_monomial(as_poly_gaussian(vacuum_form()), 1, 1);
    for (double q : {0.0, 0.8}) {
      double ref = quad1d(
          [&](double p) { return evaluate_real(pg, {q, p}); }, 0.0, 12.0);
      CHECK_THAT(marginal_value(pg, Axis::p, q), WithinAbs(ref, 1e-10));
    }
  }

  SECTION("marginal integrates to the trace") {
    auto f = squeezed_thermal_form(0.9, 3.0, 2.0 * std::sqrt(2.0));
    double sum = 0.0, h = 0.01;
    for (double q = -12.0; q <= 12.0; q += h)
      sum += marginal_value(f, Axis::p, q) * h;
    CHECK_THAT(sum, WithinAbs(1.0, 1e-8));
  }

  SECTION("divergent marginal direction is rejected") {
    GaussianForm<cplx> wide{1.0, 1.0, 0.51, 0.51, 0.0, 0.0};
    // u - v - w < 0: integrating over p diverges
    CHECK_THROWS_AS(marginal_value(wide, Axis::p, 0.0), std::domain_error);
  }

  SECTION("tabulation covers the requested range") {
    auto tab = tabulate_marginal(vacuum_form(), Axis::p, -1.0, 1.0, 0.5);
    REQUIRE(tab.coord.size() == 5);
    CHECK_THAT(tab.coord.front(), WithinAbs(-1.0, 1e-12));
    CHECK_THAT(tab.density[2], WithinAbs(1.0 / std::sqrt(M_PI), 1e-12));
  }
}

TEST_CASE("two mode embedding and tap integration") {
  // Splitting the vacuum with any share and tracing the tap returns vacuum.
  double zeta = 0.3;
  double rt = std::sqrt(1.0 - zeta), rz = std::sqrt(zeta);
  auto sig = two_mode_embed(vacuum_form(), rt, cplx(0.0, rz), rt,
                            cplx(0.0, -rz));
  auto tap = two_mode_embed(vacuum_form(), cplx(0.0, rz), rt,
                            cplx(0.0, -rz), rt);
  auto prod = multiply(sig, tap);
  auto back = integrate_tap(prod);
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> pos(-2.0, 2.0);
  for (int i = 0; i < 30; ++i) {
    PhasePoint pt{pos(gen), pos(gen)};
    CHECK_THAT(evaluate_real(back, pt),
               WithinAbs(evaluate_real(vacuum_form(), pt), 1e-12));
  }
}
