#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wiggen/fock_basis.hpp"
#include "wiggen/statistics.hpp"
#include "wiggen/subtraction.hpp"

using namespace wiggen;
using Catch::Matchers::WithinAbs;

namespace {
const double kB3 = 2.0 * std::sqrt(2.0);
GaussianForm<cplx> sts(double T) { return squeezed_thermal_form(T, 3.0, kB3); }
}  // namespace

TEST_CASE("projection kernel") {
  SECTION("zero argument is the vacuum projector") {
    JetSpace s{{std::string(kCountVar), 0, 0.0}};
    auto g = projection_generating(s);
    PhasePoint pt{0.6, -0.9};
    CHECK_THAT(evaluate(g, pt).value().real(),
               WithinAbs(evaluate_real(vacuum_form(), pt), 1e-13));
  }

  SECTION("unit argument is the identity") {
    JetSpace s{{std::string(kCountVar), 0, 1.0}};
    auto g = projection_generating(s);
    for (double q : {0.0, 1.7})
      CHECK_THAT(evaluate(g, {q, 0.3}).value().real(), WithinAbs(1.0, 1e-13));
  }

  SECTION("derivative at unit argument counts photons") {
    JetSpace s{{std::string(kCountVar), 1, 1.0}};
    auto g = projection_generating(s);
    PhasePoint pt{1.1, 0.4};
    CHECK_THAT(evaluate(g, pt).coeff({1}).real(),
               WithinAbs(std::norm(pt.alpha()) - 0.5, 1e-12));
  }
}

TEST_CASE("photon number distributions of Gaussian states") {
  SECTION("vacuum") {
    auto d = distribution(vacuum_form());
    CHECK_THAT(d.p[0], WithinAbs(1.0, 1e-13));
    CHECK_THAT(d.mean, WithinAbs(0.0, 1e-13));
    CHECK_THAT(d.variance(), WithinAbs(0.0, 1e-12));
  }

  SECTION("thermal distribution is geometric") {
    double T = 0.5;
    auto d = distribution(squeezed_thermal_form(T, 1.0, 0.0));
    double nbar = (1.0 - T) / (2.0 * T);
    CHECK_THAT(d.mean, WithinAbs(nbar, 1e-12));
    double lam = nbar / (1.0 + nbar);
    for (int n = 0; n <= 6; ++n)
      CHECK_THAT(d.p[static_cast<size_t>(n)],
                 WithinAbs((1.0 - lam) * std::pow(lam, n), 1e-12));
    CHECK_THAT(d.variance(), WithinAbs(nbar * (1.0 + nbar), 1e-10));
  }

  SECTION("squeezed vacuum with unit mean") {
    auto d = distribution(sts(1.0), 60);
    CHECK_THAT(d.mean, WithinAbs(1.0, 1e-12));
    for (size_t n = 1; n < d.p.size(); n += 2)
      CHECK_THAT(d.p[n], WithinAbs(0.0, 1e-13));
    CHECK(d.tail_mass < 1e-8);
  }

  SECTION("closed mean formula across parameters") {
    for (double T : {0.4, 0.7, 1.0})
      for (double A : {1.0, 2.0, 3.5}) {
        cplx B = std::sqrt(A * A - 1.0);
        auto d = distribution(squeezed_thermal_form(T, A, B));
        CHECK_THAT(d.mean, WithinAbs((A - T) / (2.0 * T), 1e-10));
      }
  }

  SECTION("oracle agreement") {
    auto d = distribution(sts(0.9), 20);
    auto rho = fockspace::squeeze_dm(
        fockspace::thermal_dm(0.9, fockspace::kDefaultDim),
        0.5 * std::acosh(3.0), 0.0);
    auto dref = fockspace::photon_dist_dm(rho, 20);
    for (int n = 0; n <= 20; ++n)
      CHECK_THAT(d.p[static_cast<size_t>(n)],
                 WithinAbs(dref.p[static_cast<size_t>(n)], 1e-8));
    CHECK_THAT(d.mean, WithinAbs(dref.mean, 1e-8));
  }
}

TEST_CASE("count generating function for formal subtraction") {
  SECTION("unit argument reduces to the trace family") {
    for (double T : {1.0, 0.9}) {
      auto s3 = detail::with_count_var(ladder_space(4), 0, 1.0);
      auto at_one = jet_extract_partial(double_generating_formal(sts(T), s3),
                                        kCountVar, 0);
      auto tr = formal_trace_generating(sts(T), ladder_space(4));
      CHECK(max_coeff_distance(at_one, tr) < 1e-12);
    }
  }

  SECTION("closed form anchor") {
    auto s = detail::with_count_var(ladder_space(2), 3, 0.0);
    for (double T : {1.0, 0.9}) {
      auto jet = double_generating_formal(sts(T), s);
      auto anchor = closedform::double_generating_formal_sts(T, 3.0, kB3, s);
      CHECK(max_coeff_distance(jet, anchor) < 1e-12);
    }
  }

  SECTION("mean generating function anchor") {
    auto s = ladder_space(2);
    for (double T : {1.0, 0.9}) {
      auto jet = mean_generating_formal(sts(T), s);
      auto anchor = closedform::mean_generating_formal_sts(T, 3.0, kB3, s);
      CHECK(max_coeff_distance(jet, anchor) < 1e-11);
    }
  }

  SECTION("no subtraction recovers the input mean") {
    auto s = ladder_space(0);
    auto jet = mean_generating_formal(sts(1.0), s);
    CHECK_THAT(jet.coeff({0, 0}).real(), WithinAbs(1.0, 1e-12));
    auto th = mean_generating_formal(squeezed_thermal_form(0.5, 1.0, 0.0), s);
    CHECK_THAT(th.coeff({0, 0}).real(), WithinAbs(0.5, 1e-12));
  }
}

TEST_CASE("distributions after formal subtraction") {
  SECTION("subtracting from the squeezed vacuum raises the mean to 4") {
    auto d = subtracted_distribution_formal(sts(1.0), 1, 20);
    CHECK_THAT(d.mean, WithinAbs(4.0, 1e-10));
    // odd support: a |even superposition> lives on odd numbers
    for (int n = 0; n <= 20; n += 2)
      CHECK_THAT(d.p[static_cast<size_t>(n)], WithinAbs(0.0, 1e-12));
  }

  SECTION("oracle agreement for one and two subtractions") {
    for (double T : {1.0, 0.9}) {
      auto rho = fockspace::squeeze_dm(
          fockspace::thermal_dm(T, fockspace::kDefaultDim),
          0.5 * std::acosh(3.0), 0.0);
      for (int n : {1, 2}) {
        auto d = subtracted_distribution_formal(sts(T), n, 16);
        auto dref =
            fockspace::photon_dist_dm(fockspace::annihilate(rho, n), 16);
        for (int k = 0; k <= 16; ++k)
          CHECK_THAT(d.p[static_cast<size_t>(k)],
                     WithinAbs(dref.p[static_cast<size_t>(k)], 1e-7));
        CHECK_THAT(d.mean, WithinAbs(dref.mean, 1e-7));
      }
    }
  }
}

TEST_CASE("count generating function for heralded subtraction") {
  double zeta = 0.2;

  SECTION("joint unit argument is the total probability") {
    JetSpace s{{std::string(kTapVar), 0, 1.0}, {std::string(kCountVar), 0, 1.0}};
    auto jet = double_generating_heralded(sts(0.9), zeta, s);
    CHECK_THAT(jet.value().real(), WithinAbs(1.0, 1e-12));
  }

  SECTION("closed form anchor") {
    JetSpace s{{std::string(kTapVar), 2, 0.0}, {std::string(kCountVar), 2, 0.0}};
    for (double T : {1.0, 0.9}) {
      auto jet = double_generating_heralded(sts(T), zeta, s);
      auto anchor = closedform::double_generating_heralded_sts(T, 3.0, zeta, s);
      CHECK(max_coeff_distance(jet, anchor) < 1e-12);
    }
  }

  SECTION("tiny tap share keeps the input mean at n=0") {
    auto d = subtracted_distribution_heralded(sts(1.0), 1e-4, 0, 12);
    CHECK_THAT(d.mean, WithinAbs(1.0, 1e-3));
  }

  SECTION("oracle agreement after heralding one photon") {
    auto rho = fockspace::squeeze_dm(
        fockspace::thermal_dm(0.9, fockspace::kDefaultSignalDim),
        0.5 * std::acosh(3.0), 0.0);
    auto h = fockspace::beamsplit_and_herald(rho, zeta, 1);
    auto d = subtracted_distribution_heralded(sts(0.9), zeta, 1, 16);
    auto dref = fockspace::photon_dist_dm(h.rho, 16);
    for (int k = 0; k <= 16; ++k)
      CHECK_THAT(d.p[static_cast<size_t>(k)],
                 WithinAbs(dref.p[static_cast<size_t>(k)], 1e-6));
    CHECK_THAT(d.mean, WithinAbs(dref.mean, 1e-6));
  }
}

TEST_CASE("click conditioned distribution") {
  double zeta = 0.2;
  auto d = npnr_distribution(sts(1.0), zeta, 20);
  auto click = npnr_state(sts(1.0), zeta);

  SECTION("normalized") {
    double sum = d.tail_mass;
    for (double v : d.p) sum += v;
    CHECK_THAT(sum, WithinAbs(1.0, 1e-10));
  }

  SECTION("consistent with the two-outcome decomposition") {
    // tracing out the tap attenuates the input by the open share, so the
    // outcome mixture must reproduce that lossy state's distribution
    auto le = loss_equivalence(1.0 - zeta, 3.0, kB3);
    auto reduced =
        distribution(squeezed_thermal_form(le.purity, le.A, le.B), 20);
    auto none = distribution(click.vacuum_outcome, 20);
    for (int k = 0; k <= 20; ++k) {
      double expect = (reduced.p[static_cast<size_t>(k)] -
                       click.p_no_click * none.p[static_cast<size_t>(k)]) /
                      click.p_click;
      CHECK_THAT(d.p[static_cast<size_t>(k)], WithinAbs(expect, 1e-10));
    }
  }

  SECTION("mean moves up after a click") {
    CHECK(d.mean > 1.0);
  }
}

TEST_CASE("moment identities") {
  // jets give the same moments as summing the reported distribution when the
  // tail is negligible
  auto d = distribution(sts(1.0), 100);
  double m1 = 0.0, m2 = 0.0;
  for (size_t n = 0; n < d.p.size(); ++n) {
    m1 += double(n) * d.p[n];
    m2 += double(n) * double(n) * d.p[n];
  }
  CHECK_THAT(d.mean, WithinAbs(m1, 1e-9));
  CHECK_THAT(d.second_moment, WithinAbs(m2, 1e-9));
}

TEST_CASE("squeezed member statistics") {
  SECTION("unsqueezed members are number states") {
    for (int n : {0, 1, 4, 12}) {
      auto d = fock_statistics(n, {0.0, 0.0}, 16);
      for (size_t k = 0; k < d.p.size(); ++k)
        CHECK_THAT(d.p[k], WithinAbs(k == size_t(n) ? 1.0 : 0.0, 1e-12));
      CHECK_THAT(d.mean, WithinAbs(double(n), 1e-12));
    }
  }

  SECTION("matches the number basis oracle") {
    SqueezeParams sq = squeeze_from_mean_n(1.0, 0.3);
    for (int n : {0, 1, 3, 6}) {
      auto rho = fockspace::squeeze_dm(
          fockspace::fock_dm(n, fockspace::kDefaultDim), sq.r, sq.phi);
      auto d = fock_statistics(n, sq, 30);
      auto o = fockspace::photon_dist_dm(rho, 30);
      for (size_t k = 0; k < d.p.size(); ++k)
        CHECK_THAT(d.p[k], WithinAbs(o.p[k], 1e-9));
      CHECK_THAT(d.mean, WithinAbs(o.mean, 1e-8));
    }
  }

  SECTION("stable at high member order") {
    // squeezing preserves parity, so odd entries vanish identically; the
    // mean obeys n A + (A - 1) / 2
    SqueezeParams sq = squeeze_from_mean_n(1.0, 0.0);
    auto d = fock_statistics(12, sq, 140);
    for (size_t k = 1; k < d.p.size(); k += 2)
      CHECK_THAT(d.p[k], WithinAbs(0.0, 1e-13));
    CHECK(d.tail_mass < 1e-6);
    double A = sq.a_const();
    CHECK_THAT(d.mean, WithinAbs(12.0 * A + 0.5 * (A - 1.0), 1e-9));
  }
}
