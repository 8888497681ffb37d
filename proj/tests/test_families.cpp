#include <catch_amalgamated.hpp>

#include <cmath>

#include "slitmap/families.hpp"

using namespace slitmap;
using Catch::Approx;

namespace {

constexpr double mu = 3.0 / 16;

double r3(const FamilySweep& s, std::size_t i) { return s.moduli.at(i).value().slits.at(0).radius; }

}  // namespace

TEST_CASE("flat bump") {
  CHECK(flat_bump(0.0) == 0.0);
  CHECK(flat_bump(0.5) == Approx(std::exp(-16.0)).epsilon(1e-14));
  CHECK(flat_bump(-0.5) == flat_bump(0.5));
  CHECK(flat_bump(1.0) == Approx(std::exp(-4.0)));
  // vanishes faster than any power of lambda
  for (int k = 1; k <= 8; ++k) CHECK(flat_bump(0.1) / std::pow(0.1, k) < 1e-100);
}

TEST_CASE("counterexample domains") {
  const auto d = counterexample_domain(0.7);
  CHECK(d.holes()[1].radius() == Approx(0.25 + std::exp(-4.0 / 0.49)));
  CHECK(counterexample_domain(0.0).holes()[1].radius() == 0.25);
  CHECK_THROWS_AS(counterexample_domain(1.5), Error);
  // D~ equals D for lambda >= 0 and tau(D) otherwise
  const auto t = tilde_counterexample_domain(-0.7);
  const auto expect = std::get<Circle>(image_of_circle(tau_map(mu), d.holes()[1]));
  bool found = false;
  for (const auto& c : t.circles())
    found = found || (std::abs(c.center() - expect.center()) < 1e-12 && std::abs(c.radius() - expect.radius()) < 1e-12);
  CHECK(found);
  CHECK(tilde_counterexample_domain(0.7).holes()[1].radius() == d.holes()[1].radius());
}

TEST_CASE("counterexample domains are rigid away from zero and symmetric at zero") {
  const auto g0 = enumerate_automorphisms(counterexample_domain(0.0));
  CHECK(g0.tag == "tau-only");
  const auto g1 = enumerate_automorphisms(counterexample_domain(0.8));
  CHECK(g1.tag == "rigid");
}

TEST_CASE("family range and marking") {
  const auto f = annulus_family(0.2, 0.1);
  CHECK_THROWS_AS(f(-0.5), Error);
  const auto m = f(0.5);
  CHECK(m.a1() == Complex(1.0, 0.0));
  CHECK(std::abs(m.a2() - 0.25) < 1e-15);
  const auto t = tilde_counterexample_family()(-0.5);
  CHECK(t.first == 1);
  CHECK(t.second == 0);
  CHECK_THROWS_AS(annulus_family(0.95, 0.1)(1.0), Error);
}

TEST_CASE("grids") {
  const auto g = uniform_grid(-1.0, 1.0, 5);
  CHECK(g == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  CHECK_THROWS_AS(uniform_grid(0.0, 1.0, 1), Error);
  CHECK_THROWS_AS(uniform_grid(1.0, 0.0, 3), Error);
}

TEST_CASE("annulus sweep has slope 0.1") {
  const auto s = sweep_moduli(annulus_family(0.2, 0.1), uniform_grid(0.0, 1.0, 11), 128);
  CHECK(s.failures() == 0);
  for (std::size_t i = 0; i < s.lambda.size(); ++i) CHECK(s.moduli[i]->r2 == Approx(0.2 + 0.1 * s.lambda[i]).epsilon(1e-10));
  const auto rep = smoothness_report(s, 1);
  REQUIRE(rep.size() == 1);
  for (double q : rep[0].quotients) CHECK(q == Approx(0.1).epsilon(1e-8));
  CHECK(rep[0].flagged.empty());
  const auto rep2 = smoothness_report(s, 2);
  CHECK(rep2[0].max_abs < 1e-6);
}

TEST_CASE("counterexample moduli are even in lambda") {
  const auto s = sweep_moduli(counterexample_family(), {-0.6, 0.6}, 128);
  REQUIRE(s.failures() == 0);
  CHECK(s.moduli[0]->r2 == s.moduli[1]->r2);
  CHECK(r3(s, 0) == r3(s, 1));
  // D~ with the tau-transported marking has the same moduli
  const auto t = sweep_moduli(tilde_counterexample_family(), {-0.6}, 128);
  CHECK(std::abs(t.moduli[0]->r2 - s.moduli[0]->r2) < 1e-8);
  CHECK(std::abs(r3(t, 0) - r3(s, 0)) < 1e-8);
}

TEST_CASE("moduli are flat near zero") {
  const auto s = sweep_moduli(counterexample_family(), uniform_grid(0.0, 0.4, 5), 128);
  REQUIRE(s.failures() == 0);
  const auto rep = smoothness_report(s, 1);
  // bump(0.3) ~ 5e-20, so the first quotients vanish exactly
  CHECK(rep[1].name == "r3");
  CHECK(rep[1].quotients[0] == 0.0);
  CHECK(rep[1].quotients[1] == 0.0);
}

TEST_CASE("sweep failures are recorded per point") {
  DomainFamily f = annulus_family(0.2, 0.1);
  f.generator = [](double lambda) -> FamilyMember {
    if (lambda > 0.5) fail_numerical("under-resolved", "synthetic");
    return annulus_family(0.2, 0.1)(lambda);
  };
  const auto s = sweep_moduli(f, uniform_grid(0.0, 1.0, 5), 64);
  CHECK(s.failures() == 2);
  CHECK_FALSE(s.moduli[4].has_value());
  CHECK(std::isnan(s.residual[4]));
  CHECK(s.failure[4].find("under-resolved") != std::string::npos);
  const auto rep = smoothness_report(s, 1);
  CHECK(std::isnan(rep[0].quotients[3]));
  CHECK_THROWS_AS(sweep_moduli(f, {0.5, 0.2}), Error);
  CHECK_THROWS_AS(smoothness_report(s, 3), Error);
}

TEST_CASE("non-uniform grids are rejected by the smoothness report") {
  const auto s = sweep_moduli(annulus_family(0.2, 0.1), {0.0, 0.1, 0.5}, 64);
  CHECK_THROWS_AS(smoothness_report(s, 1), Error);
}

TEST_CASE("biholomorphism jump at a small grid") {
  const Complex probe(-0.9, 0.0);
  const auto rep = biholomorphism_jump({0.2, 0.3}, {-0.2, -0.3}, probe, 128);
  CHECK(std::abs(rep.limit_positive - probe) < 1e-7);
  CHECK(std::abs(rep.limit_negative - mu / probe) < 1e-7);
  CHECK(rep.expected_jump == Approx(0.9 - mu / 0.9));
  CHECK(rep.jump == Approx(rep.expected_jump).margin(1e-7));
  CHECK(rep.discontinuous);
  const Complex fixed(-std::sqrt(mu), 0.0);
  const auto rep2 = biholomorphism_jump({0.2}, {-0.2}, fixed, 128);
  CHECK(rep2.jump < 1e-7);
  CHECK_THROWS_AS(biholomorphism_jump({0.2}, {-0.2}, Complex(0.5, 0.0), 128), Error);
  CHECK_THROWS_AS(biholomorphism_jump({-0.2}, {-0.2}, probe, 128), Error);
}
