// Acceptance checks, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "slitmap.hpp"
#include "slitmap/cli.hpp"

using namespace slitmap;
namespace fs = std::filesystem;

namespace {

constexpr double mu = 3.0 / 16;
constexpr std::size_t nodes = 256;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char timing[64];
  std::snprintf(timing, sizeof timing, "%.2fs", secs);
  std::string detail = o.detail + " [" + timing;
  if (limit_s > 0.0) {
    detail += " / limit " + format_number(limit_s) + "s";
    if (secs >= limit_s) {
      o.pass = false;
      detail += " exceeded";
    }
  }
  detail += "]";
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

CircularDomain annulus() { return CircularDomain(Circle(0.0, 1.0), {Circle(0.0, 0.25)}); }
CircularDomain t_domain(double r = 0.25) { return ThreeConnectedCircular(mu, 0.5, r).domain(); }

double slit_span(const Slit& s) {
  double d = std::fmod(s.beta - s.alpha, two_pi);
  return d < 0.0 ? d + two_pi : d;
}

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// largest relative mismatch of r2, r_j and beta_j - alpha_j
double moduli_mismatch(const SlitAnnulus& a, const SlitAnnulus& b) {
  double e = relative(a.r2, b.r2);
  if (a.slits.size() != b.slits.size()) return INFINITY;
  for (std::size_t j = 0; j < a.slits.size(); ++j) {
    e = std::max(e, relative(a.slits[j].radius, b.slits[j].radius));
    e = std::max(e, relative(slit_span(a.slits[j]), slit_span(b.slits[j])));
  }
  return e;
}

// Mobius map with pole well outside the unit disk: a disk automorphism
// followed by a similarity, or a map sending the disk onto a disk of another size
MobiusMap random_mobius(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Complex p(0.4 * u(rng), 0.4 * u(rng));
  const auto m = disk_automorphism(p, 3.0 * u(rng));
  const Complex scale = std::polar(1.0 + 0.5 * u(rng), 3.0 * u(rng));
  const Complex shift(u(rng), u(rng));
  const Complex pole(3.0 * (1.5 + u(rng)), 0.0);
  // z -> scale * z / (1 - z / pole) + shift has its pole at `pole`, outside the closed disk
  const MobiusMap bend(scale, 0.0, -1.0 / pole, 1.0);
  return compose(MobiusMap(1.0, shift, 0.0, 1.0), compose(bend, m));
}

std::vector<ExtendedPoint> sphere_grid() {
  std::vector<ExtendedPoint> g{ExtendedPoint::infinity(), 0.0};
  for (int i = 1; i < 14; ++i)
    for (int j = 0; j < 14; ++j) {
      const double th = std::numbers::pi * i / 14.0, ph = two_pi * j / 14.0;
      g.emplace_back(std::polar(std::sin(th), ph) / (1.0 - std::cos(th)));
    }
  return g;
}

double sup_error(const std::vector<ExtendedPoint>& grid, const MobiusMap& a, const MobiusMap& b) {
  double e = 0.0;
  for (const auto& z : grid) e = std::max(e, spherical_distance(a(z), b(z)));
  return e;
}

Outcome annulus_identity() {
  const auto d = circular_to_curves(annulus(), nodes);
  const CanonicalMap k(d, 1.0, 0.25);
  double err = 0.0;
  for (const auto& z : interior_grid(d, 40)) err = std::max(err, std::abs(k(z) - z));
  const double dr = std::abs(k.moduli().r2 - 0.25);
  return {err <= 1e-7 && dr <= 1e-8, "max|K-z| " + format_number(err) + ", |r2-0.25| " + format_number(dr)};
}

Outcome moduli_invariance() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (const auto& base : {annulus(), t_domain()}) {
    const Complex a1 = 1.0, a2 = base.holes()[0].center() + base.holes()[0].radius();
    const CanonicalMap k(circular_to_curves(base, nodes), a1, a2);
    for (int s = 0; s < 5; ++s) {
      const auto m = random_mobius(rng);
      const auto dm = circular_to_curves(pushforward(base, m), nodes);
      const CanonicalMap km(dm, m.eval(a1), m.eval(a2));
      worst = std::max(worst, moduli_mismatch(km.moduli(), k.moduli()));
    }
  }
  return {worst <= 1e-5, "10 pushforwards, worst relative mismatch " + format_number(worst)};
}

Outcome green_identity() {
  std::string detail;
  bool pass = true;
  for (const auto& entry : fs::directory_iterator(SLITMAP_FIXTURE_DIR)) {
    const auto j = io::read_json_file(entry.path().string());
    if (j.value("type", "") == "family") continue;
    const auto spec = io::domain_from_json(j);
    const auto p = period_matrix(spec.curves_with(nodes));
    const bool ok = p.green_residual <= 1e-9 && p.condition < 1e6 && p.determinant != 0.0;
    pass = pass && ok;
    detail += entry.path().stem().string() + " " + format_number(p.green_residual) + "/" +
              format_number(p.condition) + " ";
  }
  return {pass, "residual/condition: " + detail};
}

Outcome classification() {
  const ThreeConnectedCircular t(mu, 0.5, 0.25);
  const auto g = aut_group_T(t);
  const auto ge = enumerate_automorphisms(t.domain());
  const bool t_ok = g.tag == "tau-only" && g.order() == 2 && g.contains(tau_map(mu)) && same_action(g, ge);
  const double r = 0.25, m = (3.0 - std::sqrt(5.0)) / 2.0;
  const ThreeConnectedCircular s(m, std::sqrt(m + r * r), r);
  const auto h = aut_group_T(s);
  const auto he = enumerate_automorphisms(s.domain());
  const bool s_ok = h.order() == 6 && !h.is_abelian() && same_action(h, he);
  const double r6 = 0.15, m6 = (1.0 - std::sqrt(1.0 - 4.0 * r6 * (1.0 + r6))) / (2.0 * (1.0 + r6));
  const ThreeConnectedCircular c(m6, std::sqrt(m6 + r6 * r6), r6);
  const auto hc = aut_group_T(c);
  const bool c_ok = hc.order() == 6 && !hc.is_abelian() && same_action(hc, enumerate_automorphisms(c.domain()));
  std::string detail = "T(3/16,1/2,1/4): " + g.tag + " order " + std::to_string(g.order()) +
                       "; discriminant-zero parameters (disc " +
                       format_number(rigidity_discriminant(s.a, s.r)) + "): " + h.tag + " order " +
                       std::to_string(h.order()) + ", enumeration order " + std::to_string(he.order()) +
                       " (expected 6); r=0.15 on (1+r)mu^2-mu+r=0: " + hc.tag + " order " +
                       std::to_string(hc.order()) + (c_ok ? " confirmed" : " NOT confirmed");
  return {t_ok && s_ok, detail};
}

Outcome rigidity() {
  const auto g = enumerate_automorphisms(t_domain(0.26));
  return {g.order() == 1, "order " + std::to_string(g.order()) + ", tag " + g.tag};
}

Outcome recovery() {
  auto sup = [](const MultiplyConnectedDomain& d, const Biholomorphism& f, const std::function<Complex(Complex)>& g) {
    double e = 0.0;
    for (const auto& z : interior_grid(d, 16, 4.0)) e = std::max(e, std::abs(f(z) - g(z)));
    return e;
  };
  const auto d = circular_to_curves(t_domain(), nodes);
  const double e_id = sup(d, map_between(d, {1.0, mu}, d, {1.0, mu}), [](Complex z) { return z; });
  const auto fam = counterexample_family()(-0.3), tfam = tilde_counterexample_family()(-0.3);
  const auto dl = circular_to_curves(fam.domain, nodes);
  const auto f_tau =
      map_between(dl, {fam.a1(), fam.a2()}, circular_to_curves(tfam.domain, nodes), {tfam.a1(), tfam.a2()});
  const double e_tau = sup(dl, f_tau, [](Complex z) { return mu / z; });
  std::mt19937_64 rng(7);
  const auto m = random_mobius(rng);
  const auto dm = circular_to_curves(pushforward(t_domain(), m), nodes);
  const double e_m = sup(d, map_between(d, {1.0, mu}, dm, {m.eval(1.0), m.eval(mu)}), [&](Complex z) { return m.eval(z); });
  const double worst = std::max({e_id, e_tau, e_m});
  return {worst <= 1e-5, "Id " + format_number(e_id) + ", tau " + format_number(e_tau) + ", Mobius " + format_number(e_m)};
}

Outcome discontinuity() {
  const fs::path dir = fs::temp_directory_path() / "slitmap_acceptance_jump";
  fs::remove_all(dir);
  cli::RunConfig cfg;
  cfg.subcommand = "counterexample";
  cfg.out_dir = dir.string();
  cfg.nodes = nodes;
  cfg.grid = cli::GridSpec{0.1, 0.5, 5};
  std::ostringstream out, err;
  const int rc = cli::run(cfg, out, err);
  if (rc != 0) return {false, "pipeline exit " + std::to_string(rc) + ": " + err.str()};
  std::ifstream f(dir / "jump.json");
  const auto doc = io::json::parse(f);
  const auto& far = doc.at(0);
  const auto& fixed = doc.at(1);
  double step = 0.0;
  for (const auto& r : doc)
    step = std::max({step, r["max_step_positive"].get<double>(), r["max_step_negative"].get<double>()});
  const double jf = far["jump"].get<double>(), jx = fixed["jump"].get<double>();
  const bool pass = step < 1e-4 && jf >= 0.6 && jx <= 1e-4;
  return {pass, "max step " + format_number(step) + ", jump at -0.9 " + fmt("%.10f", jf) + " (analytic " +
                    fmt("%.10f", far["expected_jump"].get<double>()) + "), jump at -sqrt(3/16) " + format_number(jx)};
}

Outcome spectral_convergence() {
  // unit disk minus D_0.4(0.5); z -> (z - p) / (1 - p z) maps it onto a concentric annulus
  const double c = 0.5, r = 0.4, s = 1.0 + c * c - r * r;
  const double p = (s - std::sqrt(s * s - 4.0 * c * c)) / (2.0 * c);
  auto w = [p](Complex z) { return (z - p) / (1.0 - p * z); };
  const double log_rho = std::log(std::abs(w(c + r)));
  const CircularDomain dom(Circle(0.0, 1.0), {Circle(c, r)});
  // same evaluation points at both resolutions
  const auto pts = interior_grid(circular_to_curves(dom, 128), 60, 1.0);
  auto error = [&](std::size_t n) {
    const auto d = circular_to_curves(dom, n);
    SolverOptions o;
    o.residual_tolerance = 1.0;
    const auto u = DirichletSolver(d, o).harmonic_measure(1);
    double e = 0.0;
    for (const auto& z : pts)
      e = std::max(e, std::abs(u.eval_unchecked(z) - std::log(std::abs(w(z))) / log_rho));
    return e;
  };
  const double e128 = error(128), e256 = error(256);
  return {e256 <= 1e-3 * e128, "eccentric annulus error N=128 " + format_number(e128) + ", N=256 " +
                                   format_number(e256) + ", ratio " + format_number(e256 / e128)};
}

Outcome smoothness() {
  const auto s = sweep_moduli(annulus_family(0.2, 0.1), uniform_grid(0.0, 1.0, 11), nodes);
  double worst = 0.0;
  const auto rep = smoothness_report(s, 1);
  for (double q : rep.at(0).quotients) worst = std::max(worst, std::abs(q - 0.1));
  std::vector<double> q;
  std::string qs;
  for (double h : {1.0, 0.5, 0.25, 0.125}) {
    const auto c = sweep_moduli(counterexample_family(), {0.0, h}, nodes);
    if (c.failures() != 0) return {false, "counterexample sweep failed: " + c.failure[0] + c.failure[1]};
    q.push_back(std::abs(c.moduli[1]->slits.at(0).radius - c.moduli[0]->slits.at(0).radius) / h);
    qs += format_number(q.back()) + " ";
  }
  bool monotone = q.back() < q.front();
  for (std::size_t i = 1; i < q.size(); ++i) monotone = monotone && q[i] <= q[i - 1];
  return {worst <= 1e-4 && monotone && q.back() <= 1e-8,
          "annulus |q-0.1| " + format_number(worst) + "; r3 quotients h=1..1/8: " + qs};
}

Outcome mobius_continuity() {
  const auto grid = sphere_grid();
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  double min_ratio = INFINITY;
  for (int t = 0; t < 5; ++t) {
    const Complex a(g(rng), g(rng)), b(g(rng), g(rng)), c(g(rng), g(rng));
    const Complex da = std::polar(1.0, two_pi * std::abs(g(rng))), db = std::polar(1.0, two_pi * std::abs(g(rng))),
                  dc = std::polar(1.0, two_pi * std::abs(g(rng)));
    const auto phi = from_triple(a, b, c);
    double prev = 0.0, prev_inv = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const double eps = std::pow(10.0, -k);
      const auto pk = from_triple(a + eps * da, b + eps * db, c + eps * dc);
      const double e = sup_error(grid, pk, phi), ei = sup_error(grid, inverse(pk), inverse(phi));
      if (k > 1) min_ratio = std::min({min_ratio, prev / e, prev_inv / ei});
      prev = e;
      prev_inv = ei;
    }
  }
  return {min_ratio >= 10.0, "smallest per-step decrease " + fmt("%.4f", min_ratio) +
                                 "x over 5 seeded triples (first-order error gives ratios near 10)"};
}

}  // namespace

int main() {
  report(1, "annulus-identity", 5.0, annulus_identity);
  report(2, "moduli-mobius-invariance", 60.0, moduli_invariance);
  report(3, "green-identity", 0.0, green_identity);
  report(4, "classification", 10.0, classification);
  report(5, "rigidity", 10.0, rigidity);
  report(6, "biholomorphism-recovery", 60.0, recovery);
  report(7, "discontinuity-witness", 300.0, discontinuity);
  report(8, "spectral-convergence", 0.0, spectral_convergence);
  report(9, "moduli-smoothness", 0.0, smoothness);
  report(10, "mobius-continuity", 0.0, mobius_continuity);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
