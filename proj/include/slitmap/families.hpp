#pragma once

// One-parameter domain families, moduli sweeps and the biholomorphism jump
// of the counterexample family D^lambda = T(3/16, 1/2, 1/4 + exp(-4/lambda^2)).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "slitmap/circular_aut.hpp"
#include "slitmap/error.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/koebe.hpp"
#include "slitmap/mobius.hpp"

namespace slitmap {

inline constexpr double counterexample_mu = 3.0 / 16.0;
inline constexpr double counterexample_a = 0.5;
inline constexpr double counterexample_r = 0.25;

/// exp(-4 / lambda^2), exactly 0 at lambda = 0.
inline double flat_bump(double lambda) { return lambda == 0.0 ? 0.0 : std::exp(-4.0 / (lambda * lambda)); }

inline void check_lambda(double lambda) {
  if (!(lambda >= -1.0 && lambda <= 1.0)) fail_input("lambda-range", "lambda must lie in [-1, 1]");
}

inline CircularDomain counterexample_domain(double lambda) {
  check_lambda(lambda);
  return ThreeConnectedCircular(counterexample_mu, counterexample_a, counterexample_r + flat_bump(lambda)).domain();
}

/// D^lambda for lambda >= 0 and its image under tau(z) = mu / z for lambda < 0.
inline CircularDomain tilde_counterexample_domain(double lambda) {
  const auto d = counterexample_domain(lambda);
  if (lambda >= 0.0) return d;
  return pushforward(d, tau_map(counterexample_mu));
}

/// Domain bounded by S_1(0), S_mu(0) and the circles orthogonal to the real
/// axis over consecutive pairs of r^eps = (r_1 + eps, r_2 + eps^2, r_3, ...).
/// The unperturbed data must be tau-symmetric: r_{n+1-i} = mu / r_i.
inline CircularDomain general_counterexample_domain(double mu, const std::vector<double>& rs, double eps) {
  const std::size_t n = rs.size();
  if (n < 2 || n % 2 != 0) fail_input("invalid-parameters", "need an even number of interval endpoints");
  if (!(mu > 0.0 && mu < 1.0)) fail_input("invalid-parameters", "mu must lie in (0, 1)");
  if (!(eps >= 0.0)) fail_input("invalid-parameters", "eps must be nonnegative");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(rs[n - 1 - i] - mu / rs[i]) > 1e-10)
      fail_input("tau-asymmetric", "endpoints are not paired by tau(x) = mu / x");
  std::vector<double> r = rs;
  r[0] += eps;
  r[1] += eps * eps;
  double prev = mu;
  for (double x : r) {
    if (!(x > prev)) fail_input("ordering", "perturbed endpoints must satisfy mu < r_1 < ... < r_n < 1");
    prev = x;
  }
  if (!(prev < 1.0)) fail_input("ordering", "perturbed endpoints must satisfy mu < r_1 < ... < r_n < 1");
  std::vector<Circle> holes{Circle(0.0, mu)};
  for (std::size_t i = 0; i + 1 < n; i += 2) holes.push_back(perpendicular_circle(r[i], r[i + 1]));
  return CircularDomain(Circle(0.0, 1.0), std::move(holes));
}

/// A family member with its marking: a1 and a2 are the argument-0 points of
/// circles `first` and `second` (0 = outer circle, i = hole i).
struct FamilyMember {
  CircularDomain domain;
  std::size_t first = 0;
  std::size_t second = 1;

  Complex a1() const { return marking_point(first); }
  Complex a2() const { return marking_point(second); }

  Complex marking_point(std::size_t k) const {
    const Circle c = domain.circles().at(k);
    return c.center() + c.radius();
  }
};

struct DomainFamily {
  std::string label;
  double lo = -1.0;
  double hi = 1.0;
  std::function<FamilyMember(double)> generator;

  FamilyMember operator()(double lambda) const {
    if (!(lambda >= lo && lambda <= hi)) fail_input("lambda-range", "lambda outside the family range");
    return generator(lambda);
  }
};

/// Annuli {rho0 + slope * lambda < |z| < 1}.
inline DomainFamily annulus_family(double rho0, double slope, double lo = 0.0, double hi = 1.0) {
  DomainFamily f;
  f.label = "annulus-linear";
  f.lo = lo;
  f.hi = hi;
  f.generator = [rho0, slope](double lambda) {
    const double rho = rho0 + slope * lambda;
    if (!(rho > 0.0 && rho < 1.0)) fail_input("invalid-parameters", "annulus radius leaves (0, 1)");
    return FamilyMember{CircularDomain(Circle(0.0, 1.0), {Circle(0.0, rho)}), 0, 1};
  };
  return f;
}

inline DomainFamily counterexample_family() {
  DomainFamily f;
  f.label = "counterexample";
  f.generator = [](double lambda) { return FamilyMember{counterexample_domain(lambda), 0, 1}; };
  return f;
}

/// D~^lambda with the marking carried along: for lambda < 0 the marked
/// points are tau(1) = 3/16 on the hole S_mu and tau(3/16) = 1 on S_1.
inline DomainFamily tilde_counterexample_family() {
  DomainFamily f;
  f.label = "tilde-counterexample";
  f.generator = [](double lambda) {
    auto d = tilde_counterexample_domain(lambda);
    if (lambda >= 0.0) return FamilyMember{std::move(d), 0, 1};
    return FamilyMember{std::move(d), 1, 0};
  };
  return f;
}

struct FamilySweep {
  std::string label;
  std::vector<double> lambda;
  std::vector<std::optional<SlitAnnulus>> moduli;
  std::vector<double> residual;  // boundary residual of the normalized potential; NaN on failure
  std::vector<std::string> failure;  // empty on success

  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(failure.begin(), failure.end(), [](const std::string& s) { return !s.empty(); }));
  }
};

/// Worker count: hardware concurrency, capped by SLITMAP_THREADS.
inline unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SLITMAP_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

/// Run `work(i)` for i in [0, count) on up to `threads` workers.
inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& work) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) work(i);
    });
  for (auto& th : pool) th.join();
}

inline FamilySweep sweep_moduli(const DomainFamily& f, const std::vector<double>& grid, std::size_t nodes = 256,
                                SolverOptions options = {}) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= f.lo && grid[i] <= f.hi)) fail_input("lambda-range", "grid leaves the family range");
    if (i > 0 && !(grid[i] > grid[i - 1])) fail_input("invalid-grid", "grid must be strictly increasing");
  }
  FamilySweep s;
  s.label = f.label;
  s.lambda = grid;
  s.moduli.assign(grid.size(), std::nullopt);
  s.residual.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  s.failure.assign(grid.size(), "");
  parallel_for(grid.size(), sweep_threads(), [&](std::size_t i) {
    try {
      const auto member = f(grid[i]);
      const auto d = circular_to_curves(member.domain, nodes);
      const CanonicalMap k(d, member.a1(), member.a2(), options);
      s.moduli[i] = k.moduli();
      s.residual[i] = k.diagnostics().boundary_residual;
    } catch (const Error& e) {
      s.failure[i] = e.what();
    }
  });
  return s;
}

inline std::vector<double> uniform_grid(double start, double end, std::size_t count) {
  if (count < 2) fail_input("invalid-grid", "grid count must be at least 2");
  if (!(end > start)) fail_input("invalid-grid", "grid end must exceed its start");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = i + 1 == count ? end : start + (end - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

struct CurveReport {
  std::string name;
  std::vector<double> quotients;   // NaN where a neighbour failed
  double max_abs = 0.0;
  std::vector<std::size_t> flagged;  // indices of discontinuity candidates
};

/// Named moduli curves of a sweep: r2, then r, alpha, beta per slit.
inline std::vector<std::pair<std::string, std::vector<double>>> moduli_curves(const FamilySweep& s) {
  std::size_t slits = 0;
  for (const auto& m : s.moduli)
    if (m) slits = std::max(slits, m->slits.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<std::string, std::vector<double>>> curves;
  curves.emplace_back("r2", std::vector<double>());
  for (std::size_t j = 0; j < slits; ++j) {
    const std::string idx = std::to_string(j + 3);
    curves.emplace_back("r" + idx, std::vector<double>());
    curves.emplace_back("alpha" + idx, std::vector<double>());
    curves.emplace_back("beta" + idx, std::vector<double>());
  }
  for (const auto& m : s.moduli) {
    curves[0].second.push_back(m ? m->r2 : nan);
    for (std::size_t j = 0; j < slits; ++j) {
      const bool ok = m && j < m->slits.size();
      curves[1 + 3 * j].second.push_back(ok ? m->slits[j].radius : nan);
      curves[2 + 3 * j].second.push_back(ok ? m->slits[j].alpha : nan);
      curves[3 + 3 * j].second.push_back(ok ? m->slits[j].beta : nan);
    }
  }
  return curves;
}

/// Difference quotients of every moduli curve. Order 1 gives
/// (f_{i+1} - f_i) / h, the central quotient at the midpoints; order 2 gives
/// (f_{i+1} - 2 f_i + f_{i-1}) / h^2. Quotients above 10x the median are
/// flagged once the underlying difference exceeds 1e-8.
inline std::vector<CurveReport> smoothness_report(const FamilySweep& s, int order) {
  if (order != 1 && order != 2) fail_input("invalid-order", "difference order must be 1 or 2");
  const std::size_t n = s.lambda.size();
  if (n < static_cast<std::size_t>(order) + 1) fail_input("invalid-grid", "grid too short for the requested order");
  const double h = (s.lambda.back() - s.lambda.front()) / static_cast<double>(n - 1);
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((s.lambda[i] - s.lambda[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      fail_input("non-uniform-grid", "smoothness report needs a uniform grid");
  std::vector<CurveReport> out;
  for (const auto& [name, f] : moduli_curves(s)) {
    CurveReport rep;
    rep.name = name;
    std::vector<double> diffs;
    if (order == 1) {
      for (std::size_t i = 0; i + 1 < n; ++i) diffs.push_back(f[i + 1] - f[i]);
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) diffs.push_back(f[i + 1] - 2.0 * f[i] + f[i - 1]);
    }
    const double scale = order == 1 ? h : h * h;
    std::vector<double> mags;
    for (double d : diffs) {
      rep.quotients.push_back(d / scale);
      if (std::isfinite(d)) {
        rep.max_abs = std::max(rep.max_abs, std::abs(d / scale));
        mags.push_back(std::abs(d / scale));
      }
    }
    if (!mags.empty()) {
      std::vector<double> sorted = mags;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
      const double median = sorted[sorted.size() / 2];
      for (std::size_t i = 0; i < diffs.size(); ++i)
        if (std::isfinite(diffs[i]) && std::abs(diffs[i]) > 1e-8 && std::abs(diffs[i] / scale) > 10.0 * median)
          rep.flagged.push_back(i);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

struct JumpSample {
  double lambda;
  Complex value;  // F^lambda(probe)
};

struct JumpReport {
  Complex probe;
  std::vector<JumpSample> positive;  // ordered by increasing |lambda|
  std::vector<JumpSample> negative;
  Complex limit_positive;            // value at the grid point closest to 0
  Complex limit_negative;
  double max_step_positive = 0.0;    // largest successive difference along each branch
  double max_step_negative = 0.0;
  double jump = 0.0;                 // |limit_positive - limit_negative|
  double expected_jump = 0.0;        // |probe - tau(probe)|
  bool discontinuous = false;        // jump > 100 x largest one-sided step
};

/// F^lambda = map_between(D^lambda, D~^lambda) evaluated at a probe on both
/// sides of lambda = 0.
inline JumpReport biholomorphism_jump(std::vector<double> grid_pos, std::vector<double> grid_neg, Complex probe,
                                      std::size_t nodes = 256, SolverOptions options = {}) {
  for (double l : grid_pos)
    if (!(l > 0.0)) fail_input("invalid-grid", "positive branch grid must be > 0");
  for (double l : grid_neg)
    if (!(l < 0.0)) fail_input("invalid-grid", "negative branch grid must be < 0");
  if (grid_pos.empty() || grid_neg.empty()) fail_input("invalid-grid", "both branches need grid points");
  std::sort(grid_pos.begin(), grid_pos.end());
  std::sort(grid_neg.begin(), grid_neg.end(), std::greater<>());
  const auto fam = counterexample_family();
  const auto tfam = tilde_counterexample_family();
  for (const auto* g : {&grid_pos, &grid_neg})
    for (double l : *g)
      if (fam(l).domain.clearance(probe) <= 0.0)
        fail_input("probe-outside", "probe is not inside D^lambda for lambda = " + format_number(l));

  auto run = [&](const std::vector<double>& grid) {
    std::vector<JumpSample> out(grid.size());
    parallel_for(grid.size(), 1, [&](std::size_t i) {
      const auto m = fam(grid[i]);
      const auto mt = tfam(grid[i]);
      const auto k = canonical_map(circular_to_curves(m.domain, nodes), m.a1(), m.a2(), options);
      const auto kt = canonical_map(circular_to_curves(mt.domain, nodes), mt.a1(), mt.a2(), options);
      out[i] = {grid[i], map_between(k, kt)(probe)};
    });
    return out;
  };
  JumpReport rep;
  rep.probe = probe;
  rep.positive = run(grid_pos);
  rep.negative = run(grid_neg);
  for (std::size_t i = 1; i < rep.positive.size(); ++i)
    rep.max_step_positive = std::max(rep.max_step_positive, std::abs(rep.positive[i].value - rep.positive[i - 1].value));
  for (std::size_t i = 1; i < rep.negative.size(); ++i)
    rep.max_step_negative = std::max(rep.max_step_negative, std::abs(rep.negative[i].value - rep.negative[i - 1].value));
  rep.limit_positive = rep.positive.front().value;
  rep.limit_negative = rep.negative.front().value;
  rep.jump = std::abs(rep.limit_positive - rep.limit_negative);
  rep.expected_jump = std::abs(probe - counterexample_mu / probe);
  rep.discontinuous = rep.jump > 100.0 * std::max(rep.max_step_positive, rep.max_step_negative);
  return rep;
}

}  // namespace slitmap
