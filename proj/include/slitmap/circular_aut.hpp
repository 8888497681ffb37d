#pragma once

// Automorphism groups of circular domains. T(mu, a, r) is the unit disk with
// the closed disks D_mu(0) and D_r(a) removed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "slitmap/error.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/mobius.hpp"

namespace slitmap {

struct ThreeConnectedCircular {
  double mu;
  double a;
  double r;

  ThreeConnectedCircular(double mu_, double a_, double r_) : mu(mu_), a(a_), r(r_) {
    if (!(0.0 < mu && mu < a - r && a - r < a + r && a + r < 1.0))
      fail_input("invalid-parameters", "T(mu, a, r) needs 0 < mu < a - r < a + r < 1");
  }

  CircularDomain domain() const { return CircularDomain(Circle(0.0, 1.0), {Circle(0.0, mu), Circle(a, r)}); }
};

inline MobiusMap identity_map() { return {1.0, 0.0, 0.0, 1.0}; }

/// z -> mu / z.
inline MobiusMap tau_map(double mu) { return {0.0, mu, 1.0, 0.0}; }

/// z -> -(z - b) / (1 - b z).
inline MobiusMap phi_map(double b) { return {-1.0, b, -b, 1.0}; }

/// Exact test for tau to be an automorphism of T(mu, a, r).
inline bool tau_condition(const ThreeConnectedCircular& t) { return std::abs(t.mu - (t.a * t.a - t.r * t.r)) < 1e-12; }

/// m^2 - (1/r - 1) m + 1 with m = a^2 - r^2.
inline double rigidity_discriminant(double a, double r) {
  const double m = a * a - r * r;
  return m * m - (1.0 / r - 1.0) * m + 1.0;
}

/// The two expressions for b obtained from phi_b(-mu) = a + r and phi_b(mu) = a - r.
inline std::pair<double, double> phi_parameters(const ThreeConnectedCircular& t) {
  const double b1 = ((t.a + t.r) - t.mu) / (1.0 - (t.a + t.r) * t.mu);
  const double b2 = ((t.a - t.r) + t.mu) / (1.0 + t.mu * (t.a - t.r));
  return {b1, b2};
}

/// phi_b is an automorphism exactly when both expressions for b agree.
inline bool phi_condition(const ThreeConnectedCircular& t) {
  const auto [b1, b2] = phi_parameters(t);
  return std::abs(b1 - b2) < 1e-12;
}

struct AutGroup {
  std::vector<MobiusMap> elements;   // identity first
  std::vector<std::string> labels;   // word in the generators, or "g<k>" for enumerated maps
  std::string tag;                   // rigid, tau-only, six-element or other

  std::size_t order() const { return elements.size(); }

  bool contains(const MobiusMap& m) const {
    return std::any_of(elements.begin(), elements.end(), [&](const MobiusMap& e) { return action_equal(e, m); });
  }

  bool is_abelian() const {
    for (const auto& x : elements)
      for (const auto& y : elements)
        if (!action_equal(compose(x, y), compose(y, x))) return false;
    return true;
  }

  /// Closure under composition and inverses, up to action equality.
  bool is_closed() const {
    if (elements.empty() || !action_equal(elements.front(), identity_map())) return false;
    for (const auto& x : elements) {
      if (!contains(inverse(x))) return false;
      for (const auto& y : elements)
        if (!contains(compose(x, y))) return false;
    }
    return true;
  }
};

/// True when two groups consist of the same transformations.
inline bool same_action(const AutGroup& g, const AutGroup& h) {
  if (g.order() != h.order()) return false;
  return std::all_of(g.elements.begin(), g.elements.end(), [&](const MobiusMap& m) { return h.contains(m); });
}

namespace detail {

inline bool circle_close(const Circle& x, const Circle& y, double tol) {
  return std::abs(x.center() - y.center()) <= tol && std::abs(x.radius() - y.radius()) <= tol;
}

/// Interior point of largest clearance on a coarse grid.
inline Complex interior_probe(const CircularDomain& d) {
  const Complex c = d.outer().center();
  const double rad = d.outer().radius();
  Complex best = c;
  double best_clear = -1.0;
  constexpr int grid = 41;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const Complex z = c + rad * Complex(-1.0 + 2.0 * (i + 0.5) / grid, -1.0 + 2.0 * (j + 0.5) / grid);
      if (!d.contains(z)) continue;
      const double cl = d.clearance(z);
      if (cl > best_clear) {
        best_clear = cl;
        best = z;
      }
    }
  return best;
}

/// Boundary-preservation filter: every circle goes onto a distinct boundary
/// circle and the probe lands inside the domain.
inline bool preserves_domain(const CircularDomain& d, const MobiusMap& m, Complex probe, double tol) {
  const auto circles = d.circles();
  std::vector<bool> used(circles.size(), false);
  for (const auto& c : circles) {
    std::optional<CircleOrLine> img;
    try {
      img = image_of_circle(m, c);
    } catch (const Error&) {
      return false;
    }
    if (!std::holds_alternative<Circle>(*img)) return false;
    const auto& ic = std::get<Circle>(*img);
    bool found = false;
    for (std::size_t k = 0; k < circles.size(); ++k)
      if (!used[k] && circle_close(ic, circles[k], tol)) {
        used[k] = true;
        found = true;
        break;
      }
    if (!found) return false;
  }
  const ExtendedPoint w = m(ExtendedPoint(probe));
  return !w.is_infinity() && d.contains(w.value());
}

inline std::array<double, 6> fingerprint(const MobiusMap& m) {
  std::array<double, 6> f{};
  std::size_t k = 0;
  for (const auto& p : action_probes()) {
    const ExtendedPoint w = m(p);
    // infinity sorts last
    f[k++] = w.is_infinity() ? std::numeric_limits<double>::infinity() : w.value().real();
    f[k++] = w.is_infinity() ? 0.0 : w.value().imag();
  }
  return f;
}

inline std::string classify_group(const AutGroup& g, const std::vector<MobiusMap>& nontrivial) {
  if (g.order() == 1) return "rigid";
  if (g.order() == 2) {
    // an involution exchanging 0 and infinity, z -> c / z
    const auto& m = nontrivial.front();
    const bool swaps = spherical_distance(m(ExtendedPoint(0.0)), ExtendedPoint::infinity()) < 1e-9 &&
                       spherical_distance(m(ExtendedPoint::infinity()), ExtendedPoint(0.0)) < 1e-9;
    if (swaps) return "tau-only";
  }
  if (g.order() == 6 && !g.is_abelian()) return "six-element";
  return "other";
}

}  // namespace detail

/// Closed-form automorphism group of T(mu, a, r).
inline AutGroup aut_group_T(const ThreeConnectedCircular& t) {
  AutGroup g;
  g.elements.push_back(identity_map());
  g.labels.push_back("Id");
  const bool has_tau = tau_condition(t);
  const bool has_phi = phi_condition(t);
  const MobiusMap tau = tau_map(t.mu);
  const MobiusMap phi = phi_map(phi_parameters(t).first);
  if (has_tau && has_phi) {
    g.elements.insert(g.elements.end(),
                      {tau, phi, compose(tau, phi), compose(phi, tau), compose(tau, compose(phi, tau))});
    g.labels.insert(g.labels.end(), {"tau", "phi_b", "tau*phi_b", "phi_b*tau", "tau*phi_b*tau"});
    g.tag = "six-element";
  } else if (has_tau) {
    g.elements.push_back(tau);
    g.labels.push_back("tau");
    g.tag = "tau-only";
  } else if (has_phi) {
    g.elements.push_back(phi);
    g.labels.push_back("phi_b");
    g.tag = "other";
  } else {
    g.tag = "rigid";
  }
  const auto d = t.domain();
  const Complex probe = detail::interior_probe(d);
  for (const auto& m : g.elements)
    if (!detail::preserves_domain(d, m, probe, 1e-8))
      fail_invariant("internal-inconsistency", "closed-form automorphism fails the boundary-preservation filter");
  return g;
}

/// Finite search over Mobius maps permuting the 2 s_m symmetric points.
inline AutGroup enumerate_automorphisms(const CircularDomain& d, double tol = 1e-8) {
  if (d.connectivity() < 3) fail_input("infinite-group", "doubly connected domains have infinite automorphism groups");
  if (!(tol > 0.0)) fail_input("invalid-tolerance", "tolerance must be positive");
  std::vector<ExtendedPoint> pts;
  for (const auto& pr : symmetric_pairs(d)) {
    pts.push_back(pr.p);
    pts.push_back(pr.q);
  }
  const Complex probe = detail::interior_probe(d);
  const MobiusMap source_inv = inverse(from_triple(pts[0], pts[1], pts[2]));
  std::vector<MobiusMap> found;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const MobiusMap cand = compose(from_triple(pts[i], pts[j], pts[k]), source_inv);
        if (!detail::preserves_domain(d, cand, probe, tol)) continue;
        const bool dup =
            std::any_of(found.begin(), found.end(), [&](const MobiusMap& m) { return action_equal(m, cand); });
        if (!dup) found.push_back(cand);
      }
    }
  AutGroup g;
  g.elements.push_back(identity_map());
  std::vector<MobiusMap> others;
  for (const auto& m : found)
    if (!action_equal(m, identity_map())) others.push_back(m);
  if (others.size() + 1 != found.size())
    fail_numerical("closure-failure", "identity not recovered by the search; try a tighter tol");
  std::sort(others.begin(), others.end(),
            [](const MobiusMap& x, const MobiusMap& y) { return detail::fingerprint(x) < detail::fingerprint(y); });
  g.labels.push_back("Id");
  for (std::size_t k = 0; k < others.size(); ++k) {
    g.elements.push_back(others[k]);
    g.labels.push_back("g" + std::to_string(k + 1));
  }
  if (!g.is_closed()) fail_numerical("closure-failure", "candidate set is not a group; try a tighter tol");
  g.tag = detail::classify_group(g, others);
  return g;
}

inline bool is_rigid(const CircularDomain& d) { return enumerate_automorphisms(d).order() == 1; }

}  // namespace slitmap
