#pragma once

// Canonical conformal map K = exp(u + i v) of an m-connected domain onto a
// circular-slit annulus {r2 < |w| < 1} minus concentric arcs.
//
// u is the combination of harmonic measures that vanishes on the first
// marked component, has flux -2 pi through the second and zero flux through
// all others. Its conjugate v then has periods in 2 pi Z, so K is single
// valued; it is normalized by K(a1) = 1.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slitmap/dirichlet.hpp"
#include "slitmap/error.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/spectral.hpp"

namespace slitmap {

inline double wrap_angle(double a) {
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a <= 0.0) a += two_pi;
  return a - std::numbers::pi;
}

struct Slit {
  double radius = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  std::size_t component = 0;
  /// Boundary points of the component mapped to the slit ends; located as
  /// the extrema of v along the component, without accuracy guarantees.
  Complex alpha_preimage{};
  Complex beta_preimage{};
};

struct SlitAnnulus {
  double r2 = 0.0;
  std::vector<Slit> slits;  // components 3..m in marking order
};

inline void validate(const SlitAnnulus& s) {
  if (!(s.r2 > 0.0 && s.r2 < 1.0)) fail_invariant("slit-annulus", "r2 must lie in (0, 1)");
  for (const auto& sl : s.slits) {
    if (!(sl.radius > s.r2 && sl.radius < 1.0)) fail_invariant("slit-annulus", "slit radius outside (r2, 1)");
    if (!(sl.alpha < sl.beta && sl.beta < sl.alpha + two_pi))
      fail_invariant("slit-annulus", "slit angles must satisfy alpha < beta < alpha + 2 pi");
  }
  for (std::size_t i = 0; i < s.slits.size(); ++i)
    for (std::size_t j = i + 1; j < s.slits.size(); ++j) {
      const auto& a = s.slits[i];
      const auto& b = s.slits[j];
      if (std::abs(a.radius - b.radius) > 1e-12 * std::max(a.radius, b.radius)) continue;
      // arcs on one circle must not overlap modulo 2 pi
      const double start = wrap_angle(b.alpha - a.alpha);
      const double s0 = start < 0 ? start + two_pi : start;
      const double wa = a.beta - a.alpha, wb = b.beta - b.alpha;
      if (s0 < wa || s0 + wb > two_pi) fail_invariant("slit-annulus", "slits on one circle overlap");
    }
}

/// Combination coefficients c_l of harmonic measures and the combined potential.
struct KoebeCoefficients {
  std::size_t first = 0;                // component mapped to |w| = 1
  std::size_t second = 1;               // component mapped to |w| = r2
  std::vector<std::size_t> order;       // second, then remaining components ascending
  std::vector<double> c;                // c[component], c[first] = 0
  Eigen::MatrixXd period;               // rows/cols follow `order`
  double period_condition = 0.0;
  std::shared_ptr<const HarmonicSolution> potential;
};

/// Solve for u = sum c_l u_l with flux -2 pi through `second`, zero flux
/// through the remaining components and u = 0 on `first`.
inline KoebeCoefficients koebe_coefficients(const DirichletSolver& solver, std::size_t first, std::size_t second) {
  const std::size_t m = solver.quadrature().components();
  if (m < 2) fail_input("connectivity", "canonical maps need m >= 2");
  if (first >= m || second >= m || first == second)
    fail_input("invalid-marking", "marked components must be distinct and in range");
  KoebeCoefficients k;
  k.first = first;
  k.second = second;
  k.order.push_back(second);
  for (std::size_t i = 0; i < m; ++i)
    if (i != first && i != second) k.order.push_back(i);
  const auto n = static_cast<Eigen::Index>(k.order.size());
  std::vector<HarmonicSolution> measures;
  measures.reserve(k.order.size());
  for (std::size_t l : k.order) measures.push_back(solver.harmonic_measure(l));
  k.period.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      k.period(r, c) = measures[static_cast<std::size_t>(c)].flux(k.order[static_cast<std::size_t>(r)]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(k.period);
  const auto& sv = svd.singularValues();
  k.period_condition = sv(0) / sv(sv.size() - 1);
  if (!(k.period_condition < 1e12)) fail_numerical("singular-period-matrix", "period matrix is numerically singular");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = -two_pi;
  const Eigen::VectorXd coef = k.period.fullPivLu().solve(rhs);

  k.c.assign(m, 0.0);
  const std::size_t total = solver.quadrature().size();
  std::vector<double> sigma(total, 0.0), data(total, 0.0), strengths(m, 0.0);
  for (std::size_t idx = 0; idx < k.order.size(); ++idx) {
    const double cl = coef(static_cast<Eigen::Index>(idx));
    k.c[k.order[idx]] = cl;
    const auto& u = measures[idx];
    for (std::size_t i = 0; i < total; ++i) {
      sigma[i] += cl * u.density()[i];
      data[i] += cl * u.data()[i];
    }
    for (std::size_t j = 0; j < m; ++j) strengths[j] += cl * u.source_strength(j);
  }
  k.potential = std::make_shared<const HarmonicSolution>(measures.front().system(), std::move(data),
                                                         std::move(sigma), std::move(strengths));
  const auto& u = *k.potential;
  for (std::size_t i = 0; i < m; ++i) {
    const double target = i == second ? -two_pi : (i == first ? two_pi : 0.0);
    if (std::abs(u.flux(i) - target) > 1e-8)
      fail_numerical("flux-normalization", "normalized flux through component " + std::to_string(i) +
                                               " misses its target");
  }
  // maximum 0 on the first component, minimum on the second
  for (std::size_t i = 0; i < m; ++i) {
    if (i == first) continue;
    if (!(k.c[i] < 0.0)) fail_invariant("potential-extrema", "potential does not attain its maximum on the first component");
    if (i != second && !(k.c[i] > k.c[second]))
      fail_invariant("potential-extrema", "potential does not attain its minimum on the second component");
  }
  return k;
}

/// Harmonic conjugate of a potential whose fluxes are integer multiples of
/// 2 pi, normalized to vanish at a boundary basepoint; values are mod 2 pi.
class HarmonicConjugate {
 public:
  HarmonicConjugate(std::shared_ptr<const HarmonicSolution> u, Complex basepoint) : u_(std::move(u)) {
    const auto strengths = u_->source_strengths();
    winding_.assign(strengths.size(), 0);
    leak_ = 0.0;
    for (std::size_t k = 1; k < strengths.size(); ++k) {
      const double n = std::round(strengths[k]);
      leak_ = std::max(leak_, std::abs(strengths[k] - n));
      winding_[k] = static_cast<int>(n);
    }
    if (leak_ > 1e-8)
      fail_numerical("period-leak", "conjugate periods are not multiples of 2 pi (leak " + format_number(leak_) + ")");
    const auto& d = u_->domain();
    const auto [comp, dist] = d.nearest_component(basepoint);
    if (dist > d.component(comp).resolution())
      fail_input("component-membership", "conjugate basepoint is not on the boundary");
    base_component_ = comp;
    base_parameter_ = d.component(comp).closest_parameter(basepoint);
    const Complex on_curve = d.component(comp).interpolant()(base_parameter_);
    offset_ = 0.0;
    offset_ = boundary_raw(comp, base_parameter_, on_curve);
  }

  const HarmonicSolution& potential() const { return *u_; }
  std::span<const int> windings() const { return winding_; }
  double period_leak() const { return leak_; }
  std::size_t base_component() const { return base_component_; }
  double base_parameter() const { return base_parameter_; }

  /// Continuous (not reduced) value Im F + sum n_k arg(z - s_k) - offset;
  /// the arg terms use principal branches.
  double raw(Complex z) const {
    double v = u_->analytic(z).imag() - offset_;
    const auto& anchors = u_->quadrature().anchors;
    for (std::size_t k = 1; k < winding_.size(); ++k)
      if (winding_[k] != 0) v += winding_[k] * std::arg(z - anchors[k]);
    return v;
  }

  /// v(z) reduced to (-pi, pi].
  double operator()(Complex z) const { return wrap_angle(raw(z)); }

  /// Boundary values of v at the nodes of component c, unwrapped along the
  /// traversal starting from the principal value at node 0.
  std::vector<double> boundary_unwrapped(std::size_t c) const {
    const auto& q = u_->quadrature();
    std::vector<double> v;
    for (std::size_t i = q.offset[c]; i < q.offset[c + 1]; ++i) v.push_back(node_raw(i));
    v.front() = wrap_angle(v.front());
    for (std::size_t j = 1; j < v.size(); ++j) v[j] = v[j - 1] + wrap_angle(v[j] - v[j - 1]);
    return v;
  }

  /// Leak of exp(i v) after continuation once around component c.
  double loop_mismatch(std::size_t c) const {
    const auto v = boundary_unwrapped(c);
    const double closing = v.back() + wrap_angle(v.front() - v.back()) - v.front();
    // closing is a multiple of 2 pi; exp(i v) returns to its start
    return std::abs(std::polar(1.0, closing) - 1.0) + leak_ * two_pi;
  }

 private:
  double node_raw(std::size_t i) const {
    const auto& q = u_->quadrature();
    double v = u_->boundary_analytic()[i].imag() - offset_;
    for (std::size_t k = 1; k < winding_.size(); ++k)
      if (winding_[k] != 0) v += winding_[k] * std::arg(q.z[i] - q.anchors[k]);
    return v;
  }

  double boundary_raw(std::size_t comp, double t, Complex z) const {
    const auto& q = u_->quadrature();
    const std::span<const Complex> f(u_->boundary_analytic().data() + q.offset[comp], q.offset[comp + 1] - q.offset[comp]);
    double v = spectral::Interpolant(f)(t).imag() - offset_;
    for (std::size_t k = 1; k < winding_.size(); ++k)
      if (winding_[k] != 0) v += winding_[k] * std::arg(z - q.anchors[k]);
    return v;
  }

  std::shared_ptr<const HarmonicSolution> u_;
  std::vector<int> winding_;
  double leak_ = 0.0;
  double offset_ = 0.0;
  std::size_t base_component_ = 0;
  double base_parameter_ = 0.0;
};

inline HarmonicConjugate harmonic_conjugate_data(std::shared_ptr<const HarmonicSolution> u, Complex a1) {
  return HarmonicConjugate(std::move(u), a1);
}

struct CanonicalDiagnostics {
  double boundary_residual = 0.0;
  double condition_estimate = 0.0;
  double period_condition = 0.0;
  double period_leak = 0.0;
  double max_modulus_stdev = 0.0;  // over components, stdev of |K| at the nodes
  int outer_image_winding = 0;
};

class CanonicalMap {
 public:
  CanonicalMap(const MultiplyConnectedDomain& d, Complex a1, Complex a2, SolverOptions options = {})
      : solver_(std::make_shared<DirichletSolver>(d, options)), a1_(a1), a2_(a2) {
    const auto& dom = solver_->domain();
    const auto [c1, dist1] = dom.nearest_component(a1);
    const auto [c2, dist2] = dom.nearest_component(a2);
    if (dist1 > dom.component(c1).resolution() || dist2 > dom.component(c2).resolution())
      fail_input("component-membership", "marked points must lie on boundary components");
    if (c1 == c2) fail_input("component-membership", "a1 and a2 lie on the same component");
    coeffs_ = koebe_coefficients(*solver_, c1, c2);
    conj_.emplace(coeffs_.potential, a1);
    compute_boundary_images();
    extract_moduli();
    diag_.boundary_residual = coeffs_.potential->boundary_residual();
    diag_.condition_estimate = solver_->condition_estimate();
    diag_.period_condition = coeffs_.period_condition;
    diag_.period_leak = conj_->period_leak();
    check_outer_winding();
  }

  const MultiplyConnectedDomain& domain() const { return solver_->domain(); }
  std::size_t first_component() const { return coeffs_.first; }
  std::size_t second_component() const { return coeffs_.second; }
  Complex a1() const { return a1_; }
  Complex a2() const { return a2_; }
  const KoebeCoefficients& coefficients() const { return coeffs_; }
  const HarmonicSolution& potential() const { return *coeffs_.potential; }
  const HarmonicConjugate& conjugate() const { return *conj_; }
  const SlitAnnulus& moduli() const { return moduli_; }
  const CanonicalDiagnostics& diagnostics() const { return diag_; }

  /// Boundary images K at the nodes of component c.
  std::span<const Complex> boundary_images(std::size_t c) const {
    const auto& q = potential().quadrature();
    return {boundary_k_.data() + q.offset[c], q.offset[c + 1] - q.offset[c]};
  }

  /// K at an interior point; throws outside the domain or near the boundary.
  Complex operator()(Complex z) const {
    if (!contains(domain(), z)) fail_input("outside-domain", "evaluation point is not in the domain");
    return eval_unchecked(z);
  }

  Complex eval_unchecked(Complex z) const {
    return std::exp(Complex(coeffs_.potential->eval_unchecked(z), conj_->raw(z)));
  }

  /// K'(z) from the analytic representation.
  Complex derivative_unchecked(Complex z) const { return eval_unchecked(z) * log_derivative(z); }

  Complex log_derivative(Complex z) const {
    Complex g = coeffs_.potential->analytic_derivative(z);
    const auto& anchors = potential().quadrature().anchors;
    const auto w = conj_->windings();
    for (std::size_t k = 1; k < w.size(); ++k)
      if (w[k] != 0) g += static_cast<double>(w[k]) / (z - anchors[k]);
    return g;
  }

  /// Boundary limit of K at a point on a boundary component.
  Complex boundary_value(Complex z) const {
    const auto [comp, dist] = domain().nearest_component(z);
    if (dist > domain().component(comp).resolution())
      fail_input("component-membership", "point is not on the boundary");
    const double t = domain().component(comp).closest_parameter(z);
    return spectral::Interpolant(boundary_images(comp))(t);
  }

  /// Winding-based inside test of the barycentric denominator; cheap and
  /// reliable away from the boundary, used to keep Newton iterates inside.
  bool inside_fast(Complex z) const {
    const auto& q = potential().quadrature();
    Complex den{};
    for (std::size_t j = 0; j < q.size(); ++j) den += q.weight[j] / (q.z[j] - z);
    return std::abs(den / Complex(0.0, two_pi) - 1.0) < 0.5;
  }

  /// Distance of w from the image boundary: circles |w| = 1, |w| = r2 and slits.
  double image_clearance(Complex w) const {
    const double rad = std::abs(w);
    double d = std::min(1.0 - rad, rad - moduli_.r2);
    for (const auto& s : moduli_.slits) {
      const double ang = std::arg(w);
      double rel = ang - s.alpha;
      rel = std::fmod(rel, two_pi);
      if (rel < 0) rel += two_pi;
      double dist;
      if (rel <= s.beta - s.alpha) {
        dist = std::abs(rad - s.radius);
      } else {
        dist = std::min(std::abs(w - std::polar(s.radius, s.alpha)), std::abs(w - std::polar(s.radius, s.beta)));
      }
      d = std::min(d, dist);
    }
    return d;
  }

  /// Newton inversion of K seeded from a precomputed image table.
  Complex invert(Complex w, double clearance_tol = 1e-9) const {
    if (!(image_clearance(w) > clearance_tol))
      fail_input("outside-image", "target is not strictly inside the slit annulus");
    ensure_table();
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < table_images_.size(); ++i) {
      const double dd = std::abs(table_images_[i] - w);
      if (dd < best_d) {
        best_d = dd;
        best = i;
      }
    }
    Complex z = table_points_[best];
    Complex kz = eval_unchecked(z);
    double res = std::abs(kz - w);
    for (int it = 0; it < 50 && res > 1e-13; ++it) {
      const Complex step = (kz - w) / (kz * log_derivative(z));
      double lam = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 40; ++ls, lam *= 0.5) {
        const Complex cand = z - lam * step;
        if (!inside_fast(cand)) continue;
        const Complex kc = eval_unchecked(cand);
        const double rc = std::abs(kc - w);
        if (rc < res) {
          z = cand;
          kz = kc;
          res = rc;
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (!(res < 1e-10)) fail_numerical("inversion-failed", "Newton inversion did not converge (residual " + format_number(res) + ")");
    return z;
  }

 private:
  void compute_boundary_images() {
    const auto& q = potential().quadrature();
    boundary_k_.resize(q.size());
    diag_.max_modulus_stdev = 0.0;
    for (std::size_t c = 0; c < q.components(); ++c) {
      const auto v = conj_->boundary_unwrapped(c);
      double mean = 0.0;
      const std::size_t n = q.offset[c + 1] - q.offset[c];
      for (std::size_t i = q.offset[c]; i < q.offset[c + 1]; ++i) {
        const double u = potential().boundary_analytic()[i].real() + potential().log_part(q.z[i]);
        boundary_k_[i] = std::polar(std::exp(u), v[i - q.offset[c]]);
        mean += std::abs(boundary_k_[i]);
      }
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = q.offset[c]; i < q.offset[c + 1]; ++i) var += std::norm(std::abs(boundary_k_[i]) - mean);
      var /= static_cast<double>(n);
      diag_.max_modulus_stdev = std::max(diag_.max_modulus_stdev, std::sqrt(var));
    }
  }

  void extract_moduli() {
    moduli_.r2 = std::exp(coeffs_.c[coeffs_.second]);
    for (std::size_t idx = 1; idx < coeffs_.order.size(); ++idx) {
      const std::size_t comp = coeffs_.order[idx];
      const auto& curve = domain().component(comp);
      const auto v = conj_->boundary_unwrapped(comp);
      const double closing = v.back() + wrap_angle(v.front() - v.back()) - v.front();
      if (std::abs(closing) > 1e-6) fail_numerical("slit-wrap", "conjugate winds around a slit component");
      const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
      if (*mx - *mn >= two_pi) fail_numerical("slit-wrap", "slit angular range reaches 2 pi; increase N");
      const spectral::Interpolant interp{std::span<const double>(v)};
      auto refine = [&](std::size_t j) {
        double t = spectral::node_parameter(j, v.size());
        for (int it = 0; it < 30; ++it) {
          const double d1 = interp(t, 1).real();
          const double d2 = interp(t, 2).real();
          if (d2 == 0.0) break;
          const double step = d1 / d2;
          t -= step;
          if (std::abs(step) < 1e-15) break;
        }
        return t;
      };
      const double tmin = refine(static_cast<std::size_t>(mn - v.begin()));
      const double tmax = refine(static_cast<std::size_t>(mx - v.begin()));
      double alpha = std::min(interp(tmin).real(), *mn);
      double beta = std::max(interp(tmax).real(), *mx);
      const double width = beta - alpha;
      alpha = wrap_angle(alpha);
      if (alpha == -std::numbers::pi) alpha = std::numbers::pi;
      Slit s;
      s.radius = std::exp(coeffs_.c[comp]);
      s.alpha = alpha;
      s.beta = alpha + width;
      s.component = comp;
      const auto gamma = curve.interpolant();
      s.alpha_preimage = gamma(tmin);
      s.beta_preimage = gamma(tmax);
      moduli_.slits.push_back(s);
    }
    validate(moduli_);
  }

  void check_outer_winding() {
    // argument-principle spot check: the image of the first component winds
    // once around images of interior points
    const auto img = boundary_images(coeffs_.first);
    const auto& q = potential().quadrature();
    int wind = 1;
    for (std::size_t c = 0; c < q.components(); ++c) {
      if (c == coeffs_.first) continue;
      // a point a few resolutions inside, next to node 0 of component c
      const auto& curve = domain().component(c);
      const Complex dz = curve.tangents()[0];
      const Complex inward = Complex(0.0, 1.0) * dz / std::abs(dz);
      const Complex z = curve.node(0) + 4.0 * curve.resolution() * inward;
      if (classify(domain(), z) != Location::inside) continue;
      const Complex w = eval_unchecked(z);
      const int n = detail::polyline_winding(img, w);
      if (n != 1) wind = n;
    }
    diag_.outer_image_winding = wind;
    if (wind != 1) fail_numerical("injectivity", "image of the first component does not wind once");
  }

  void ensure_table() const {
    std::call_once(table_once_, [this] {
      const auto& dom = domain();
      double minx = dom.component(0).node(0).real(), maxx = minx;
      double miny = dom.component(0).node(0).imag(), maxy = miny;
      for (const auto& c : dom.components())
        for (const auto& z : c.nodes()) {
          minx = std::min(minx, z.real());
          maxx = std::max(maxx, z.real());
          miny = std::min(miny, z.imag());
          maxy = std::max(maxy, z.imag());
        }
      constexpr int grid = 48;
      for (int i = 1; i < grid; ++i)
        for (int j = 1; j < grid; ++j) {
          const Complex z(minx + (maxx - minx) * i / grid, miny + (maxy - miny) * j / grid);
          if (inside_fast(z)) table_points_.push_back(z);
        }
      for (const auto& c : dom.components())
        for (std::size_t j = 0; j < c.size(); j += 2) {
          const Complex dz = c.tangents()[j];
          const Complex inward = Complex(0.0, 1.0) * dz / std::abs(dz);
          for (double depth : {0.25, 1.0, 3.0}) {
            const Complex z = c.node(j) + depth * c.resolution() * inward;
            if (inside_fast(z)) table_points_.push_back(z);
          }
        }
      table_images_.reserve(table_points_.size());
      for (const auto& z : table_points_) table_images_.push_back(eval_unchecked(z));
    });
  }

  std::shared_ptr<DirichletSolver> solver_;
  Complex a1_, a2_;
  KoebeCoefficients coeffs_;
  std::optional<HarmonicConjugate> conj_;
  std::vector<Complex> boundary_k_;
  SlitAnnulus moduli_;
  CanonicalDiagnostics diag_;
  mutable std::once_flag table_once_;
  mutable std::vector<Complex> table_points_;
  mutable std::vector<Complex> table_images_;
};

inline std::shared_ptr<const CanonicalMap> canonical_map(const MultiplyConnectedDomain& d, Complex a1, Complex a2,
                                                         SolverOptions options = {}) {
  return std::make_shared<const CanonicalMap>(d, a1, a2, options);
}

inline const SlitAnnulus& moduli(const CanonicalMap& k) { return k.moduli(); }

inline Complex eval_map(const CanonicalMap& k, Complex z) { return k(z); }

inline Complex invert_map(const CanonicalMap& k, Complex w) { return k.invert(w); }

/// Interior points on a Cartesian grid that keep `margin` resolutions of
/// clearance from every boundary component.
inline std::vector<Complex> interior_grid(const MultiplyConnectedDomain& d, int per_axis, double margin = 3.0) {
  double minx = d.component(0).node(0).real(), maxx = minx;
  double miny = d.component(0).node(0).imag(), maxy = miny;
  for (const auto& z : d.component(0).nodes()) {
    minx = std::min(minx, z.real());
    maxx = std::max(maxx, z.real());
    miny = std::min(miny, z.imag());
    maxy = std::max(maxy, z.imag());
  }
  std::vector<Complex> pts;
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j) {
      const Complex z(minx + (maxx - minx) * (i + 0.5) / per_axis, miny + (maxy - miny) * (j + 0.5) / per_axis);
      bool ok = true;
      for (const auto& c : d.components())
        if (c.distance_to(z) < margin * c.resolution()) {
          ok = false;
          break;
        }
      if (ok && classify(d, z) == Location::inside) pts.push_back(z);
    }
  return pts;
}

struct BiholomorphismDiagnostics {
  double roundtrip_mismatch = 0.0;  // sup over the test grid of |K~(F z) - mu K(z)|
  double moduli_mismatch = 0.0;     // largest relative mismatch of matched moduli
  std::vector<std::size_t> component_map;  // source component -> target component
};

/// F = K~^{-1} o (mu K) between two conformally equivalent marked domains.
class Biholomorphism {
 public:
  Biholomorphism(std::shared_ptr<const CanonicalMap> source, std::shared_ptr<const CanonicalMap> target, Complex mu,
                 BiholomorphismDiagnostics diag)
      : source_(std::move(source)), target_(std::move(target)), mu_(mu), diag_(std::move(diag)) {
    if (std::abs(std::abs(mu_) - 1.0) > 1e-12) fail_invariant("unimodular", "rotation factor must be unimodular");
  }

  Complex operator()(Complex z) const { return target_->invert(mu_ * (*source_)(z)); }

  Complex mu() const { return mu_; }
  const CanonicalMap& source() const { return *source_; }
  const CanonicalMap& target() const { return *target_; }
  const BiholomorphismDiagnostics& diagnostics() const { return diag_; }

 private:
  std::shared_ptr<const CanonicalMap> source_;
  std::shared_ptr<const CanonicalMap> target_;
  Complex mu_;
  BiholomorphismDiagnostics diag_;
};

struct Marking {
  Complex a1;
  Complex a2;
};

/// Biholomorphism between marked domains through their canonical maps.
inline Biholomorphism map_between(std::shared_ptr<const CanonicalMap> k, std::shared_ptr<const CanonicalMap> kt,
                                  double tol = 1e-5) {
  const auto& s = k->moduli();
  const auto& t = kt->moduli();
  if (k->domain().connectivity() != kt->domain().connectivity())
    fail_input("not-equivalent", "domains have different connectivity");
  BiholomorphismDiagnostics diag;
  diag.moduli_mismatch = std::abs(s.r2 - t.r2) / s.r2;
  if (diag.moduli_mismatch > tol) fail_input("not-equivalent", "r2 moduli differ");

  const std::size_t ns = s.slits.size();
  std::vector<std::size_t> perm(ns);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best_perm = perm;
  double best_err = std::numeric_limits<double>::infinity();
  auto angle_tol = tol * std::numbers::pi;
  double best_delta = 0.0;
  do {
    double err = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
      const auto& a = s.slits[i];
      const auto& b = t.slits[perm[i]];
      err = std::max(err, std::abs(a.radius - b.radius) / a.radius);
      err = std::max(err, std::abs((a.beta - a.alpha) - (b.beta - b.alpha)) / two_pi);
    }
    // common rotation aligning all slit start angles
    double delta = 0.0;
    if (ns > 0) {
      Complex acc{};
      for (std::size_t i = 0; i < ns; ++i) acc += std::polar(1.0, t.slits[perm[i]].alpha - s.slits[i].alpha);
      delta = std::arg(acc);
      for (std::size_t i = 0; i < ns; ++i)
        err = std::max(err, std::abs(wrap_angle(t.slits[perm[i]].alpha - s.slits[i].alpha - delta)) / two_pi);
    }
    if (err < best_err) {
      best_err = err;
      best_perm = perm;
      best_delta = delta;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (ns > 0) {
    diag.moduli_mismatch = std::max(diag.moduli_mismatch, best_err);
    if (best_err > tol) fail_input("not-equivalent", "slit data do not match up to rotation");
  }
  // a1 alignment is authoritative whenever it is consistent with the slits
  if (std::abs(wrap_angle(best_delta)) <= angle_tol) best_delta = 0.0;
  const Complex mu = std::polar(1.0, best_delta);

  const std::size_t m = k->domain().connectivity();
  diag.component_map.assign(m, 0);
  diag.component_map[k->first_component()] = kt->first_component();
  diag.component_map[k->second_component()] = kt->second_component();
  for (std::size_t i = 0; i < ns; ++i) diag.component_map[s.slits[i].component] = t.slits[best_perm[i]].component;

  for (const auto& z : interior_grid(k->domain(), 8, 4.0)) {
    const Complex w = mu * k->eval_unchecked(z);
    if (kt->image_clearance(w) <= 1e-9) continue;
    const Complex zeta = kt->invert(w);
    diag.roundtrip_mismatch = std::max(diag.roundtrip_mismatch, std::abs(kt->eval_unchecked(zeta) - w));
  }
  if (diag.roundtrip_mismatch > 1e-6) fail_numerical("roundtrip-mismatch", "inverse map round trip exceeds 1e-6");
  return Biholomorphism(std::move(k), std::move(kt), mu, std::move(diag));
}

inline Biholomorphism map_between(const MultiplyConnectedDomain& d, Marking mark, const MultiplyConnectedDomain& dt,
                                  Marking mark_t, double tol = 1e-5, SolverOptions options = {}) {
  return map_between(canonical_map(d, mark.a1, mark.a2, options), canonical_map(dt, mark_t.a1, mark_t.a2, options), tol);
}

}  // namespace slitmap
