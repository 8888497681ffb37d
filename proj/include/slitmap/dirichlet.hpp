#pragma once

// Laplace Dirichlet problems on smooth multiply connected domains.
//
// A solution is represented as
//
//   u(z) = Re F(z) + sum_k A_k log|z - s_k|,
//   F(z) = (1 / 2 pi i) \oint sigma(w) / (w - z) dw,
//
// a double-layer potential with real density sigma plus one logarithmic
// source per hole, anchored at a point s_k inside hole k. The hole strengths
// are tied to the density by A_k = \int_{hole k} sigma ds, which removes the
// (m-1)-dimensional null space of the bare double-layer operator. The Nystrom
// system uses the periodic trapezoidal rule at the curve nodes.
//
// F is single valued in the domain, so it carries no flux; the flux of u
// through a hole is exactly -2 pi A_k and through the outer curve
// 2 pi sum_k A_k.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slitmap/error.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/spectral.hpp"

namespace slitmap {

struct SolverOptions {
  double max_condition = 1e12;
  double residual_tolerance = 1e-8;
};

namespace detail {

/// Point strictly inside a hole curve: its node centroid when that works,
/// otherwise the deepest point of a coarse search grid.
inline Complex hole_anchor(const BoundaryCurve& hole) {
  const Complex c = hole.centroid();
  if (hole.winding_number(c) != 0 && hole.distance_to(c) > hole.resolution()) return c;
  double minx = hole.node(0).real(), maxx = minx, miny = hole.node(0).imag(), maxy = miny;
  for (const auto& z : hole.nodes()) {
    minx = std::min(minx, z.real());
    maxx = std::max(maxx, z.real());
    miny = std::min(miny, z.imag());
    maxy = std::max(maxy, z.imag());
  }
  Complex best = c;
  double depth = -1.0;
  constexpr int grid = 64;
  for (int i = 1; i < grid; ++i)
    for (int j = 1; j < grid; ++j) {
      const Complex z(minx + (maxx - minx) * i / grid, miny + (maxy - miny) * j / grid);
      if (hole.winding_number(z) == 0) continue;
      const double dist = hole.distance_to(z);
      if (dist > depth) {
        depth = dist;
        best = z;
      }
    }
  if (depth <= 0.0) fail_input("hole-anchor", "no interior point found inside a hole");
  return best;
}

}  // namespace detail

/// Concatenated quadrature data of all boundary components.
struct BoundaryQuadrature {
  std::vector<Complex> z;        // nodes
  std::vector<Complex> dz;       // dz/dt
  std::vector<Complex> weight;   // dz/dt * h, oriented
  std::vector<double> arclength; // |dz/dt| * h
  std::vector<double> step;      // h = 2 pi / N of the owning component
  std::vector<std::size_t> offset;  // component c owns [offset[c], offset[c+1])
  std::vector<Complex> anchors;     // anchors[k] for hole component k >= 1; [0] unused

  explicit BoundaryQuadrature(const MultiplyConnectedDomain& d) {
    offset.push_back(0);
    anchors.emplace_back(0.0, 0.0);
    for (std::size_t c = 0; c < d.connectivity(); ++c) {
      const auto& curve = d.component(c);
      const double h = two_pi / static_cast<double>(curve.size());
      for (std::size_t j = 0; j < curve.size(); ++j) {
        z.push_back(curve.node(j));
        dz.push_back(curve.tangents()[j]);
        weight.push_back(curve.tangents()[j] * h);
        arclength.push_back(std::abs(curve.tangents()[j]) * h);
        step.push_back(h);
      }
      offset.push_back(z.size());
      if (c > 0) anchors.push_back(detail::hole_anchor(curve));
    }
  }

  std::size_t size() const { return z.size(); }
  std::size_t components() const { return offset.size() - 1; }

  /// Barycentric Cauchy interpolation of boundary values of a function
  /// analytic and single valued in the domain. Returns {numerator sum,
  /// denominator sum}; inside the domain the denominator approximates 2 pi i.
  std::pair<Complex, Complex> cauchy_sums(std::span<const Complex> values, Complex at) const {
    Complex num{}, den{};
    for (std::size_t j = 0; j < z.size(); ++j) {
      const Complex diff = z[j] - at;
      if (diff == Complex{}) return {values[j], 1.0};
      const Complex w = weight[j] / diff;
      num += values[j] * w;
      den += w;
    }
    return {num, den};
  }
};

/// Shared immutable data of one solved domain.
struct DirichletSystem {
  MultiplyConnectedDomain domain;
  BoundaryQuadrature quad;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 0.0;

  explicit DirichletSystem(MultiplyConnectedDomain d) : domain(std::move(d)), quad(domain) {}
};

class HarmonicSolution {
 public:
  HarmonicSolution(std::shared_ptr<const DirichletSystem> system, std::vector<double> data,
                   std::vector<double> density, std::vector<double> strengths)
      : system_(std::move(system)),
        data_(std::move(data)),
        sigma_(std::move(density)),
        strengths_(std::move(strengths)) {
    compute_boundary_values();
  }

  const MultiplyConnectedDomain& domain() const { return system_->domain; }
  const BoundaryQuadrature& quadrature() const { return system_->quad; }
  std::shared_ptr<const DirichletSystem> system() const { return system_; }

  std::span<const double> data() const { return data_; }
  std::span<const double> density() const { return sigma_; }

  /// Log-source strength A_k of component k (0 for the outer curve).
  double source_strength(std::size_t component) const { return strengths_.at(component); }
  std::span<const double> source_strengths() const { return strengths_; }

  /// Boundary limit of the analytic part F from inside the domain.
  std::span<const Complex> boundary_analytic() const { return f_plus_; }
  std::span<const Complex> boundary_analytic_derivative() const { return df_plus_; }

  /// Max deviation of the boundary limit of u from the prescribed data.
  double boundary_residual() const { return residual_; }
  double condition_estimate() const { return system_->condition; }

  /// Harmonic function at an interior point; throws when z is outside the
  /// domain or within sampling resolution of the boundary.
  double eval(Complex z) const {
    if (!contains(domain(), z)) fail_input("outside-domain", "evaluation point is not in the domain");
    return eval_unchecked(z);
  }

  double eval_unchecked(Complex z) const { return analytic(z).real() + log_part(z); }

  /// F(z) by barycentric Cauchy interpolation; accurate up to the boundary.
  Complex analytic(Complex z) const {
    const auto [num, den] = quadrature().cauchy_sums(f_plus_, z);
    return num / den;
  }

  Complex analytic_derivative(Complex z) const {
    const auto [num, den] = quadrature().cauchy_sums(df_plus_, z);
    return num / den;
  }

  double log_part(Complex z) const {
    double s = 0.0;
    for (std::size_t k = 1; k < strengths_.size(); ++k)
      s += strengths_[k] * std::log(std::abs(z - quadrature().anchors[k]));
    return s;
  }

  /// Outward normal flux of u through component i.
  double flux(std::size_t i) const {
    if (i >= strengths_.size()) fail_input("invalid-component", "component index out of range");
    if (i == 0) {
      double s = 0.0;
      for (std::size_t k = 1; k < strengths_.size(); ++k) s += strengths_[k];
      return two_pi * s;
    }
    return -two_pi * strengths_[i];
  }

 private:
  void compute_boundary_values() {
    const auto& q = quadrature();
    const std::size_t n = q.size();
    f_plus_.assign(n, Complex{});
    df_plus_.assign(n, Complex{});
    const Complex inv_2pi_i = 1.0 / Complex(0.0, two_pi);
    for (std::size_t c = 0; c < q.components(); ++c) {
      const std::size_t b = q.offset[c], e = q.offset[c + 1];
      const std::span<const double> comp(sigma_.data() + b, e - b);
      const auto dsigma = spectral::derivative(comp, 1);
      for (std::size_t i = b; i < e; ++i) {
        // PV Cauchy integral with sigma(z_i) subtracted; the subtracted
        // constant contributes sigma_i / 2 on top of the jump sigma_i / 2
        Complex sum = dsigma[i - b] * q.step[i];
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          sum += (sigma_[j] - sigma_[i]) * q.weight[j] / (q.z[j] - q.z[i]);
        }
        f_plus_[i] = sigma_[i] + inv_2pi_i * sum;
      }
    }
    residual_ = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = f_plus_[i].real() + log_part(q.z[i]);
      residual_ = std::max(residual_, std::abs(u - data_[i]));
    }
    for (std::size_t c = 0; c < q.components(); ++c) {
      const std::size_t b = q.offset[c], e = q.offset[c + 1];
      const auto df = spectral::derivative(std::span<const Complex>(f_plus_.data() + b, e - b), 1);
      for (std::size_t i = b; i < e; ++i) df_plus_[i] = df[i - b] / q.dz[i];
    }
  }

  std::shared_ptr<const DirichletSystem> system_;
  std::vector<double> data_;
  std::vector<double> sigma_;
  std::vector<double> strengths_;
  std::vector<Complex> f_plus_;
  std::vector<Complex> df_plus_;
  double residual_ = 0.0;
};

/// Factored Nystrom system of one domain; solves any number of data sets.
class DirichletSolver {
 public:
  explicit DirichletSolver(MultiplyConnectedDomain d, SolverOptions options = {})
      : options_(options) {
    auto sys = std::make_shared<DirichletSystem>(std::move(d));
    const auto& q = sys->quad;
    const std::size_t n = q.size();
    const std::size_t holes = q.components() - 1;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + holes),
                                              static_cast<Eigen::Index>(n + holes));
    const double inv_2pi = 1.0 / two_pi;
    for (std::size_t c = 0; c < q.components(); ++c) {
      const auto& curve = sys->domain.component(c);
      for (std::size_t i = q.offset[c]; i < q.offset[c + 1]; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          a(ii, static_cast<Eigen::Index>(j)) = inv_2pi * (q.weight[j] / (q.z[j] - q.z[i])).imag();
        }
        // diagonal limit of the double-layer kernel (curvature term)
        const std::size_t local = i - q.offset[c];
        const Complex ratio = curve.second_derivatives()[local] / curve.tangents()[local];
        a(ii, ii) = 0.5 + inv_2pi * 0.5 * ratio.imag() * q.step[i];
        for (std::size_t k = 1; k <= holes; ++k)
          a(ii, static_cast<Eigen::Index>(n + k - 1)) = std::log(std::abs(q.z[i] - q.anchors[k]));
      }
    }
    for (std::size_t k = 1; k <= holes; ++k) {
      const auto row = static_cast<Eigen::Index>(n + k - 1);
      for (std::size_t j = q.offset[k]; j < q.offset[k + 1]; ++j)
        a(row, static_cast<Eigen::Index>(j)) = q.arclength[j];
      a(row, row) = -1.0;
    }
    sys->lu.compute(a);
    const double rcond = sys->lu.rcond();
    sys->condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(sys->condition < options_.max_condition))
      fail_numerical("ill-conditioned", "Nystrom system condition estimate " +
                                            format_number(sys->condition) + " exceeds limit");
    system_ = std::move(sys);
  }

  const MultiplyConnectedDomain& domain() const { return system_->domain; }
  const BoundaryQuadrature& quadrature() const { return system_->quad; }
  double condition_estimate() const { return system_->condition; }

  /// Solve with data given at every boundary node (components concatenated).
  HarmonicSolution solve(std::vector<double> data) const {
    const auto& q = quadrature();
    const std::size_t n = q.size();
    const std::size_t holes = q.components() - 1;
    if (data.size() != n) fail_input("invalid-data", "boundary data size does not match node count");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + holes));
    for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = data[i];
    const Eigen::VectorXd x = system_->lu.solve(rhs);
    if (!x.allFinite()) fail_numerical("solve-failed", "non-finite Nystrom solution");
    std::vector<double> sigma(n);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = x(static_cast<Eigen::Index>(i));
    std::vector<double> strengths(holes + 1, 0.0);
    for (std::size_t k = 1; k <= holes; ++k) strengths[k] = x(static_cast<Eigen::Index>(n + k - 1));
    HarmonicSolution s(system_, std::move(data), std::move(sigma), std::move(strengths));
    if (!(s.boundary_residual() <= options_.residual_tolerance))
      fail_numerical("under-resolved", "boundary residual " + format_number(s.boundary_residual()) +
                                           " exceeds tolerance; increase N");
    return s;
  }

  /// Solve with data given as a function of (component, boundary point).
  HarmonicSolution solve(const std::function<double(std::size_t, Complex)>& f) const {
    const auto& q = quadrature();
    std::vector<double> data(q.size());
    for (std::size_t c = 0; c < q.components(); ++c)
      for (std::size_t i = q.offset[c]; i < q.offset[c + 1]; ++i) data[i] = f(c, q.z[i]);
    return solve(std::move(data));
  }

  /// Solve with one constant per component.
  HarmonicSolution solve_constants(std::span<const double> values) const {
    if (values.size() != quadrature().components())
      fail_input("invalid-data", "need one boundary constant per component");
    return solve([&](std::size_t c, Complex) { return values[c]; });
  }

  HarmonicSolution harmonic_measure(std::size_t i) const {
    if (i >= quadrature().components()) fail_input("invalid-component", "component index out of range");
    return solve([i](std::size_t c, Complex) { return c == i ? 1.0 : 0.0; });
  }

 private:
  SolverOptions options_;
  std::shared_ptr<const DirichletSystem> system_;
};

inline HarmonicSolution solve_dirichlet(const MultiplyConnectedDomain& d,
                                        const std::function<double(std::size_t, Complex)>& data,
                                        SolverOptions options = {}) {
  return DirichletSolver(d, options).solve(data);
}

/// Harmonic measure of component i (1 on it, 0 on every other component).
inline HarmonicSolution harmonic_measure(const MultiplyConnectedDomain& d, std::size_t i,
                                         SolverOptions options = {}) {
  return DirichletSolver(d, options).harmonic_measure(i);
}

inline double flux(const HarmonicSolution& s, std::size_t i) { return s.flux(i); }

inline double eval_interior(const HarmonicSolution& s, Complex z) { return s.eval(z); }

/// Fluxes of harmonic measures. `entries(r, c)` is the flux of the measure of
/// `components[c]` through `components[r]`, where `components` lists every
/// index except the base component; `full_flux(i, l)` covers all pairs.
struct PeriodMatrix {
  std::size_t base = 0;
  std::vector<std::size_t> components;
  Eigen::MatrixXd entries;
  Eigen::MatrixXd full_flux;
  double determinant = 0.0;
  double condition = 0.0;
  double green_residual = 0.0;  // max over measures of |sum of fluxes|
};

/// Period matrix from an existing solver, relative to base component `base`.
inline PeriodMatrix period_matrix(const DirichletSolver& solver, std::size_t base = 0) {
  const std::size_t m = solver.quadrature().components();
  if (m < 2) fail_input("connectivity", "period matrix needs m >= 2");
  if (base >= m) fail_input("invalid-component", "base component out of range");
  PeriodMatrix p;
  p.base = base;
  const auto mm = static_cast<Eigen::Index>(m);
  p.full_flux = Eigen::MatrixXd::Zero(mm, mm);
  for (std::size_t l = 0; l < m; ++l) {
    const auto u = solver.harmonic_measure(l);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double f = u.flux(i);
      p.full_flux(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = f;
      total += f;
    }
    p.green_residual = std::max(p.green_residual, std::abs(total));
  }
  for (std::size_t i = 0; i < m; ++i)
    if (i != base) p.components.push_back(i);
  const auto k = static_cast<Eigen::Index>(p.components.size());
  p.entries.resize(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      p.entries(r, c) = p.full_flux(static_cast<Eigen::Index>(p.components[static_cast<std::size_t>(r)]),
                                    static_cast<Eigen::Index>(p.components[static_cast<std::size_t>(c)]));
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < m; ++i) {
      const double f = p.full_flux(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
      if ((i == l && !(f > 0.0)) || (i != l && !(f < 0.0)))
        fail_invariant("flux-sign-pattern", "flux of measure " + std::to_string(l) + " through component " +
                                                std::to_string(i) + " has the wrong sign");
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p.entries);
  const auto& sv = svd.singularValues();
  p.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  p.determinant = p.entries.determinant();
  if (!(p.condition < 1e12) || p.determinant == 0.0)
    fail_numerical("singular-period-matrix", "period matrix is numerically singular");
  return p;
}

inline PeriodMatrix period_matrix(const MultiplyConnectedDomain& d, std::size_t base = 0,
                                  SolverOptions options = {}) {
  if (d.connectivity() < 2) fail_input("connectivity", "period matrix needs m >= 2");
  return period_matrix(DirichletSolver(d, options), base);
}

}  // namespace slitmap
