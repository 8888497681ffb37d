#pragma once

// Extended-plane points, circles, sampled boundary curves and the
// multiply connected domains they bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slitmap/error.hpp"
#include "slitmap/spectral.hpp"

namespace slitmap {

using Complex = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A point of the Riemann sphere. Infinity is a tagged state.
class ExtendedPoint {
 public:
  ExtendedPoint(Complex z) : z_(z) {  // NOLINT(google-explicit-constructor)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      fail_input("non-finite-point", "finite points need finite coordinates");
  }
  ExtendedPoint(double x) : ExtendedPoint(Complex(x, 0.0)) {}  // NOLINT

  static ExtendedPoint infinity() { return ExtendedPoint(); }

  bool is_infinity() const { return !z_.has_value(); }

  Complex value() const {
    if (!z_) fail_input("infinite-point", "point at infinity has no finite value");
    return *z_;
  }

  friend bool operator==(const ExtendedPoint& a, const ExtendedPoint& b) { return a.z_ == b.z_; }

 private:
  ExtendedPoint() = default;
  std::optional<Complex> z_;
};

/// Chordal distance on the unit-diameter-2 Riemann sphere.
inline double spherical_distance(const ExtendedPoint& z, const ExtendedPoint& w) {
  if (z.is_infinity() && w.is_infinity()) return 0.0;
  if (z.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(w.value()));
  if (w.is_infinity()) return 2.0 / std::sqrt(1.0 + std::norm(z.value()));
  const Complex a = z.value();
  const Complex b = w.value();
  return 2.0 * std::abs(a - b) / (std::sqrt(1.0 + std::norm(a)) * std::sqrt(1.0 + std::norm(b)));
}

class Circle {
 public:
  Circle(Complex center, double radius) : center_(center), radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius) || !std::isfinite(center.real()) ||
        !std::isfinite(center.imag()))
      fail_input("invalid-circle", "circle needs a finite center and a positive radius");
  }

  Complex center() const { return center_; }
  double radius() const { return radius_; }
  Complex point_at(double angle) const { return center_ + std::polar(radius_, angle); }

 private:
  Complex center_;
  double radius_;
};

/// Circle through x1 < x2 orthogonal to the real axis.
inline Circle perpendicular_circle(double x1, double x2) {
  if (!(x1 < x2)) fail_input("invalid-interval", "perpendicular circle needs x1 < x2");
  return Circle(Complex(0.5 * (x1 + x2), 0.0), 0.5 * (x2 - x1));
}

namespace detail {

inline double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline double point_segment_distance(Complex z, Complex a, Complex b) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double s = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

inline bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  auto on_segment = [](Complex a, Complex b, Complex c) {
    return std::min(a.real(), b.real()) <= c.real() && c.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= c.imag() && c.imag() <= std::max(a.imag(), b.imag());
  };
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

inline double segment_segment_distance(Complex p1, Complex p2, Complex q1, Complex q2) {
  if (segments_intersect(p1, p2, q1, q2)) return 0.0;
  return std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                   point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
}

inline double polyline_distance(std::span<const Complex> closed, Complex z) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < closed.size(); ++j)
    best = std::min(best, point_segment_distance(z, closed[j], closed[(j + 1) % closed.size()]));
  return best;
}

inline int polyline_winding(std::span<const Complex> closed, Complex z) {
  double total = 0.0;
  for (std::size_t j = 0; j < closed.size(); ++j) {
    const Complex a = closed[j] - z;
    const Complex b = closed[(j + 1) % closed.size()] - z;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / two_pi));
}

}  // namespace detail

enum class Orientation { positive, negative };

/// Closed curve stored as N equispaced-parameter samples; the curve itself is
/// the trigonometric interpolant through them.
class BoundaryCurve {
 public:
  static constexpr std::size_t min_nodes = 16;
  static constexpr std::size_t refine_factor = 4;

  explicit BoundaryCurve(std::vector<Complex> nodes) : nodes_(std::move(nodes)) {
    const std::size_t n = nodes_.size();
    if (n < min_nodes || n % 2 != 0)
      fail_input("invalid-node-count",
                 "boundary curves need an even node count >= 16, got " + std::to_string(n));
    for (const auto& z : nodes_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        fail_input("non-finite-node", "boundary node is not finite");
    d1_ = spectral::derivative(std::span<const Complex>(nodes_), 1);
    d2_ = spectral::derivative(std::span<const Complex>(nodes_), 2);
    refined_ = spectral::upsample(std::span<const Complex>(nodes_), refine_factor);
    max_speed_ = 0.0;
    for (const auto& d : d1_) max_speed_ = std::max(max_speed_, std::abs(d));
    if (!(max_speed_ > 0.0)) fail_input("degenerate-curve", "boundary curve has zero length");
    double area = 0.0;
    for (std::size_t j = 0; j < n; ++j) area += detail::cross(nodes_[j], d1_[j]);
    signed_area_ = 0.5 * area * two_pi / static_cast<double>(n);
    if (!is_simple()) fail_input("self-intersecting-curve", "boundary curve is not simple");
  }

  std::size_t size() const { return nodes_.size(); }
  std::span<const Complex> nodes() const { return nodes_; }
  Complex node(std::size_t j) const { return nodes_[j]; }
  /// dz/dt at the nodes, t in [0, 2*pi).
  std::span<const Complex> tangents() const { return d1_; }
  std::span<const Complex> second_derivatives() const { return d2_; }
  std::span<const Complex> refined() const { return refined_; }

  Orientation orientation() const {
    return signed_area_ > 0.0 ? Orientation::positive : Orientation::negative;
  }
  double signed_area() const { return signed_area_; }
  double max_speed() const { return max_speed_; }

  /// Boundary-proximity threshold 2*pi*max|z'|/N.
  double resolution() const { return two_pi * max_speed_ / static_cast<double>(size()); }

  /// Same point set with the opposite traversal; node 0 is kept.
  BoundaryCurve reversed() const {
    std::vector<Complex> r(nodes_.size());
    for (std::size_t j = 0; j < nodes_.size(); ++j) r[j] = nodes_[(nodes_.size() - j) % nodes_.size()];
    return BoundaryCurve(std::move(r));
  }

  double distance_to(Complex z) const { return detail::polyline_distance(refined_, z); }
  int winding_number(Complex z) const { return detail::polyline_winding(refined_, z); }

  Complex centroid() const {
    Complex s{};
    for (const auto& z : nodes_) s += z;
    return s / static_cast<double>(nodes_.size());
  }

  spectral::Interpolant interpolant() const { return spectral::Interpolant(std::span<const Complex>(nodes_)); }

  /// Parameter of the curve point closest to z (Newton on the interpolant,
  /// seeded at the nearest refined sample).
  double closest_parameter(Complex z) const {
    const auto interp = interpolant();
    std::size_t best = 0;
    for (std::size_t j = 1; j < refined_.size(); ++j)
      if (std::abs(refined_[j] - z) < std::abs(refined_[best] - z)) best = j;
    double t = two_pi * static_cast<double>(best) / static_cast<double>(refined_.size());
    for (int it = 0; it < 30; ++it) {
      const Complex g = interp(t) - z;
      const Complex g1 = interp(t, 1);
      const Complex g2 = interp(t, 2);
      const double f1 = (std::conj(g) * g1).real();
      const double f2 = std::norm(g1) + (std::conj(g) * g2).real();
      if (f2 <= 0.0) break;
      const double step = f1 / f2;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    t = std::fmod(t, two_pi);
    if (t < 0) t += two_pi;
    return t;
  }

 private:
  bool is_simple() const {
    const std::size_t n = refined_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Complex p1 = refined_[i];
      const Complex p2 = refined_[(i + 1) % n];
      const double minx = std::min(p1.real(), p2.real()), maxx = std::max(p1.real(), p2.real());
      const double miny = std::min(p1.imag(), p2.imag()), maxy = std::max(p1.imag(), p2.imag());
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
        const Complex q1 = refined_[j];
        const Complex q2 = refined_[(j + 1) % n];
        if (std::max(q1.real(), q2.real()) < minx || std::min(q1.real(), q2.real()) > maxx ||
            std::max(q1.imag(), q2.imag()) < miny || std::min(q1.imag(), q2.imag()) > maxy)
          continue;
        if (detail::segments_intersect(p1, p2, q1, q2)) return false;
      }
    }
    return true;
  }

  std::vector<Complex> nodes_;
  std::vector<Complex> d1_;
  std::vector<Complex> d2_;
  std::vector<Complex> refined_;
  double max_speed_ = 0.0;
  double signed_area_ = 0.0;
};

/// Bounded m-connected domain. Component 0 is the outer curve (positively
/// oriented); components 1..m-1 are holes, stored negatively oriented so the
/// domain always lies to the left of the traversal.
class MultiplyConnectedDomain {
 public:
  MultiplyConnectedDomain(BoundaryCurve outer, std::vector<BoundaryCurve> holes) {
    components_.reserve(holes.size() + 1);
    components_.push_back(outer.orientation() == Orientation::positive ? std::move(outer)
                                                                       : outer.reversed());
    for (auto& h : holes)
      components_.push_back(h.orientation() == Orientation::negative ? std::move(h) : h.reversed());
    validate();
  }

  std::size_t connectivity() const { return components_.size(); }
  std::size_t hole_count() const { return components_.size() - 1; }
  const BoundaryCurve& component(std::size_t i) const { return components_.at(i); }
  std::span<const BoundaryCurve> components() const { return components_; }

  std::size_t total_nodes() const {
    std::size_t n = 0;
    for (const auto& c : components_) n += c.size();
    return n;
  }

  /// Index of the component nearest to z and the distance to it.
  std::pair<std::size_t, double> nearest_component(Complex z) const {
    std::size_t best = 0;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < components_.size(); ++i) {
      const double d = components_[i].distance_to(z);
      if (d < dist) {
        dist = d;
        best = i;
      }
    }
    return {best, dist};
  }

 private:
  void validate() const {
    const auto& outer = components_.front();
    for (std::size_t i = 1; i < components_.size(); ++i) {
      const auto& h = components_[i];
      if (outer.winding_number(h.node(0)) != 1)
        fail_input("hole-outside-outer", "hole " + std::to_string(i) + " is not inside the outer curve");
      for (std::size_t j = 1; j < components_.size(); ++j) {
        if (j == i) continue;
        if (components_[j].winding_number(h.node(0)) != 0)
          fail_input("nested-holes", "hole " + std::to_string(i) + " lies inside hole " + std::to_string(j));
      }
    }
    for (std::size_t i = 0; i < components_.size(); ++i)
      for (std::size_t j = i + 1; j < components_.size(); ++j)
        if (!(min_distance(components_[i], components_[j]) > 0.0))
          fail_input("components-touch", "boundary components " + std::to_string(i) + " and " +
                                             std::to_string(j) + " are not disjoint");
  }

  static double min_distance(const BoundaryCurve& a, const BoundaryCurve& b) {
    const auto pa = a.refined();
    const auto pb = b.refined();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = 0; j < pb.size(); ++j)
        best = std::min(best, std::abs(pa[i] - pb[j]));
    // vertex-vertex distance overestimates by at most a segment length; a
    // zero is only possible through an actual crossing
    for (std::size_t i = 0; i < pa.size() && best > 0.0; ++i)
      for (std::size_t j = 0; j < pb.size(); ++j)
        if (detail::segments_intersect(pa[i], pa[(i + 1) % pa.size()], pb[j], pb[(j + 1) % pb.size()]))
          return 0.0;
    return best;
  }

  std::vector<BoundaryCurve> components_;
};

enum class Location { inside, outside, near_boundary };

/// Non-throwing membership classification used by iterative callers.
inline Location classify(const MultiplyConnectedDomain& d, Complex z) {
  for (const auto& c : d.components())
    if (c.distance_to(z) < c.resolution()) return Location::near_boundary;
  if (d.component(0).winding_number(z) != 1) return Location::outside;
  for (std::size_t i = 1; i < d.connectivity(); ++i)
    if (d.component(i).winding_number(z) != 0) return Location::outside;
  return Location::inside;
}

/// Membership test; points closer to the boundary than the sampling
/// resolution are indeterminate and raise `boundary-proximity`.
inline bool contains(const MultiplyConnectedDomain& d, Complex z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    fail_input("non-finite-point", "membership needs a finite point");
  const Location loc = classify(d, z);
  if (loc == Location::near_boundary)
    fail_input("boundary-proximity", "point is within sampling resolution of the boundary");
  return loc == Location::inside;
}

/// Domain bounded by round circles: the open outer disk minus closed hole disks.
class CircularDomain {
 public:
  CircularDomain(Circle outer, std::vector<Circle> holes) : outer_(outer), holes_(std::move(holes)) {
    for (std::size_t i = 0; i < holes_.size(); ++i) {
      const auto& h = holes_[i];
      if (!(std::abs(h.center() - outer_.center()) + h.radius() < outer_.radius()))
        fail_input("hole-outside-outer",
                   "closed hole disk " + std::to_string(i + 1) + " is not strictly inside the outer disk");
      for (std::size_t j = i + 1; j < holes_.size(); ++j)
        if (!(std::abs(h.center() - holes_[j].center()) > h.radius() + holes_[j].radius()))
          fail_input("components-touch", "closed hole disks " + std::to_string(i + 1) + " and " +
                                             std::to_string(j + 1) + " intersect");
    }
  }

  const Circle& outer() const { return outer_; }
  const std::vector<Circle>& holes() const { return holes_; }
  std::size_t connectivity() const { return holes_.size() + 1; }

  /// All boundary circles, outer first.
  std::vector<Circle> circles() const {
    std::vector<Circle> all{outer_};
    all.insert(all.end(), holes_.begin(), holes_.end());
    return all;
  }

  bool contains(Complex z) const {
    if (!(std::abs(z - outer_.center()) < outer_.radius())) return false;
    for (const auto& h : holes_)
      if (std::abs(z - h.center()) <= h.radius()) return false;
    return true;
  }

  /// Signed clearance of z: distance to the boundary, negative outside.
  double clearance(Complex z) const {
    double d = outer_.radius() - std::abs(z - outer_.center());
    for (const auto& h : holes_) d = std::min(d, std::abs(z - h.center()) - h.radius());
    return d;
  }

 private:
  Circle outer_;
  std::vector<Circle> holes_;
};

/// Sample every circle at N equispaced angles starting at center + r.
inline MultiplyConnectedDomain circular_to_curves(const CircularDomain& c, std::size_t n) {
  if (n < BoundaryCurve::min_nodes || n % 2 != 0)
    fail_input("invalid-node-count", "N must be even and >= 16, got " + std::to_string(n));
  auto sample = [n](const Circle& circle, double sign) {
    std::vector<Complex> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = circle.point_at(sign * spectral::node_parameter(j, n));
    return BoundaryCurve(std::move(z));
  };
  std::vector<BoundaryCurve> holes;
  holes.reserve(c.holes().size());
  for (const auto& h : c.holes()) holes.push_back(sample(h, -1.0));
  return MultiplyConnectedDomain(sample(c.outer(), 1.0), std::move(holes));
}

inline std::vector<Complex> sample_circle(const Circle& c, std::size_t n) {
  std::vector<Complex> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = c.point_at(spectral::node_parameter(j, n));
  return z;
}

/// Symmetric Hausdorff distance between finite point sets.
inline double hausdorff_distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.empty() || b.empty()) fail_input("empty-set", "Hausdorff distance needs non-empty sets");
  auto directed = [](std::span<const Complex> from, std::span<const Complex> to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) {
        best = std::min(best, std::abs(p - q));
        if (best == 0.0) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

/// All boundary nodes of a domain as one point set.
inline std::vector<Complex> boundary_samples(const MultiplyConnectedDomain& d) {
  std::vector<Complex> all;
  for (const auto& c : d.components()) all.insert(all.end(), c.nodes().begin(), c.nodes().end());
  return all;
}

}  // namespace slitmap
