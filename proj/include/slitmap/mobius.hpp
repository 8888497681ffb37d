#pragma once

// Fractional-linear maps of the extended plane, symmetric points with
// respect to circles, and symmetric pairs of circular domains.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "slitmap/error.hpp"
#include "slitmap/geometry.hpp"

namespace slitmap {

/// z -> (a z + b) / (c z + d), stored with a d - b c = 1.
class MobiusMap {
 public:
  MobiusMap(Complex a, Complex b, Complex c, Complex d) {
    const Complex det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(std::abs(det) > 1e-14 * scale * scale))
      fail_input("degenerate-mobius", "coefficients have vanishing determinant");
    const Complex s = std::sqrt(det);
    a_ = a / s;
    b_ = b / s;
    c_ = c / s;
    d_ = d / s;
  }

  static MobiusMap identity() { return {1.0, 0.0, 0.0, 1.0}; }

  Complex a() const { return a_; }
  Complex b() const { return b_; }
  Complex c() const { return c_; }
  Complex d() const { return d_; }
  Complex determinant() const { return a_ * d_ - b_ * c_; }

  ExtendedPoint operator()(const ExtendedPoint& z) const {
    if (z.is_infinity()) {
      if (c_ == Complex{}) return ExtendedPoint::infinity();
      return a_ / c_;
    }
    const Complex w = z.value();
    const Complex den = c_ * w + d_;
    const Complex num = a_ * w + b_;
    if (den == Complex{}) return ExtendedPoint::infinity();
    const Complex q = num / den;
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) return ExtendedPoint::infinity();
    return q;
  }

  /// Finite image of a finite point; the caller guarantees z is not the pole.
  Complex eval(Complex z) const { return (a_ * z + b_) / (c_ * z + d_); }

  /// Pole -d/c, or infinity when the map is affine.
  ExtendedPoint pole() const {
    if (c_ == Complex{}) return ExtendedPoint::infinity();
    return -d_ / c_;
  }

 private:
  Complex a_, b_, c_, d_;
};

inline ExtendedPoint apply(const MobiusMap& m, const ExtendedPoint& z) { return m(z); }

inline MobiusMap inverse(const MobiusMap& m) { return {m.d(), -m.b(), -m.c(), m.a()}; }

/// m1 after m2.
inline MobiusMap compose(const MobiusMap& m1, const MobiusMap& m2) {
  return {m1.a() * m2.a() + m1.b() * m2.c(), m1.a() * m2.b() + m1.b() * m2.d(),
          m1.c() * m2.a() + m1.d() * m2.c(), m1.c() * m2.b() + m1.d() * m2.d()};
}

/// The map sending 0, 1, infinity to a, b, c. For finite a, b, c this is
/// z -> (c z - a q)/(z - q) with q = (b - c)/(b - a); an infinite entry takes
/// the corresponding limit of the coefficient matrix.
inline MobiusMap from_triple(const ExtendedPoint& a, const ExtendedPoint& b, const ExtendedPoint& c) {
  constexpr double min_separation = 1e-14;
  if (spherical_distance(a, b) < min_separation || spherical_distance(b, c) < min_separation ||
      spherical_distance(a, c) < min_separation)
    fail_input("degenerate-triple", "from_triple needs three distinct points");
  if (a.is_infinity()) {
    const Complex bb = b.value(), cc = c.value();
    return {cc, bb - cc, 1.0, 0.0};
  }
  if (b.is_infinity()) {
    const Complex aa = a.value(), cc = c.value();
    return {-cc, aa, -1.0, 1.0};
  }
  if (c.is_infinity()) {
    const Complex aa = a.value(), bb = b.value();
    return {bb - aa, aa, 0.0, 1.0};
  }
  const Complex aa = a.value(), bb = b.value(), cc = c.value();
  const Complex q = (bb - cc) / (bb - aa);
  return {cc, -aa * q, 1.0, -q};
}

/// Reference points used to compare maps by action.
inline std::array<ExtendedPoint, 3> action_probes() {
  return {ExtendedPoint(0.0), ExtendedPoint(1.0), ExtendedPoint::infinity()};
}

/// Equality as transformations: images of 0, 1, infinity agree on the sphere.
inline bool action_equal(const MobiusMap& m1, const MobiusMap& m2, double tol = 1e-9) {
  for (const auto& p : action_probes())
    if (spherical_distance(m1(p), m2(p)) > tol) return false;
  return true;
}

/// Reflection of z in a circle: center + r^2 / conj(z - center).
inline ExtendedPoint symmetric_point(const Circle& c, const ExtendedPoint& z) {
  if (z.is_infinity()) return c.center();
  const Complex d = z.value() - c.center();
  if (d == Complex{}) return ExtendedPoint::infinity();
  return c.center() + c.radius() * c.radius() / std::conj(d);
}

struct Line {
  Complex point;
  Complex direction;  // unit length
};

using CircleOrLine = std::variant<Circle, Line>;

/// Image of a circle under a Mobius map; a circle through the pole becomes a
/// line. The fitted circle is verified on 20 further samples.
inline CircleOrLine image_of_circle(const MobiusMap& m, const Circle& c) {
  const ExtendedPoint pole = m.pole();
  if (!pole.is_infinity()) {
    const double off = std::abs(std::abs(pole.value() - c.center()) - c.radius());
    if (off <= 1e-13 * std::max(1.0, c.radius())) {
      // pick two samples away from the pole
      const double phi = std::arg(pole.value() - c.center());
      const Complex p1 = m.eval(c.point_at(phi + 2.0 * std::numbers::pi / 3.0));
      const Complex p2 = m.eval(c.point_at(phi + 4.0 * std::numbers::pi / 3.0));
      return Line{p1, (p2 - p1) / std::abs(p2 - p1)};
    }
  }
  std::array<Complex, 3> w{};
  for (int k = 0; k < 3; ++k) {
    const ExtendedPoint img = m(c.point_at(two_pi * k / 3.0));
    if (img.is_infinity()) fail_numerical("circle-image", "sample hit the pole");
    w[static_cast<std::size_t>(k)] = img.value();
  }
  // circumcenter of three points, translated to w[0] for stability
  const Complex b = w[1] - w[0];
  const Complex cc = w[2] - w[0];
  const double den = 2.0 * detail::cross(b, cc);
  if (den == 0.0) fail_numerical("circle-image", "collinear image samples");
  const double nb = std::norm(b), nc = std::norm(cc);
  const Complex center = w[0] + Complex(cc.imag() * nb - b.imag() * nc, b.real() * nc - cc.real() * nb) / den;
  const double radius = std::abs(w[0] - center);
  const Circle image(center, radius);
  for (int k = 0; k < 20; ++k) {
    const Complex z = m.eval(c.point_at(two_pi * (k + 0.5) / 20.0));
    if (std::abs(std::abs(z - center) - radius) > 1e-10 * std::max(1.0, radius) * std::max(1.0, std::abs(center)))
      fail_numerical("circle-image", "image samples do not lie on the fitted circle");
  }
  return image;
}

struct SymmetricPair {
  ExtendedPoint p;
  ExtendedPoint q;
  std::pair<std::size_t, std::size_t> circle_indices;
};

/// The pair of points symmetric with respect to both circles. Solved in
/// closed form on the line of centers; concentric circles give {center, inf}.
inline SymmetricPair common_symmetric_pair(const Circle& c1, const Circle& c2) {
  const Complex offset = c2.center() - c1.center();
  const double dist = std::abs(offset);
  const double r1 = c1.radius(), r2 = c2.radius();
  const double scale = std::max({r1, r2, dist});
  if (dist <= 1e-15 * scale) {
    if (std::abs(r1 - r2) <= 1e-15 * scale)
      fail_input("no-common-pair", "coincident circles have no common symmetric pair");
    return {c1.center(), ExtendedPoint::infinity(), {0, 1}};
  }
  const bool disjoint = dist > r1 + r2;
  const bool nested = dist < std::abs(r1 - r2);
  if (!disjoint && !nested)
    fail_input("no-common-pair", "intersecting or tangent circles have no common symmetric pair");
  // x y = r1^2 and (x - d)(y - d) = r2^2 along the axis through c1 toward c2
  const double s = (r1 * r1 + dist * dist - r2 * r2) / dist;
  const double disc = s * s - 4.0 * r1 * r1;
  if (!(disc > 0.0)) fail_input("no-common-pair", "circles do not separate a symmetric pair");
  const double t1 = 0.5 * (s + std::copysign(std::sqrt(disc), s));
  const double t2 = r1 * r1 / t1;
  const Complex dir = offset / dist;
  const Complex p = c1.center() + dir * std::min(t1, t2);
  const Complex q = c1.center() + dir * std::max(t1, t2);
  return {p, q, {0, 1}};
}

/// Symmetry residual of {p, q} with respect to c, measured on the sphere.
inline double symmetry_residual(const Circle& c, const ExtendedPoint& p, const ExtendedPoint& q) {
  return spherical_distance(symmetric_point(c, p), q);
}

/// Which complementary component of a circular domain holds z:
/// 0 for the exterior of the outer disk (including infinity), i >= 1 for
/// hole i, or -1 when z lies in the closed domain.
inline int complementary_component(const CircularDomain& d, const ExtendedPoint& z) {
  if (z.is_infinity()) return 0;
  const Complex w = z.value();
  if (std::abs(w - d.outer().center()) > d.outer().radius()) return 0;
  for (std::size_t i = 0; i < d.holes().size(); ++i)
    if (std::abs(w - d.holes()[i].center()) < d.holes()[i].radius()) return static_cast<int>(i + 1);
  return -1;
}

/// One symmetric pair per unordered pair of boundary circles (indices refer
/// to `d.circles()`, outer = 0). The 2 s_m points must be pairwise distinct.
inline std::vector<SymmetricPair> symmetric_pairs(const CircularDomain& d) {
  const auto circles = d.circles();
  std::vector<SymmetricPair> pairs;
  for (std::size_t i = 0; i < circles.size(); ++i)
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      auto pr = common_symmetric_pair(circles[i], circles[j]);
      pr.circle_indices = {i, j};
      const double res = std::max({symmetry_residual(circles[i], pr.p, pr.q),
                                   symmetry_residual(circles[j], pr.p, pr.q)});
      if (res > 1e-10)
        fail_numerical("symmetric-pair-residual", "symmetric pair residual " + format_number(res));
      const int cp = complementary_component(d, pr.p);
      const int cq = complementary_component(d, pr.q);
      if (cp < 0 || cq < 0 || cp == cq)
        fail_numerical("degenerate-configuration", "symmetric pair not separated by the domain");
      pairs.push_back(pr);
    }
  std::vector<ExtendedPoint> pts;
  for (const auto& pr : pairs) {
    pts.push_back(pr.p);
    pts.push_back(pr.q);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (spherical_distance(pts[i], pts[j]) <= 1e-8)
        fail_numerical("degenerate-configuration", "symmetric points are not pairwise distinct");
  return pairs;
}

/// Image of a circular domain under a Mobius map whose pole lies off the
/// closed domain. The circle bounding the pole's complementary component
/// becomes the outer circle; the other images keep their relative order.
inline CircularDomain pushforward(const CircularDomain& d, const MobiusMap& m) {
  const int pole_side = complementary_component(d, m.pole());
  if (pole_side < 0) fail_input("unbounded-image", "pole lies in the closed domain");
  const auto circles = d.circles();
  std::vector<Circle> images;
  for (const auto& c : circles) {
    auto img = image_of_circle(m, c);
    if (!std::holds_alternative<Circle>(img)) fail_input("unbounded-image", "a boundary circle maps to a line");
    images.push_back(std::get<Circle>(img));
  }
  const auto outer_idx = static_cast<std::size_t>(pole_side);
  std::vector<Circle> holes;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (i != outer_idx) holes.push_back(images[i]);
  return CircularDomain(images[outer_idx], std::move(holes));
}

/// Image of a sampled domain under a Mobius map analytic on its closure.
/// The curve around the pole's complementary component becomes the outer one.
inline MultiplyConnectedDomain pushforward(const MultiplyConnectedDomain& d, const MobiusMap& m) {
  std::size_t outer_idx = 0;
  const ExtendedPoint pole = m.pole();
  if (!pole.is_infinity()) {
    const Complex p = pole.value();
    if (d.component(0).winding_number(p) == 1) {
      outer_idx = d.connectivity();
      for (std::size_t i = 1; i < d.connectivity(); ++i)
        if (d.component(i).winding_number(p) != 0) outer_idx = i;
      if (outer_idx == d.connectivity()) fail_input("unbounded-image", "pole lies in the domain");
    }
  }
  std::vector<BoundaryCurve> mapped;
  for (const auto& c : d.components()) {
    std::vector<Complex> z(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) z[j] = m.eval(c.node(j));
    mapped.emplace_back(std::move(z));
  }
  std::vector<BoundaryCurve> holes;
  for (std::size_t i = 0; i < mapped.size(); ++i)
    if (i != outer_idx) holes.push_back(mapped[i]);
  return MultiplyConnectedDomain(mapped[outer_idx], std::move(holes));
}

/// Disk automorphism z -> e^{i theta} (z - p) / (1 - conj(p) z), |p| < 1.
inline MobiusMap disk_automorphism(Complex p, double theta = 0.0) {
  const Complex rot = std::polar(1.0, theta);
  return {rot, -rot * p, -std::conj(p), 1.0};
}

}  // namespace slitmap
