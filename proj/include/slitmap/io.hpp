#pragma once

// JSON domain specs, export records (JSON/CSV) and SVG rendering.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "slitmap/circular_aut.hpp"
#include "slitmap/error.hpp"
#include "slitmap/families.hpp"
#include "slitmap/geometry.hpp"
#include "slitmap/koebe.hpp"
#include "slitmap/spectral.hpp"

namespace slitmap::io {

using json = nlohmann::json;

struct DomainSpec {
  std::optional<CircularDomain> circular;
  std::vector<std::vector<Complex>> curves;  // for "curves" specs
  std::optional<Complex> a1;
  std::optional<Complex> a2;

  bool is_circular() const { return circular.has_value(); }

  /// Boundary curves with `nodes` points each; curve specs are resampled
  /// through their trigonometric interpolant when the counts differ.
  MultiplyConnectedDomain curves_with(std::size_t nodes) const {
    if (circular) return circular_to_curves(*circular, nodes);
    std::vector<BoundaryCurve> comps;
    for (const auto& pts : curves) {
      if (pts.size() == nodes || nodes == 0) {
        comps.emplace_back(pts);
        continue;
      }
      if (pts.size() < 3) fail_input("invalid-spec", "curve components need at least 3 points");
      const spectral::Interpolant interp{std::span<const Complex>(pts)};
      std::vector<Complex> z(nodes);
      for (std::size_t j = 0; j < nodes; ++j) z[j] = interp(spectral::node_parameter(j, nodes));
      comps.emplace_back(std::move(z));
    }
    if (comps.empty()) fail_input("invalid-spec", "curves spec has no components");
    const BoundaryCurve outer = comps.front();
    return MultiplyConnectedDomain(outer, std::vector<BoundaryCurve>(comps.begin() + 1, comps.end()));
  }

  /// Marked points, defaulting to node 0 of components 0 and 1.
  std::pair<Complex, Complex> marking(const MultiplyConnectedDomain& d) const {
    if (d.connectivity() < 2) fail_input("connectivity", "canonical maps need at least two boundary components");
    return {a1.value_or(d.component(0).node(0)), a2.value_or(d.component(1).node(0))};
  }
};

namespace detail {

inline Complex point(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail_input("invalid-spec", std::string(what) + " must be a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline Circle circle(const json& j, const char* what) {
  if (!j.is_object() || !j.contains("center") || !j.contains("radius") || !j["radius"].is_number())
    fail_input("invalid-spec", std::string(what) + " needs center and radius");
  return Circle(point(j["center"], what), j["radius"].get<double>());
}

inline json point_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline std::string csv_number(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

}  // namespace detail

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail_input("invalid-json", e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("missing-input", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

inline DomainSpec domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    fail_input("invalid-spec", "domain spec needs a string \"type\"");
  DomainSpec s;
  const auto type = j["type"].get<std::string>();
  if (type == "circular") {
    if (!j.contains("outer")) fail_input("invalid-spec", "circular spec needs \"outer\"");
    std::vector<Circle> holes;
    if (j.contains("holes")) {
      if (!j["holes"].is_array()) fail_input("invalid-spec", "\"holes\" must be an array");
      for (const auto& h : j["holes"]) holes.push_back(detail::circle(h, "hole"));
    }
    s.circular.emplace(detail::circle(j["outer"], "outer"), std::move(holes));
  } else if (type == "curves") {
    if (!j.contains("components") || !j["components"].is_array())
      fail_input("invalid-spec", "curves spec needs a \"components\" array");
    for (const auto& c : j["components"]) {
      if (!c.is_object() || !c.contains("points") || !c["points"].is_array())
        fail_input("invalid-spec", "each component needs a \"points\" array");
      std::vector<Complex> pts;
      for (const auto& p : c["points"]) pts.push_back(detail::point(p, "point"));
      s.curves.push_back(std::move(pts));
    }
    // validate the geometry as given
    (void)s.curves_with(0);
  } else if (type == "family") {
    fail_input("invalid-spec", "family specs are only accepted by `sweep`");
  } else {
    fail_input("invalid-spec", "unknown domain type \"" + type + "\"");
  }
  if (j.contains("marking")) {
    const auto& m = j["marking"];
    if (m.contains("a1")) s.a1 = detail::point(m["a1"], "a1");
    if (m.contains("a2")) s.a2 = detail::point(m["a2"], "a2");
  }
  return s;
}

inline json domain_to_json(const CircularDomain& d) {
  json holes = json::array();
  for (const auto& h : d.holes()) holes.push_back({{"center", detail::point_json(h.center())}, {"radius", h.radius()}});
  return {{"type", "circular"},
          {"outer", {{"center", detail::point_json(d.outer().center())}, {"radius", d.outer().radius()}}},
          {"holes", holes}};
}

inline DomainFamily family_from_json(const json& j) {
  if (!j.is_object() || j.value("type", "") != "family" || !j.contains("family") || !j["family"].is_string())
    fail_input("invalid-spec", "sweep input must be {\"type\":\"family\",\"family\":...}");
  const auto name = j["family"].get<std::string>();
  DomainFamily f;
  if (name == "annulus-linear") {
    f = annulus_family(j.value("rho0", 0.2), j.value("slope", 0.1), j.value("lo", 0.0), j.value("hi", 1.0));
  } else if (name == "counterexample") {
    f = counterexample_family();
  } else if (name == "tilde-counterexample") {
    f = tilde_counterexample_family();
  } else {
    fail_input("invalid-spec", "unknown family \"" + name + "\"");
  }
  if (j.contains("lo")) f.lo = j["lo"].get<double>();
  if (j.contains("hi")) f.hi = j["hi"].get<double>();
  return f;
}

inline json moduli_json(const SlitAnnulus& s) {
  json slits = json::array();
  for (const auto& sl : s.slits)
    slits.push_back({{"r", sl.radius},
                     {"alpha", sl.alpha},
                     {"beta", sl.beta},
                     {"component", sl.component},
                     {"alpha_preimage", detail::point_json(sl.alpha_preimage)},
                     {"beta_preimage", detail::point_json(sl.beta_preimage)}});
  return {{"m", s.slits.size() + 2}, {"r2", s.r2}, {"slits", slits}};
}

inline std::string moduli_csv(const SlitAnnulus& s) {
  std::string head = "m,r2", row = std::to_string(s.slits.size() + 2) + "," + detail::csv_number(s.r2);
  for (std::size_t j = 0; j < s.slits.size(); ++j) {
    const auto idx = std::to_string(j + 3);
    head += ",r" + idx + ",alpha" + idx + ",beta" + idx;
    row += "," + detail::csv_number(s.slits[j].radius) + "," + detail::csv_number(s.slits[j].alpha) + "," +
           detail::csv_number(s.slits[j].beta);
  }
  return head + "\n" + row + "\n";
}

inline json diagnostics_json(const CanonicalMap& k) {
  const auto& d = k.diagnostics();
  return {{"boundary_residual", d.boundary_residual},
          {"condition_estimate", d.condition_estimate},
          {"period_condition", d.period_condition},
          {"period_leak", d.period_leak},
          {"max_modulus_stdev", d.max_modulus_stdev},
          {"nodes", k.domain().total_nodes()}};
}

inline json mobius_json(const MobiusMap& m) {
  auto c = [](Complex z) { return detail::point_json(z); };
  return json::array({c(m.a()), c(m.b()), c(m.c()), c(m.d())});
}

inline json aut_json(const AutGroup& g) {
  json el = json::array();
  for (std::size_t i = 0; i < g.elements.size(); ++i)
    el.push_back({{"label", g.labels[i]}, {"coefficients", mobius_json(g.elements[i])}});
  return {{"tag", g.tag}, {"order", g.order()}, {"abelian", g.is_abelian()}, {"elements", el}};
}

inline std::string sweep_csv(const FamilySweep& s) {
  std::size_t slits = 0;
  for (const auto& m : s.moduli)
    if (m) slits = std::max(slits, m->slits.size());
  std::string out = "lambda,r2";
  for (std::size_t j = 0; j < slits; ++j) {
    const auto idx = std::to_string(j + 3);
    out += ",r" + idx + ",alpha" + idx + ",beta" + idx;
  }
  out += ",residual\n";
  for (std::size_t i = 0; i < s.lambda.size(); ++i) {
    out += detail::csv_number(s.lambda[i]) + ",";
    const auto& m = s.moduli[i];
    out += m ? detail::csv_number(m->r2) : "";
    for (std::size_t j = 0; j < slits; ++j) {
      const bool ok = m && j < m->slits.size();
      out += "," + (ok ? detail::csv_number(m->slits[j].radius) : "");
      out += "," + (ok ? detail::csv_number(m->slits[j].alpha) : "");
      out += "," + (ok ? detail::csv_number(m->slits[j].beta) : "");
    }
    out += "," + detail::csv_number(s.residual[i]) + "\n";
  }
  return out;
}

inline std::string smoothness_text(const FamilySweep& s, const std::vector<CurveReport>& reports, int order) {
  std::ostringstream out;
  out << "family " << s.label << ", " << s.lambda.size() << " grid points, difference order " << order << "\n";
  for (const auto& r : reports) {
    out << r.name << ": max |quotient| " << format_number(r.max_abs);
    if (!r.flagged.empty()) {
      out << ", discontinuity candidates at";
      for (auto i : r.flagged) out << " [" << detail::csv_number(s.lambda[i]) << "]";
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < s.failure.size(); ++i)
    if (!s.failure[i].empty()) out << "lambda " << detail::csv_number(s.lambda[i]) << " failed: " << s.failure[i] << "\n";
  return out.str();
}

inline json jump_json(const JumpReport& r) {
  auto samples = [](const std::vector<JumpSample>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back({{"lambda", s.lambda}, {"value", detail::point_json(s.value)}});
    return a;
  };
  return {{"probe", detail::point_json(r.probe)},
          {"positive", samples(r.positive)},
          {"negative", samples(r.negative)},
          {"limit_positive", detail::point_json(r.limit_positive)},
          {"limit_negative", detail::point_json(r.limit_negative)},
          {"max_step_positive", r.max_step_positive},
          {"max_step_negative", r.max_step_negative},
          {"jump", r.jump},
          {"expected_jump", r.expected_jump},
          {"discontinuous", r.discontinuous}};
}

inline std::string jump_text(const JumpReport& r) {
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "probe %.9g%+.9gi\n", r.probe.real(), r.probe.imag());
  out += buf;
  std::snprintf(buf, sizeof buf, "  lambda -> 0+ : %.9g%+.9gi (max step %.3g)\n", r.limit_positive.real(),
                r.limit_positive.imag(), r.max_step_positive);
  out += buf;
  std::snprintf(buf, sizeof buf, "  lambda -> 0- : %.9g%+.9gi (max step %.3g)\n", r.limit_negative.real(),
                r.limit_negative.imag(), r.max_step_negative);
  out += buf;
  std::snprintf(buf, sizeof buf, "  jump %.9g (|z - tau(z)| = %.9g), %s\n", r.jump, r.expected_jump,
                r.discontinuous ? "discontinuous" : "continuous");
  out += buf;
  return out;
}

/// Source domain and image slit annulus side by side.
inline std::string render_svg(const CanonicalMap& k) {
  const auto& d = k.domain();
  const auto& mod = k.moduli();
  double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
  for (const auto& c : d.components())
    for (const auto& z : c.nodes()) {
      minx = std::min(minx, z.real());
      maxx = std::max(maxx, z.real());
      miny = std::min(miny, z.imag());
      maxy = std::max(maxy, z.imag());
    }
  const double panel = 400.0, pad = 20.0;
  const double span = std::max(maxx - minx, maxy - miny);
  const double scale = (panel - 2 * pad) / span;
  auto src = [&](Complex z) {
    return std::pair<double, double>{pad + (z.real() - minx) * scale, pad + (maxy - z.imag()) * scale};
  };
  const double iscale = (panel - 2 * pad) / 2.0;
  auto img = [&](Complex w) {
    return std::pair<double, double>{panel + pad + (w.real() + 1.0) * iscale, pad + (1.0 - w.imag()) * iscale};
  };
  std::ostringstream o;
  char buf[160];
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * panel << "\" height=\"" << panel + 40
    << "\" viewBox=\"0 0 " << 2 * panel << " " << panel + 40 << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};
  auto color = [&](std::size_t c) { return colors[c % 7]; };
  for (std::size_t c = 0; c < d.connectivity(); ++c) {
    o << "<polygon fill=\"none\" stroke=\"" << color(c) << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& z : d.component(c).nodes()) {
      const auto [x, y] = src(z);
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
      o << buf;
    }
    o << "\"/>\n";
  }
  auto circle = [&](double r, std::size_t c) {
    const auto [cx, cy] = img(0.0);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\"/>\n",
                  cx, cy, r * iscale, color(c));
    o << buf;
  };
  circle(1.0, k.first_component());
  circle(mod.r2, k.second_component());
  for (const auto& s : mod.slits) {
    const auto [x0, y0] = img(std::polar(s.radius, s.alpha));
    const auto [x1, y1] = img(std::polar(s.radius, s.beta));
    const int large = s.beta - s.alpha > std::numbers::pi ? 1 : 0;
    // counterclockwise in the image is clockwise in SVG coordinates
    std::snprintf(buf, sizeof buf, "<path d=\"M %.2f %.2f A %.2f %.2f 0 %d 0 %.2f %.2f\" fill=\"none\" stroke=\"%s\" stroke-width=\"2\"/>\n",
                  x0, y0, s.radius * iscale, s.radius * iscale, large, x1, y1, color(s.component));
    o << buf;
    for (const auto& [x, y] : {std::pair{x0, y0}, std::pair{x1, y1}}) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", x, y, color(s.component));
      o << buf;
    }
  }
  double lx = pad;
  for (std::size_t c = 0; c < d.connectivity(); ++c) {
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" fill=\"%s\"/><text x=\"%.1f\" y=\"%.1f\" "
                  "font-family=\"sans-serif\" font-size=\"12\">component %zu</text>\n",
                  lx, panel + 12, color(c), lx + 16, panel + 22, c);
    o << buf;
    lx += 110;
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace slitmap::io
