#pragma once

// Subcommands of the slitmap command-line tool. Each run_* returns the exit
// code: 0 ok, 1 failed invariant, 2 bad input, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "slitmap/circular_aut.hpp"
#include "slitmap/dirichlet.hpp"
#include "slitmap/error.hpp"
#include "slitmap/families.hpp"
#include "slitmap/io.hpp"
#include "slitmap/koebe.hpp"
#include "slitmap/mobius.hpp"

namespace slitmap::cli {

enum ExitCode : int { ok = 0, invariant_failure = 1, bad_input = 2, numerical_failure = 3 };

struct GridSpec {
  double start = 0.0;
  double end = 1.0;
  std::size_t count = 11;
};

struct RunConfig {
  std::string subcommand;
  std::vector<std::string> inputs;
  std::size_t nodes = 256;
  std::optional<GridSpec> grid;
  std::string out_dir = ".";
  std::optional<double> tol;
  std::uint64_t seed = 1;
};

inline GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto p1 = text.find(':');
  const auto p2 = p1 == std::string::npos ? std::string::npos : text.find(':', p1 + 1);
  if (p2 == std::string::npos) fail_input("invalid-grid", "grid must be START:END:COUNT");
  try {
    g.start = std::stod(text.substr(0, p1));
    g.end = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
    const long c = std::stol(text.substr(p2 + 1));
    if (c < 2) fail_input("invalid-grid", "grid count must be at least 2");
    g.count = static_cast<std::size_t>(c);
  } catch (const std::logic_error&) {
    fail_input("invalid-grid", "grid must be START:END:COUNT");
  }
  if (!(g.end > g.start)) fail_input("invalid-grid", "grid end must exceed its start");
  return g;
}

inline void validate(const RunConfig& cfg) {
  if (cfg.nodes < 16 || cfg.nodes % 2 != 0) fail_input("invalid-node-count", "N must be even and >= 16");
  if (cfg.tol && !(*cfg.tol > 0.0)) fail_input("invalid-tolerance", "tolerances must be positive");
}

inline int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::invalid_input: return bad_input;
    case ErrorKind::numerical: return numerical_failure;
    case ErrorKind::invariant: return invariant_failure;
  }
  return numerical_failure;
}

/// Run `body`, turning library errors into one-line reports and exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: invalid-spec: " << e.what() << "\n";
    return bad_input;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return numerical_failure;
  }
}

inline std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return std::filesystem::path(cfg.out_dir) / name;
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) fail_input("output", "cannot write " + p.string());
  f << text;
}

inline const std::string& single_input(const RunConfig& cfg) {
  if (cfg.inputs.size() != 1) fail_input("missing-input", "exactly one --input is required");
  return cfg.inputs.front();
}

inline int run_map(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(cfg);
    const auto spec = io::domain_from_json(io::read_json_file(single_input(cfg)));
    const auto d = spec.curves_with(cfg.nodes);
    const auto [a1, a2] = spec.marking(d);
    const CanonicalMap k(d, a1, a2);
    io::json doc = io::moduli_json(k.moduli());
    doc["diagnostics"] = io::diagnostics_json(k);
    doc["marking"] = {{"a1", {a1.real(), a1.imag()}}, {"a2", {a2.real(), a2.imag()}}};
    write_file(output_path(cfg, "moduli.json"), doc.dump(2) + "\n");
    write_file(output_path(cfg, "moduli.csv"), io::moduli_csv(k.moduli()));
    write_file(output_path(cfg, "map.svg"), io::render_svg(k));
    out << io::moduli_csv(k.moduli());
    return static_cast<int>(ok);
  });
}

inline int run_aut(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(cfg);
    const auto spec = io::domain_from_json(io::read_json_file(single_input(cfg)));
    if (!spec.is_circular())
      fail_input("non-circular", "aut needs a circular domain; map curve domains with `map` first");
    const auto g = enumerate_automorphisms(*spec.circular, cfg.tol.value_or(1e-8));
    write_file(output_path(cfg, "aut.json"), io::aut_json(g).dump(2) + "\n");
    out << "tag " << g.tag << ", order " << g.order() << "\n";
    return static_cast<int>(ok);
  });
}

inline int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(cfg);
    const auto family = io::family_from_json(io::read_json_file(single_input(cfg)));
    const GridSpec g = cfg.grid.value_or(GridSpec{std::max(0.0, family.lo), family.hi, 11});
    const auto sweep = sweep_moduli(family, uniform_grid(g.start, g.end, g.count), cfg.nodes);
    write_file(output_path(cfg, "sweep.csv"), io::sweep_csv(sweep));
    const auto report = smoothness_report(sweep, 1);
    const auto text = io::smoothness_text(sweep, report, 1);
    write_file(output_path(cfg, "smoothness.txt"), text);
    out << text;
    if (10 * sweep.failures() > sweep.lambda.size()) {
      err << "error: sweep-failures: " << sweep.failures() << " of " << sweep.lambda.size()
          << " grid points failed\n";
      return static_cast<int>(numerical_failure);
    }
    return static_cast<int>(ok);
  });
}

inline int run_counterexample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(cfg);
    const GridSpec g = cfg.grid.value_or(GridSpec{0.1, 0.5, 5});
    if (!(g.start > 0.0 && g.end <= 1.0)) fail_input("invalid-grid", "counterexample grid must lie in (0, 1]");
    const auto pos = uniform_grid(g.start, g.end, g.count);
    std::vector<double> neg;
    for (double l : pos) neg.push_back(-l);
    io::json doc = io::json::array();
    std::string text;
    bool pass = true;
    const double one_sided_tol = 1e-4;
    for (const Complex probe : {Complex(-0.9, 0.0), Complex(-std::sqrt(counterexample_mu), 0.0)}) {
      const auto rep = biholomorphism_jump(pos, neg, probe, cfg.nodes);
      doc.push_back(io::jump_json(rep));
      text += io::jump_text(rep);
      pass = pass && rep.max_step_positive < one_sided_tol && rep.max_step_negative < one_sided_tol;
      pass = pass && std::abs(rep.jump - rep.expected_jump) < one_sided_tol;
    }
    write_file(output_path(cfg, "jump.json"), doc.dump(2) + "\n");
    write_file(output_path(cfg, "jump.txt"), text);
    out << text;
    if (!pass) {
      err << "error: jump-report: one-sided continuity or jump size check failed\n";
      return static_cast<int>(invariant_failure);
    }
    return static_cast<int>(ok);
  });
}

/// A fixture for `verify`: a circular domain with optional expectations.
struct Fixture {
  std::string name;
  io::DomainSpec spec;
  std::optional<double> expect_r2;
  std::optional<std::string> expect_tag;
};

inline Fixture fixture_from_json(const std::string& name, const io::json& j) {
  Fixture f{name, io::domain_from_json(j), std::nullopt, std::nullopt};
  if (j.contains("expect")) {
    const auto& e = j["expect"];
    if (e.contains("r2")) f.expect_r2 = e["r2"].get<double>();
    if (e.contains("aut_tag")) f.expect_tag = e["aut_tag"].get<std::string>();
  }
  return f;
}

/// Fixtures shipped in data/fixtures, built in code.
inline std::vector<Fixture> builtin_fixtures() {
  const double r6 = 0.15;
  const double mu6 = (1.0 - std::sqrt(1.0 - 4.0 * r6 * (1.0 + r6))) / (2.0 * (1.0 + r6));
  std::vector<Fixture> fx;
  auto add = [&](std::string name, CircularDomain d, std::optional<double> r2, std::optional<std::string> tag) {
    io::DomainSpec s;
    s.circular = std::move(d);
    fx.push_back({std::move(name), std::move(s), r2, std::move(tag)});
  };
  add("annulus", CircularDomain(Circle(0.0, 1.0), {Circle(0.0, 0.25)}), 0.25, std::nullopt);
  add("t_tau", ThreeConnectedCircular(3.0 / 16.0, 0.5, 0.25).domain(), std::nullopt, "tau-only");
  add("t_perturbed", ThreeConnectedCircular(3.0 / 16.0, 0.5, 0.26).domain(), std::nullopt, "rigid");
  add("t_six", ThreeConnectedCircular(mu6, std::sqrt(mu6 + r6 * r6), r6).domain(), std::nullopt, "six-element");
  return fx;
}

struct CheckRow {
  std::string fixture;
  std::string check;
  bool pass;
  std::string detail;
};

inline std::vector<CheckRow> verify_fixture(const Fixture& f, const RunConfig& cfg) {
  std::vector<CheckRow> rows;
  auto check = [&](const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
    try {
      auto [pass, detail] = body();
      rows.push_back({f.name, name, pass, detail});
    } catch (const Error& e) {
      rows.push_back({f.name, name, false, e.what()});
    }
  };
  const auto d = f.spec.curves_with(cfg.nodes);
  const auto [a1, a2] = f.spec.marking(d);
  const double tol = cfg.tol.value_or(1e-5);

  check("green-identity", [&] {
    const auto pm = period_matrix(d, 0);
    const bool pass = pm.green_residual <= 1e-9 && pm.condition < 1e6;
    return std::pair{pass, "residual " + format_number(pm.green_residual) + ", cond " + format_number(pm.condition)};
  });
  std::shared_ptr<const CanonicalMap> k;
  check("canonical-map", [&] {
    k = canonical_map(d, a1, a2);
    const auto& dg = k->diagnostics();
    bool pass = dg.max_modulus_stdev <= 1e-8 && dg.period_leak <= 1e-8;
    std::string detail = "modulus stdev " + format_number(dg.max_modulus_stdev);
    if (f.expect_r2) {
      pass = pass && std::abs(k->moduli().r2 - *f.expect_r2) <= 1e-8;
      detail += ", r2 " + format_number(k->moduli().r2);
    }
    return std::pair{pass, detail};
  });
  if (k) {
    check("inverse-roundtrip", [&] {
      // random points, so that none coincides with the inversion seed table
      std::mt19937_64 rng(cfg.seed);
      const auto grid = interior_grid(d, 24, 4.0);
      std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
      std::uniform_real_distribution<double> jitter(-0.01, 0.01);
      double worst = 0.0;
      for (int i = 0; i < 40; ++i) {
        const Complex z = grid[pick(rng)] + Complex(jitter(rng), jitter(rng));
        if (classify(d, z) != Location::inside) continue;
        worst = std::max(worst, std::abs(k->invert(k->eval_unchecked(z)) - z));
      }
      return std::pair{worst < 1e-8, "max |K^-1(K z) - z| " + format_number(worst)};
    });
    check("mobius-invariance", [&] {
      if (!f.spec.is_circular()) return std::pair{true, std::string("skipped for curve specs")};
      std::mt19937_64 rng(cfg.seed);
      std::uniform_real_distribution<double> u(-0.3, 0.3), th(0.0, two_pi);
      const auto m = disk_automorphism(Complex(u(rng), u(rng)), th(rng));
      const auto pushed = circular_to_curves(pushforward(*f.spec.circular, m), cfg.nodes);
      const CanonicalMap km(pushed, m.eval(a1), m.eval(a2));
      const auto& s = k->moduli();
      const auto& t = km.moduli();
      double worst = std::abs(s.r2 - t.r2) / s.r2;
      for (std::size_t j = 0; j < s.slits.size(); ++j) {
        worst = std::max(worst, std::abs(s.slits[j].radius - t.slits[j].radius) / s.slits[j].radius);
        const double w0 = s.slits[j].beta - s.slits[j].alpha, w1 = t.slits[j].beta - t.slits[j].alpha;
        worst = std::max(worst, std::abs(w0 - w1) / w0);
      }
      return std::pair{worst <= tol, "relative moduli mismatch " + format_number(worst)};
    });
  }
  if (f.spec.is_circular() && f.spec.circular->connectivity() >= 3) {
    check("automorphism-group", [&] {
      const auto g = enumerate_automorphisms(*f.spec.circular);
      bool pass = g.is_closed();
      if (f.expect_tag) pass = pass && g.tag == *f.expect_tag;
      return std::pair{pass, g.tag + ", order " + std::to_string(g.order())};
    });
  }
  return rows;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(cfg);
    std::vector<Fixture> fixtures;
    if (cfg.inputs.empty()) {
      fixtures = builtin_fixtures();
    } else {
      for (const auto& p : cfg.inputs)
        fixtures.push_back(fixture_from_json(std::filesystem::path(p).stem().string(), io::read_json_file(p)));
    }
    bool all = true;
    for (const auto& f : fixtures)
      for (const auto& row : verify_fixture(f, cfg)) {
        all = all && row.pass;
        out << (row.pass ? "PASS  " : "FAIL  ") << row.fixture << "  " << row.check << "  " << row.detail << "\n";
      }
    return static_cast<int>(all ? ok : invariant_failure);
  });
}

inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  if (cfg.subcommand == "map") return run_map(cfg, out, err);
  if (cfg.subcommand == "aut") return run_aut(cfg, out, err);
  if (cfg.subcommand == "sweep") return run_sweep(cfg, out, err);
  if (cfg.subcommand == "counterexample") return run_counterexample(cfg, out, err);
  if (cfg.subcommand == "verify") return run_verify(cfg, out, err);
  err << "error: unknown-subcommand: " << cfg.subcommand << "\n";
  return bad_input;
}

}  // namespace slitmap::cli
