#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slitmap/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Canonical slit maps and automorphisms of multiply connected planar domains"};
  app.require_subcommand(1);
  slitmap::cli::RunConfig cfg;
  std::string grid;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.inputs, "domain or family spec (JSON)");
    sub->add_option("--nodes", cfg.nodes, "boundary nodes per component (even, >= 16)");
    sub->add_option("--grid", grid, "lambda grid START:END:COUNT");
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--tol", cfg.tol, "tolerance override");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
  };
  for (const char* name : {"map", "aut", "sweep", "counterexample", "verify"}) add_common(app.add_subcommand(name));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: invalid-arguments: " << e.what() << "\n";
    return slitmap::cli::bad_input;
  }
  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (!grid.empty()) {
    const int rc = slitmap::cli::guarded(std::cerr, [&] {
      cfg.grid = slitmap::cli::parse_grid(grid);
      return 0;
    });
    if (rc != 0) return rc;
  }
  return slitmap::cli::run(cfg);
}
