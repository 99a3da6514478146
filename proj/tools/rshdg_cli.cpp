// Command-line driver for the experiment runners.
//
// rshdg --experiment conv --k 1 --levels 4 --out conv.csv
// rshdg --experiment tau-sweep --k 0 --out sweep.csv
// rshdg --experiment cr-equiv
// rshdg --experiment infsup --k 0 --levels 3
//
// Each run prints its CSV to stdout and, with --out, also writes it to disk
// (convergence and sweep runs additionally emit a gnuplot script next to the
// CSV).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rshdg/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stokes solver experiments: reduced-stabilization hybridized DG"};

  rshdg::RunConfig cfg;
  app.add_option("--experiment", cfg.experiment, "conv, tau-sweep, cr-equiv or infsup")
      ->required()
      ->check(CLI::IsMember({"conv", "tau-sweep", "cr-equiv", "infsup"}));
  app.add_option("--k", cfg.k, "facet polynomial degree")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  app.add_option("--tau", cfg.tau, "stabilization parameter (default 10 (k+1)^2)");
  app.add_option("--levels", cfg.levels, "number of refinement levels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  CLI::Option* base_n_opt =
      app.add_option("--base-n", cfg.base_n, "coarsest structured mesh subdivision")
          ->check(CLI::PositiveNumber)
          ->capture_default_str();
  app.add_option("--quad-boost", cfg.quad_boost, "extra quadrature exactness for data")
      ->check(CLI::Range(0, 12))
      ->capture_default_str();
  app.add_option("--mesh", cfg.mesh_file, "mesh file overriding the structured family")
      ->check(CLI::ExistingFile);
  app.add_option("--out", cfg.out, "CSV output path");

  CLI11_PARSE(app, argc, argv);
  cfg.base_n_set = base_n_opt->count() > 0;

  try {
    if (cfg.experiment == "conv") {
      std::cout << rshdg::run_convergence(cfg).csv;
    } else if (cfg.experiment == "tau-sweep") {
      std::cout << rshdg::run_tau_sweep(cfg).csv;
    } else if (cfg.experiment == "cr-equiv") {
      std::cout << rshdg::run_cr_equiv(cfg).csv;
    } else {
      const rshdg::InfsupResult result = rshdg::run_infsup(cfg);
      std::cout << result.csv;
      if (result.truncated)
        std::cerr << "note: refinement stopped by the dense dimension guard\n";
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
