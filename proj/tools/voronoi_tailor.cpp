// Command-line driver: optimize a diagram, check gradients, or sweep a table.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "voronoi_tailor/vtailor.hpp"

int main(int argc, char **argv) {
  using namespace vtailor;
  CLI::App app{"Tailored Voronoi diagrams on polygonal regions"};
  RunConfig cfg;
  std::string color = "none", table;
  int check_points = 0;
  double fd_step = 1e-6;
  TableOptions topt;

  app.add_option("--region", cfg.region, "Preset (letter_a, key, regular_polygon, convex_hexagon) or region file")
      ->capture_default_str();
  app.add_option("--kappa", cfg.kappa, "Number of sites")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--scale", cfg.scale, "Scaling factor, auto, or table1")->capture_default_str();
  app.add_option("--objective", cfg.objective, "Weighted merit terms, e.g. j0:10@delta=0.1,j1:1")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Root seed for initial guesses")->capture_default_str();
  app.add_option("--trials", cfg.trials, "Maximum number of initial guesses")
      ->check(CLI::Range(1, 1000))
      ->capture_default_str();
  app.add_option("--max-iter", cfg.spg.max_iter, "Iteration limit per trial")->capture_default_str();
  app.add_option("--tol-f", cfg.spg.tol_f, "Stop when f <= tol-f")->capture_default_str();
  app.add_option("--tol-g", cfg.spg.tol_g, "Stop when the sup-norm of the gradient <= tol-g")->capture_default_str();
  app.add_option("--svg", cfg.svg, "Write the final diagram as SVG");
  app.add_option("--csv", cfg.csv, "Write the run statistics as CSV");
  app.add_option("--dump", cfg.dump, "Write a text dump of the final diagram");
  app.add_option("--color", color, "SVG coloring: none, j2_balance, j3_balance, j4_segments")->capture_default_str();
  app.add_option("--check-grad", check_points, "Compare gradients with finite differences at N random points");
  app.add_option("--fd-step", fd_step, "Relative finite-difference step for --check-grad")->capture_default_str();
  app.add_option("--table", table, "Reproduce a table: table1, table1b, table2, table3");
  app.add_option("--max-kappa", topt.max_kappa, "Largest kappa swept by table1b")->capture_default_str();
  app.add_option("--sweep-kappa", topt.sweep_kappa, "Kappa used by table2 and table3")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    cfg.color = parse_coloring(color);
    if (!table.empty()) {
      topt.seed = cfg.seed;
      topt.trials = cfg.trials;
      topt.spg = cfg.spg;
      const int ok = reproduce_table(table, topt, std::cout);
      return ok == static_cast<int>(table_configs(table, topt).size()) ? 0 : 1;
    }
    if (check_points > 0) {
      const GradCheckReport rep = check_grad(cfg, check_points, fd_step);
      std::cout << "point,term,value,max_rel_error\n";
      for (const auto &r : rep.rows) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%s,%.6E,%.3E", r.point, r.term.c_str(), r.value, r.error);
        std::cout << buf << "\n";
      }
      std::cout << "resampled " << rep.resamples << " irregular configurations\n";
      std::cout << (rep.ok() ? "gradient check passed" : "gradient check FAILED") << "\n";
      return rep.ok() ? 0 : 1;
    }
    return run(cfg, std::cout);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
