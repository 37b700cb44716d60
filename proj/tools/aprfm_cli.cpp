// aprfm: run single experiments, table sweeps and plot data.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aprfm/error.hpp"
#include "aprfm/experiment.hpp"
#include "aprfm/parallel.hpp"

namespace ex = aprfm::experiment;

namespace {

int exit_code(aprfm::ErrorKind kind) {
  switch (kind) {
    case aprfm::ErrorKind::invalid_argument:
    case aprfm::ErrorKind::invalid_kernel:
    case aprfm::ErrorKind::invalid_problem:
    case aprfm::ErrorKind::unsupported_problem:
      return 2;
    default:
      return 3;
  }
}

struct Flags {
  std::string problem = "ex1";
  std::string method = "aprfm";
  std::string epsilon;
  int j = 0, jrho = 0, jg = 0, mx = 0, mv = 0, mx1 = 0, mx2 = 0, nx = 0, nv = 0, nx1 = 0, nx2 = 0, nq = 0, seeds = 0;
  double b_range = 0.0, rank_tol = 0.0;
  std::uint64_t seed = 0;
  std::string activation, pou, out;
};

struct Options {
  CLI::Option *epsilon, *j, *jrho, *jg, *mx, *mv, *mx1, *mx2, *nx, *nv, *nx1, *nx2, *nq, *seeds, *b_range, *rank_tol,
      *seed, *activation, *pou, *out;
};

ex::RunConfig resolve(const Flags& f, const Options& o, const std::string& default_out) {
  const auto problem = aprfm::problems::parse_problem_id(f.problem);
  ex::RunConfig c = ex::defaults_for(problem, ex::parse_method(f.method));
  const auto set = [](CLI::Option* opt, auto& field, auto value) {
    if (opt->count() > 0) field = value;
  };
  if (o.epsilon->count() > 0) {
    if (f.epsilon == "profile") {
      if (problem != aprfm::problems::ProblemId::ex3) {
        aprfm::fail(aprfm::ErrorKind::invalid_argument, "epsilon 'profile' is only valid for ex3");
      }
    } else {
      try {
        std::size_t used = 0;
        c.epsilon = std::stod(f.epsilon, &used);
        if (used != f.epsilon.size()) throw std::invalid_argument(f.epsilon);
      } catch (const std::exception&) {
        aprfm::fail(aprfm::ErrorKind::invalid_argument, "epsilon must be a number or 'profile'");
      }
    }
  }
  set(o.j, c.j, f.j);
  set(o.jrho, c.j_rho, f.jrho);
  set(o.jg, c.j_g, f.jg);
  set(o.mx, c.mx, f.mx);
  set(o.mv, c.mv, f.mv);
  set(o.mx1, c.mx1, f.mx1);
  set(o.mx2, c.mx2, f.mx2);
  set(o.nx, c.nx, f.nx);
  set(o.nv, c.nv, f.nv);
  set(o.nx1, c.nx1, f.nx1);
  set(o.nx2, c.nx2, f.nx2);
  set(o.nq, c.nq, f.nq);
  set(o.seeds, c.seeds, f.seeds);
  set(o.b_range, c.b_range, f.b_range);
  set(o.rank_tol, c.rank_tol, f.rank_tol);
  set(o.seed, c.seed, f.seed);
  if (o.activation->count() > 0) c.activation = ex::parse_activation(f.activation);
  if (o.pou->count() > 0) c.pou = ex::parse_pou(f.pou);
  c.out = o.out->count() > 0 ? f.out : default_out;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random feature solvers for multiscale radiative transfer"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override it");

  Flags f;
  Options o{};
  app.add_option("--problem", f.problem, "ex1 .. ex6")->capture_default_str();
  app.add_option("--method", f.method, "rfm | aprfm")->capture_default_str();
  o.epsilon = app.add_option("--epsilon", f.epsilon, "Knudsen number, or 'profile' for ex3");
  o.j = app.add_option("--j", f.j, "RFM features per box");
  o.jrho = app.add_option("--jrho", f.jrho, "rho features per box");
  o.jg = app.add_option("--jg", f.jg, "g features per box");
  o.mx = app.add_option("--mx", f.mx, "boxes along x (1D)");
  o.mv = app.add_option("--mv", f.mv, "boxes along v");
  o.mx1 = app.add_option("--mx1", f.mx1, "boxes along x1 (2D)");
  o.mx2 = app.add_option("--mx2", f.mx2, "boxes along x2 (2D)");
  o.nx = app.add_option("--nx", f.nx, "collocation nodes along x (1D)");
  o.nv = app.add_option("--nv", f.nv, "collocation velocities");
  o.nx1 = app.add_option("--nx1", f.nx1, "collocation nodes along x1 (2D)");
  o.nx2 = app.add_option("--nx2", f.nx2, "collocation nodes along x2 (2D)");
  o.nq = app.add_option("--nq", f.nq, "velocity quadrature nodes (default 16)");
  o.b_range = app.add_option("--b-range", f.b_range, "weights uniform in [-B, B] (default 1)");
  o.seed = app.add_option("--seed", f.seed, "random seed (default 0)");
  o.activation = app.add_option("--activation", f.activation, "tanh | sine-pi");
  o.pou = app.add_option("--pou", f.pou, "phi_a | phi_b (default phi_b)");
  o.rank_tol = app.add_option("--rank-tol", f.rank_tol, "relative singular value cutoff (default 1e-12)");
  o.out = app.add_option("--out", f.out, "output prefix for <out>.json and <out>.csv");
  o.seeds = app.add_option("--seeds", f.seeds, "seeds per sweep cell (default 3)");

  auto* run_cmd = app.add_subcommand("run", "Solve one configuration and report the error");
  auto* sweep_cmd = app.add_subcommand("sweep", "Reproduce an error table");
  auto* plot_cmd = app.add_subcommand("plotdata", "Emit plot-ready CSV");
  for (auto* sub : {run_cmd, sweep_cmd, plot_cmd}) sub->fallthrough();
  std::string table;
  sweep_cmd->add_option("table", table, "T1 .. T6")->required();
  std::string plot_kind;
  plot_cmd->add_option("kind", plot_kind, "heatmap-f | heatmap-rho | error-vs-dof")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: invalid-argument: " << e.what() << '\n';
    return 2;
  }

  try {
    aprfm::configure_threads_from_env();
    if (run_cmd->parsed()) {
      const ex::RunConfig c = resolve(f, o, "aprfm_run");
      const ex::RunOutput output = ex::run(c, nullptr, &std::cerr);
      ex::write_run(output, c.out);
      std::cout << "error " << ex::csv_number(output.report.error) << " (" << output.report.error_kind << ", vs "
                << output.report.reference_kind << "), Z " << output.report.z << ", N " << output.report.n << '\n';
    } else if (sweep_cmd->parsed()) {
      const auto t = ex::parse_table(table);
      ex::RunConfig c = resolve(f, o, "aprfm_" + std::string(ex::to_string(t)));
      const auto rows = ex::sweep(t, c, &std::cerr);
      ex::write_sweep(rows, t, c, c.out);
      for (const auto& r : rows) {
        std::cout << r.table << " eps " << ex::csv_number(r.epsilon) << ' ' << r.param << " mean "
                  << ex::csv_number(r.mean_error) << '\n';
      }
    } else if (plot_cmd->parsed()) {
      const auto kind = ex::parse_plot_kind(plot_kind);
      const ex::RunConfig c = resolve(f, o, "aprfm_" + std::string(ex::to_string(kind)));
      ex::emit_plot_data(c, kind, c.out, &std::cerr);
    }
  } catch (const aprfm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';  // what() already carries the kind name
    return exit_code(e.kind());
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out-of-memory: system too large for available memory\n";
    return 3;
  }
  return EXIT_SUCCESS;
}
