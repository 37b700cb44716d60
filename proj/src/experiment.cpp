#include "aprfm/experiment.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include "aprfm/assemble.hpp"
#include "aprfm/collocation.hpp"
#include "aprfm/error.hpp"
#include "aprfm/quadrature.hpp"

namespace aprfm::experiment {

using basis::Activation;
using basis::PouKind;
using problems::ProblemId;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Distinct stream for the g model so that rho and g never share weights.
constexpr std::uint64_t kGSeedSalt = 0x9E3779B97F4A7C15ULL;

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io_failure, "cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) fail(ErrorKind::io_failure, "failed writing " + path);
}

}  // namespace

Method parse_method(std::string_view text) {
  if (text == "rfm") return Method::rfm;
  if (text == "aprfm") return Method::aprfm;
  fail(ErrorKind::invalid_argument, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Method m) noexcept { return m == Method::rfm ? "rfm" : "aprfm"; }

Activation parse_activation(std::string_view text) {
  if (text == "tanh") return Activation::tanh;
  if (text == "sine-pi" || text == "sin") return Activation::sine_pi;
  fail(ErrorKind::invalid_argument, "unknown activation '" + std::string(text) + "'");
}

std::string_view to_string(Activation a) noexcept { return a == Activation::tanh ? "tanh" : "sine-pi"; }

PouKind parse_pou(std::string_view text) {
  if (text == "phi_a" || text == "a") return PouKind::phi_a;
  if (text == "phi_b" || text == "b") return PouKind::phi_b;
  fail(ErrorKind::invalid_argument, "unknown PoU kind '" + std::string(text) + "'");
}

std::string_view to_string(PouKind p) noexcept { return p == PouKind::phi_a ? "phi_a" : "phi_b"; }

int RunConfig::spatial_dim() const noexcept {
  return problem == ProblemId::ex4 || problem == ProblemId::ex5 || problem == ProblemId::ex6 ? 2 : 1;
}

void RunConfig::validate() const {
  const auto positive = [](int value, const char* name) {
    if (value < 1) fail(ErrorKind::invalid_argument, std::string(name) + " must be positive");
  };
  positive(j, "j");
  positive(j_rho, "jrho");
  positive(j_g, "jg");
  positive(mx, "mx");
  positive(mx1, "mx1");
  positive(mx2, "mx2");
  positive(mv, "mv");
  positive(nx, "nx");
  positive(nx1, "nx1");
  positive(nx2, "nx2");
  positive(nv, "nv");
  positive(seeds, "seeds");
  if (nq < 2 || nq > 128) fail(ErrorKind::invalid_argument, "nq must lie in [2, 128]");
  if (!(b_range > 0.0) || !std::isfinite(b_range)) fail(ErrorKind::invalid_argument, "b-range must be positive");
  if (!(rank_tol > 0.0 && rank_tol < 1.0)) fail(ErrorKind::invalid_argument, "rank-tol must lie in (0, 1)");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) fail(ErrorKind::invalid_argument, "epsilon must be finite and >= 0");
}

RunConfig defaults_for(ProblemId problem, Method method) {
  RunConfig c;
  c.problem = problem;
  c.method = method;
  switch (problem) {
    case ProblemId::ex1:
      if (method == Method::rfm) {
        c.nx = 64;
        c.nv = 128;
      }
      break;
    case ProblemId::ex2:
    case ProblemId::ex3:
      c.j_rho = 64;
      c.j_g = 128;
      c.mx = 2;
      c.mv = 4;
      break;
    case ProblemId::ex4:
      c.nv = 64;
      break;
    case ProblemId::ex5:
      c.j_rho = 64;
      c.j_g = 128;
      c.mv = 4;
      c.nv = 32;
      break;
    case ProblemId::ex6:
      c.j_rho = 64;
      c.j_g = 128;
      c.mv = 4;
      c.nv = 64;
      break;
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["problem"] = std::string(problems::to_string(c.problem));
  j["method"] = std::string(to_string(c.method));
  if (c.problem == ProblemId::ex3) {
    j["epsilon"] = "profile";
  } else {
    j["epsilon"] = c.epsilon;
  }
  if (c.method == Method::rfm) {
    j["j"] = c.j;
  } else {
    j["jrho"] = c.j_rho;
    j["jg"] = c.j_g;
  }
  if (c.spatial_dim() == 1) {
    j["mx"] = c.mx;
    j["nx"] = c.nx;
  } else {
    j["mx1"] = c.mx1;
    j["mx2"] = c.mx2;
    j["nx1"] = c.nx1;
    j["nx2"] = c.nx2;
  }
  j["mv"] = c.mv;
  j["nv"] = c.nv;
  j["nq"] = c.nq;
  j["b_range"] = c.b_range;
  j["seed"] = c.seed;
  j["activation"] = std::string(to_string(c.activation));
  j["pou"] = std::string(to_string(c.pou));
  j["rank_tol"] = c.rank_tol;
  j["seeds"] = c.seeds;
  j["out"] = c.out;
  return j;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json j;
  j["config"] = experiment::to_json(config);
  j["error"] = error;
  j["error_kind"] = error_kind;
  j["f_error"] = f_error;
  if (rho_error) j["rho_error"] = *rho_error;
  j["reference"] = reference_kind;
  if (reference_kind == "fdm") j["fdm_iterations"] = fdm_iterations;
  j["residual_norm"] = residual_norm;
  j["condition_estimate"] = condition_estimate;
  j["rank"] = rank;
  j["Z"] = z;
  j["N"] = n;
  j["N_int"] = n_interior;
  j["N_bdy"] = n_boundary;
  j["lambda"] = {{"min", lambda_min}, {"max", lambda_max}, {"mean", lambda_mean}};
  j["timings"] = {{"assembly", time_assembly},
                  {"solve", time_solve},
                  {"evaluation", time_evaluation},
                  {"reference", time_reference},
                  {"total", time_total}};
  return j;
}

Reference make_reference(const problems::ProblemSpec& spec, int nq) {
  const auto grid = collocation::evaluation_grid(spec);
  const auto rule = quadrature::angular_rule(spec.spatial_dim, nq);
  Reference ref;
  if (spec.has_exact()) {
    ref.kind = "exact";
    ref.f = reference::exact_field(spec, grid);
    ref.rho = reference::exact_density(spec, grid, rule);
    return ref;
  }
  reference::FdmOptions options;
  options.ordinates = nq;
  auto fdm = reference::fdm_reference(spec, options);
  ref.kind = "fdm";
  ref.f = std::move(fdm.f);
  ref.rho = std::move(fdm.rho);
  ref.fdm_iterations = fdm.iterations;
  ref.fdm_last_change = fdm.last_change;
  return ref;
}

RunOutput run(const RunConfig& config, const Reference* cached, std::ostream* log) {
  config.validate();
  const auto start = Clock::now();
  const auto stage = [&](const char* name, double t) {
    if (log) *log << "[aprfm] " << name << " " << t << " s\n";
  };

  const problems::ProblemSpec spec = problems::catalog(config.problem, config.epsilon);
  const int dim = spec.spatial_dim;
  const auto rule = quadrature::angular_rule(dim, config.nq);
  const auto slo = spec.spatial_lo();
  const auto shi = spec.spatial_hi();

  std::vector<double> x_lo(slo.begin(), slo.begin() + dim);
  std::vector<double> x_hi(shi.begin(), shi.begin() + dim);
  std::vector<int> x_counts = dim == 1 ? std::vector<int>{config.mx} : std::vector<int>{config.mx1, config.mx2};
  std::vector<double> p_lo = x_lo;
  std::vector<double> p_hi = x_hi;
  std::vector<int> p_counts = x_counts;
  p_lo.push_back(spec.velocity_lo());
  p_hi.push_back(spec.velocity_hi());
  p_counts.push_back(config.mv);

  const collocation::SpatialCounts n_spatial =
      dim == 1 ? collocation::SpatialCounts{config.nx, 1} : collocation::SpatialCounts{config.nx1, config.nx2};

  RunOutput output;
  RunReport& report = output.report;
  report.config = config;

  auto t = Clock::now();
  const auto colloc = collocation::make_collocation(spec, n_spatial, config.nv);
  auto p_partition = basis::BoxPartition::uniform(p_lo, p_hi, p_counts);
  std::optional<basis::FeatureModel> rho_model;
  std::optional<basis::FeatureModel> phase_model;
  if (config.method == Method::rfm) {
    auto w = basis::FeatureWeights::generate(config.seed, p_partition.size(), static_cast<std::size_t>(config.j),
                                             static_cast<std::size_t>(dim + 1), config.b_range);
    phase_model.emplace(std::move(p_partition), std::move(w), config.activation, config.pou);
  } else {
    auto x_partition = basis::BoxPartition::uniform(x_lo, x_hi, x_counts);
    auto wr = basis::FeatureWeights::generate(config.seed, x_partition.size(), static_cast<std::size_t>(config.j_rho),
                                              static_cast<std::size_t>(dim), config.b_range);
    auto wg = basis::FeatureWeights::generate(config.seed ^ kGSeedSalt, p_partition.size(),
                                              static_cast<std::size_t>(config.j_g), static_cast<std::size_t>(dim + 1),
                                              config.b_range);
    rho_model.emplace(std::move(x_partition), std::move(wr), config.activation, config.pou);
    phase_model.emplace(std::move(p_partition), std::move(wg), config.activation, config.pou);
  }

  solve::SolveReport solved;
  {
    assemble::LinearSystem sys = config.method == Method::rfm
                                     ? assemble::assemble_rfm(spec, *phase_model, colloc, rule)
                                     : assemble::assemble_aprfm(spec, *rho_model, *phase_model, colloc, rule);
    sys = assemble::rescale_rows(std::move(sys));
    report.time_assembly = seconds_since(t);
    stage("assemble", report.time_assembly);
    report.z = static_cast<std::size_t>(sys.cols());
    report.n = static_cast<std::size_t>(sys.rows());
    report.n_interior = sys.n_interior;
    report.n_boundary = sys.n_boundary;
    report.lambda_min = sys.lambda.minCoeff();
    report.lambda_max = sys.lambda.maxCoeff();
    report.lambda_mean = sys.lambda.mean();

    t = Clock::now();
    solve::SolveOptions options;
    options.rank_tol = config.rank_tol;
    solved = solve::lstsq(sys, options);
    report.time_solve = seconds_since(t);
    stage("solve", report.time_solve);
  }
  report.residual_norm = solved.residual_norm;
  report.condition_estimate = solved.condition_estimate;
  report.rank = static_cast<long>(solved.rank);

  t = Clock::now();
  reference::Approximation approx;
  approx.spec = &spec;
  approx.rho_model = rho_model ? &*rho_model : nullptr;
  approx.phase_model = &*phase_model;
  approx.coeffs = std::move(solved.coeffs);
  const auto grid = collocation::evaluation_grid(spec);
  output.f_approx = reference::evaluate_f(approx, grid);
  output.rho_approx = reference::evaluate_density(approx, grid, rule);
  report.time_evaluation = seconds_since(t);
  stage("evaluate", report.time_evaluation);

  t = Clock::now();
  Reference built;
  if (cached == nullptr) {
    built = make_reference(spec, config.nq);
    cached = &built;
  }
  report.time_reference = seconds_since(t);
  stage("reference", report.time_reference);
  output.f_ref = cached->f;
  output.rho_ref = cached->rho;
  report.reference_kind = cached->kind;
  report.fdm_iterations = cached->fdm_iterations;

  report.f_error = reference::relative_l2(output.f_approx, output.f_ref);
  report.rho_error = reference::relative_l2(output.rho_approx, output.rho_ref);
  if (dim == 1) {
    report.error = report.f_error;
    report.error_kind = "f";
  } else {
    report.error = *report.rho_error;
    report.error_kind = "rho";
  }
  report.time_total = seconds_since(start);
  stage("total", report.time_total);
  return output;
}

std::string csv_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", value);
  return buf;
}

namespace {

void write_f_csv(std::ostream& out, const reference::GridField& approx, const reference::GridField& ref) {
  const auto& grid = approx.grid;
  out << (grid.spatial_dim == 1 ? "x,v,f_approx,f_ref\n" : "x1,x2,alpha,f_approx,f_ref\n");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto p = grid.point(i);
    out << csv_number(p.x[0]) << ',';
    if (grid.spatial_dim == 2) out << csv_number(p.x[1]) << ',';
    out << csv_number(p.v) << ',' << csv_number(approx.values[i]) << ',' << csv_number(ref.values[i]) << '\n';
  }
}

void write_rho_csv(std::ostream& out, const reference::GridField& approx, const reference::GridField& ref) {
  const auto& grid = approx.grid;
  out << (grid.spatial_dim == 1 ? "x,rho_approx,rho_ref\n" : "x1,x2,rho_approx,rho_ref\n");
  for (std::size_t i = 0; i < grid.spatial.size(); ++i) {
    out << csv_number(grid.spatial[i][0]) << ',';
    if (grid.spatial_dim == 2) out << csv_number(grid.spatial[i][1]) << ',';
    out << csv_number(approx.values[i]) << ',' << csv_number(ref.values[i]) << '\n';
  }
}

void write_json(const nlohmann::json& j, const std::string& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

}  // namespace

void write_run(const RunOutput& output, const std::string& out) {
  write_json(output.report.to_json(), out + ".json");
  const std::string csv = out + ".csv";
  auto file = open_output(csv);
  write_f_csv(file, output.f_approx, output.f_ref);
  finish(file, csv);
}

Table parse_table(std::string_view text) {
  static constexpr std::array<std::string_view, 6> names{"T1", "T2", "T3", "T4", "T5", "T6"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k] == text) return static_cast<Table>(k);
  }
  fail(ErrorKind::invalid_argument, "unknown table '" + std::string(text) + "'");
}

std::string_view to_string(Table t) noexcept {
  static constexpr std::array<std::string_view, 6> names{"T1", "T2", "T3", "T4", "T5", "T6"};
  return names[static_cast<std::size_t>(t)];
}

std::vector<SweepCell> table_cells(Table table) {
  const std::vector<double> eps_small{1e-2, 1e-4, 1e-8, 1e-16};
  const std::vector<std::array<int, 2>> sizes{{16, 32}, {32, 64}, {64, 128}, {128, 256}};
  std::vector<SweepCell> cells;
  const auto add = [&](double eps, std::string param, RunConfig c) {
    c.epsilon = eps;
    cells.push_back({eps, std::move(param), std::move(c)});
  };
  switch (table) {
    case Table::T1:
      for (double eps : eps_small) {
        for (int j : {16, 32, 64, 128, 256}) {
          RunConfig c = defaults_for(ProblemId::ex1, Method::rfm);
          c.j = j;
          add(eps, "J=" + std::to_string(j), c);
        }
      }
      break;
    case Table::T2:
    case Table::T5:
      for (double eps : eps_small) {
        for (const auto& [nx, nv] : sizes) {
          RunConfig c = defaults_for(ProblemId::ex1, table == Table::T2 ? Method::rfm : Method::aprfm);
          c.j = 128;
          c.j_rho = c.j_g = 128;
          c.nx = nx;
          c.nv = nv;
          add(eps, "(Nx,Nv)=(" + std::to_string(nx) + "," + std::to_string(nv) + ")", c);
        }
      }
      break;
    case Table::T3:
      for (double eps : eps_small) {
        for (const auto& [mx, mv] : std::vector<std::array<int, 2>>{{1, 1}, {2, 1}, {1, 2}, {4, 1}, {1, 4}}) {
          RunConfig c = defaults_for(ProblemId::ex1, Method::rfm);
          c.j = 128;
          c.mx = mx;
          c.mv = mv;
          add(eps, "(Mx,Mv)=(" + std::to_string(mx) + "," + std::to_string(mv) + ")", c);
        }
      }
      break;
    case Table::T4:
      for (double eps : eps_small) {
        for (int j : {8, 16, 32, 64, 128}) {
          RunConfig c = defaults_for(ProblemId::ex1, Method::aprfm);
          c.j_rho = c.j_g = j;
          add(eps, "J=" + std::to_string(j), c);
        }
      }
      break;
    case Table::T6:
      for (double eps : {1.0, 1e-1}) {
        for (int mv : {1, 2, 4, 8}) {
          RunConfig c = defaults_for(ProblemId::ex5, Method::aprfm);
          c.mv = mv;
          add(eps, "(Mx1,Mx2,Mv)=(1,1," + std::to_string(mv) + ")", c);
        }
      }
      break;
  }
  return cells;
}

std::vector<SweepRow> sweep(Table table, const RunConfig& base, std::ostream* log) {
  base.validate();
  std::map<double, Reference> references;
  std::vector<SweepRow> rows;
  for (SweepCell& cell : table_cells(table)) {
    RunConfig c = cell.config;
    c.nq = base.nq;
    c.b_range = base.b_range;
    c.activation = base.activation;
    c.pou = base.pou;
    c.rank_tol = base.rank_tol;
    SweepRow row;
    row.table = std::string(to_string(table));
    row.epsilon = cell.epsilon;
    row.param = cell.param;
    const auto spec = problems::catalog(c.problem, c.epsilon);
    auto it = references.find(c.epsilon);
    if (it == references.end()) it = references.emplace(c.epsilon, make_reference(spec, c.nq)).first;
    double sum = 0.0;
    for (int s = 0; s < base.seeds; ++s) {
      c.seed = base.seed + static_cast<std::uint64_t>(s);
      const RunOutput o = run(c, &it->second);
      row.z = o.report.z;
      row.n = o.report.n;
      row.errors.push_back(o.report.error);
      sum += o.report.error;
      if (log) {
        *log << "[aprfm] " << row.table << " eps=" << csv_number(row.epsilon) << " " << row.param << " seed=" << c.seed
             << " error=" << csv_number(o.report.error) << "\n";
      }
    }
    row.mean_error = sum / base.seeds;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, Table table, const RunConfig& base, const std::string& out) {
  const std::string csv = out + ".csv";
  auto file = open_output(csv);
  file << "table,epsilon,param,Z,N,mean_error";
  for (int s = 0; s < base.seeds; ++s) file << ",error_seed" << base.seed + static_cast<std::uint64_t>(s);
  file << '\n';
  nlohmann::json j;
  j["table"] = std::string(to_string(table));
  j["base_config"] = to_json(base);
  j["rows"] = nlohmann::json::array();
  for (const SweepRow& r : rows) {
    file << r.table << ',' << csv_number(r.epsilon) << ",\"" << r.param << "\"," << r.z << ',' << r.n << ','
         << csv_number(r.mean_error);
    for (double e : r.errors) file << ',' << csv_number(e);
    file << '\n';
    j["rows"].push_back({{"epsilon", r.epsilon},
                         {"param", r.param},
                         {"Z", r.z},
                         {"N", r.n},
                         {"mean_error", r.mean_error},
                         {"errors", r.errors}});
  }
  finish(file, csv);
  write_json(j, out + ".json");
}

PlotKind parse_plot_kind(std::string_view text) {
  if (text == "heatmap-f") return PlotKind::heatmap_f;
  if (text == "heatmap-rho") return PlotKind::heatmap_rho;
  if (text == "error-vs-dof") return PlotKind::error_vs_dof;
  fail(ErrorKind::invalid_argument, "unknown plot kind '" + std::string(text) + "'");
}

std::string_view to_string(PlotKind k) noexcept {
  switch (k) {
    case PlotKind::heatmap_f: return "heatmap-f";
    case PlotKind::heatmap_rho: return "heatmap-rho";
    case PlotKind::error_vs_dof: return "error-vs-dof";
  }
  return "?";
}

void emit_plot_data(const RunConfig& config, PlotKind kind, const std::string& out, std::ostream* log) {
  const std::string csv = out + ".csv";
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  if (kind == PlotKind::error_vs_dof) {
    auto file = open_output(csv);
    file << "n,Z,error\n";
    j["runs"] = nlohmann::json::array();
    const auto spec = problems::catalog(config.problem, config.epsilon);
    const Reference ref = make_reference(spec, config.nq);
    for (int n = 3; n <= 7; ++n) {
      RunConfig c = config;
      c.j = 1 << n;
      c.j_rho = c.j_g = 1 << (n - 1);
      const RunOutput o = run(c, &ref, log);
      file << n << ',' << o.report.z << ',' << csv_number(o.report.error) << '\n';
      j["runs"].push_back(o.report.to_json());
    }
    finish(file, csv);
  } else {
    const RunOutput o = run(config, nullptr, log);
    auto file = open_output(csv);
    if (kind == PlotKind::heatmap_f) {
      write_f_csv(file, o.f_approx, o.f_ref);
    } else {
      write_rho_csv(file, o.rho_approx, o.rho_ref);
    }
    finish(file, csv);
    j["run"] = o.report.to_json();
  }
  write_json(j, out + ".json");
}

}  // namespace aprfm::experiment
