#pragma once

// End-to-end runs: problem -> models -> collocation -> assembly -> rescale ->
// least squares -> evaluation -> error, plus the table sweeps and plot data
// behind the CLI.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aprfm/basis.hpp"
#include "aprfm/problems.hpp"
#include "aprfm/reference.hpp"
#include "aprfm/solve.hpp"

namespace aprfm::experiment {

enum class Method { rfm, aprfm };

Method parse_method(std::string_view text);
std::string_view to_string(Method m) noexcept;
basis::Activation parse_activation(std::string_view text);
std::string_view to_string(basis::Activation a) noexcept;
basis::PouKind parse_pou(std::string_view text);
std::string_view to_string(basis::PouKind p) noexcept;

struct RunConfig {
  problems::ProblemId problem = problems::ProblemId::ex1;
  Method method = Method::aprfm;
  double epsilon = 1.0;  // ignored by ex3, which uses the eps(x) profile
  int j = 128;           // RFM features per box
  int j_rho = 32;
  int j_g = 32;
  int mx = 1, mx1 = 1, mx2 = 1, mv = 1;
  int nx = 128, nx1 = 32, nx2 = 32, nv = 256;
  int nq = 16;
  double b_range = 1.0;
  std::uint64_t seed = 0;
  basis::Activation activation = basis::Activation::tanh;
  basis::PouKind pou = basis::PouKind::phi_b;
  double rank_tol = 1e-12;
  std::string out;
  int seeds = 3;  // sweeps only

  int spatial_dim() const noexcept;
  /// Throws invalid-argument on non-positive counts or bad ranges.
  void validate() const;
};

/// Paper settings for a problem and method; flags override these.
RunConfig defaults_for(problems::ProblemId problem, Method method);

nlohmann::json to_json(const RunConfig& config);

/// Reference data on the evaluation grid: exact or finite-difference.
struct Reference {
  std::string kind;  // "exact" or "fdm"
  reference::GridField f;
  reference::GridField rho;
  long fdm_iterations = 0;
  double fdm_last_change = 0.0;
};

Reference make_reference(const problems::ProblemSpec& spec, int nq);

struct RunReport {
  RunConfig config;
  double error = 0.0;    // headline: f error in 1D, density error in 2D
  double f_error = 0.0;
  std::optional<double> rho_error;
  std::string error_kind;      // "f" or "rho"
  std::string reference_kind;  // "exact" or "fdm"
  long fdm_iterations = 0;
  double residual_norm = 0.0;
  double condition_estimate = 0.0;
  long rank = 0;
  std::size_t z = 0, n = 0, n_interior = 0, n_boundary = 0;
  double lambda_min = 0.0, lambda_max = 0.0, lambda_mean = 0.0;
  double time_assembly = 0.0, time_solve = 0.0, time_evaluation = 0.0, time_reference = 0.0, time_total = 0.0;

  nlohmann::json to_json() const;
};

struct RunOutput {
  RunReport report;
  reference::GridField f_approx;
  reference::GridField f_ref;
  reference::GridField rho_approx;
  reference::GridField rho_ref;
};

/// Full pipeline. `cached` skips rebuilding the reference (it must match
/// the problem, epsilon and nq). `log` receives one timing line per stage.
RunOutput run(const RunConfig& config, const Reference* cached = nullptr, std::ostream* log = nullptr);

/// Writes <out>.json and the phase-space field dump <out>.csv.
void write_run(const RunOutput& output, const std::string& out);

enum class Table { T1, T2, T3, T4, T5, T6 };
Table parse_table(std::string_view text);
std::string_view to_string(Table t) noexcept;

struct SweepRow {
  std::string table;
  double epsilon = 0.0;
  std::string param;
  std::size_t z = 0, n = 0;
  double mean_error = 0.0;
  std::vector<double> errors;  // one per seed
};

/// The cells of a table: base config plus one config per (epsilon, param).
struct SweepCell {
  double epsilon = 0.0;
  std::string param;
  RunConfig config;
};
std::vector<SweepCell> table_cells(Table table);

/// Runs every cell over `seeds` consecutive seeds starting at `base.seed`.
/// Only fields of `base` that a table does not fix (nq, B, activation, pou,
/// rank_tol) are taken from it.
std::vector<SweepRow> sweep(Table table, const RunConfig& base, std::ostream* log = nullptr);
void write_sweep(const std::vector<SweepRow>& rows, Table table, const RunConfig& base, const std::string& out);

enum class PlotKind { heatmap_f, heatmap_rho, error_vs_dof };
PlotKind parse_plot_kind(std::string_view text);
std::string_view to_string(PlotKind k) noexcept;

/// heatmap-*: one run then a tidy CSV. error-vs-dof: J = 2^n (RFM) or
/// J_rho = J_g = 2^(n-1) (APRFM) for n = 3..7, CSV columns (n, Z, error).
void emit_plot_data(const RunConfig& config, PlotKind kind, const std::string& out, std::ostream* log = nullptr);

/// CSV number format: scientific, 6 significant digits.
std::string csv_number(double value);

}  // namespace aprfm::experiment
