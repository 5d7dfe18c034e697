#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "minmax/certificate_io.hpp"
#include "minmax/problems/instance_io.hpp"
#include "minmax/verify.hpp"

namespace minmax::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kNotConverged = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

// ---- generate -------------------------------------------------------------

struct GenerateOptions {
  std::string family;  // qvm, trr, pc
  QvmParams qvm;
  // trr: either a LIBSVM file or synthetic sizes
  std::string libsvm;
  Index samples = 100;
  Index features = 20;
  double trr_density = 0.3;
  double alpha = 10.0;
  // pc
  Index N = 5;
  Index K = 5;
  std::uint64_t seed = 1;
  Index constraint_rows = 0;  // > 0 attaches a random feasible A x = b
  std::string out_path;
};

/// Builds the instance described by `options` (throws UsageError on bad
/// parameters).
InstanceData build_instance(const GenerateOptions& options);
/// build_instance plus save_instance_with_manifest.
InstanceData cmd_generate(const GenerateOptions& options);

// ---- solve ----------------------------------------------------------------

struct SolveOptions {
  std::string method = "raipp_s";  // aipp_s, raipp_s, qp_aipp_s
  double rho_x = 1e-2;
  double rho_y = 1e-1;
  std::optional<double> eta;
  std::optional<double> delta;
  double time_limit = 4000.0;
  bool relative = true;
  std::string qp_inner = "aipp";  // inner method of qp_aipp_s
  double hat_c = 0.0;
};

struct SolveRow {
  std::string family;
  std::string dims;
  std::string method;
  std::int64_t iterations = 0;  // ACG iterations, the unit of the tables
  std::int64_t acg_iterations = 0;
  std::int64_t outer_iterations = 0;
  std::int64_t oracle_calls = 0;
  double runtime_s = 0.0;
  double time_limit = 0.0;
  double p_hat_xi = 0.0;
  double norm_u_rel = 0.0;
  double norm_v = 0.0;
  std::string termination;  // Converged / TimeLimit / IterLimit / Error
  std::string error;
  std::optional<double> penalty_c;
  std::optional<double> delta;
  std::optional<double> tau;
  std::optional<double> dd_lower_bound;
  std::optional<double> distance_bound;
  std::optional<CertificateRecord> record;

  bool converged() const { return termination == "Converged"; }
  bool timed_out() const { return termination == "TimeLimit"; }
  /// "12.34", or "<limit>*" for runs stopped by the time limit.
  std::string runtime_text() const;
};

/// Runs one solver on an in-memory instance. Solver failures are captured
/// in the row (termination "Error"); argument problems throw UsageError.
SolveRow solve_instance(const InstanceData& data, const SolveOptions& options);

std::string csv_header();
std::string csv_line(const SolveRow& row);
/// RFC 4180 field quoting.
std::string csv_quote(const std::string& field);

/// Loads the instance, solves, appends the row to out_csv (writing the
/// header first for a new file) and saves the certificate if cert_path is
/// non-empty. Returns the row.
SolveRow cmd_solve(const std::string& instance_path, const SolveOptions& options,
                   const std::string& out_csv, const std::string& cert_path);

// ---- verify ---------------------------------------------------------------

VerifyReport cmd_verify(const std::string& instance_path, const std::string& certificate_path);

// ---- bench ----------------------------------------------------------------

struct BenchCell {
  std::string family;
  std::string row_label;
  std::string method;
  bool implemented = true;
  SolveRow row;
  std::string instance_path;
  std::string certificate_path;
};

struct BenchResult {
  std::vector<BenchCell> cells;
  std::vector<std::string> files;  // tables and log written
};

/// Runs every (family row, method) cell of an INI config and writes
/// <family>.md, <family>.csv and runs.jsonl into out_dir. The scheduler
/// thread count comes from [bench] threads, overridden by the environment
/// variable MINMAX_BENCH_THREADS.
BenchResult cmd_bench(const std::string& config_path, const std::string& out_dir);

/// Markdown table for one family with the per-row best iteration count and
/// runtime in bold.
std::string bench_markdown(const std::vector<BenchCell>& cells, const std::string& family,
                           const std::vector<std::string>& methods);

// ---- entry point ----------------------------------------------------------

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace minmax::cli
