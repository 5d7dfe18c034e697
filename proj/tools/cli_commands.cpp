#include "cli_commands.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "minmax/aipp_s.hpp"
#include "minmax/qp_aipp.hpp"
#include "minmax/smoothing.hpp"

namespace minmax::cli {

namespace fs = std::filesystem;

// ---- generate -------------------------------------------------------------

InstanceData build_instance(const GenerateOptions& o) {
  InstanceData data;
  if (o.family == "qvm") {
    const QvmParams& p = o.qvm;
    if (p.n < 1 || p.l < 1 || p.k < 1) throw UsageError("qvm: n, l and k must be at least 1");
    if (!(p.density > 0.0) || p.density > 1.0) throw UsageError("qvm: density must lie in (0, 1]");
    if (!(p.m > 0.0) || p.m > p.M) throw UsageError("qvm: need 0 < m <= M");
    data = make_instance(std::make_shared<const QvmInstance>(qvm_generate(p)));
  } else if (o.family == "trr") {
    if (!(o.alpha > 0.0)) throw UsageError("trr: alpha must be positive");
    if (!o.libsvm.empty()) {
      data = make_instance(std::make_shared<const TrrInstance>(trr_load(o.libsvm, o.alpha)));
    } else {
      if (o.samples < 1 || o.features < 1) throw UsageError("trr: samples and features must be positive");
      if (!(o.trr_density > 0.0) || o.trr_density > 1.0) throw UsageError("trr: density must lie in (0, 1]");
      data = make_instance(std::make_shared<const TrrInstance>(
          trr_synthesize(o.samples, o.features, o.trr_density, o.seed, o.alpha)));
    }
    data.seed = o.seed;
  } else if (o.family == "pc") {
    if (o.N < 1 || o.K < 1) throw UsageError("pc: N and K must be at least 1");
    data = make_instance(std::make_shared<const PcInstance>(pc_generate(o.N, o.K, o.seed)));
  } else {
    throw UsageError(fmt::format("unknown family '{}' (expected qvm, trr or pc)", o.family));
  }
  if (o.constraint_rows < 0) throw UsageError("constraint rows must be nonnegative");
  if (o.constraint_rows > 0) attach_random_constraint(data, o.constraint_rows, o.seed);
  return data;
}

InstanceData cmd_generate(const GenerateOptions& o) {
  if (o.out_path.empty()) throw UsageError("generate: an output path is required");
  InstanceData data = build_instance(o);
  save_instance_with_manifest(o.out_path, data);
  return data;
}

// ---- solve ----------------------------------------------------------------

std::string SolveRow::runtime_text() const {
  if (timed_out()) return fmt::format("{:.2f}*", time_limit);
  return fmt::format("{:.2f}", runtime_s);
}

namespace {

std::string dims_text(const InstanceData& d) {
  if (d.family == "qvm") return fmt::format("n={} l={} k={}", d.qvm->n, d.qvm->l, d.qvm->k);
  if (d.family == "trr") return fmt::format("samples={} features={}", d.trr->samples(), d.trr->features());
  return fmt::format("N={} K={}", d.pc->N, d.pc->K);
}

InnerMethod inner_from(const std::string& s) {
  if (s == "aipp") return InnerMethod::Aipp;
  if (s == "raipp") return InnerMethod::Raipp;
  throw UsageError(fmt::format("unknown inner method '{}' (expected aipp or raipp)", s));
}

void fill_from_report(SolveRow& row, const SolveReport& rep) {
  row.iterations = rep.acg_iterations;
  row.acg_iterations = rep.acg_iterations;
  row.outer_iterations = rep.outer_iterations;
  row.oracle_calls = rep.oracle_calls();
  row.runtime_s = rep.wall_time;
  row.termination = to_string(rep.termination);
}

}  // namespace

SolveRow solve_instance(const InstanceData& data, const SolveOptions& o) {
  if (!(o.rho_x > 0.0) || !(o.rho_y > 0.0)) throw UsageError("tolerances must be positive");
  if (o.eta && !(*o.eta > 0.0)) throw UsageError("eta must be positive");
  if (o.delta && !(*o.delta > 0.0)) throw UsageError("delta must be positive");
  if (!(o.time_limit > 0.0)) throw UsageError("time limit must be positive");
  const bool qp = o.method == "qp_aipp_s";
  if (!qp && o.method != "aipp_s" && o.method != "raipp_s") {
    throw UsageError(fmt::format("unknown method '{}' (expected aipp_s, raipp_s or qp_aipp_s)", o.method));
  }
  if (qp && o.delta) throw UsageError("delta mode is not available for qp_aipp_s");
  if (qp && !o.eta) throw UsageError("qp_aipp_s needs a feasibility tolerance eta");
  if (qp && !data.constraint_A) throw UsageError("qp_aipp_s needs an instance with a linear constraint");

  const MinMaxProblem prob = data.problem();
  const Vector x0 = data.initial_x();
  const Vector y0 = data.initial_y();

  SolveRow row;
  row.family = data.family;
  row.dims = dims_text(data);
  row.method = o.method;
  row.time_limit = o.time_limit;

  CertificateRecord rec;
  rec.family = data.family;
  rec.method = o.method;
  rec.n_x = prob.n_x;
  rec.n_y = prob.n_y;
  rec.x0 = x0;
  rec.y0 = y0;

  try {
    if (qp) {
      QpAippSOptions opt;
      opt.qp.inner = inner_from(o.qp_inner);
      opt.qp.hat_c = o.hat_c;
      opt.qp.time_limit = o.time_limit;
      opt.relative = o.relative;
      const LinearConstraint con = *data.constraint();
      const QpPrimalDualResult r = qp_aipp_s_solve(prob, con, o.rho_x, o.rho_y, *o.eta, x0, y0, opt);
      fill_from_report(row, r.report);
      row.norm_u_rel = r.norm_u_rel;
      row.norm_v = r.cert.norm_v;
      row.penalty_c = r.report.penalty_c_final;
      if (!row.penalty_c && !r.rounds.empty()) row.penalty_c = r.rounds.back().c;
      rec.xi = r.xi;
      rec.rho_x = o.rho_x;
      rec.rho_y = o.rho_y;
      rec.relative = o.relative;
      rec.rho_bar = r.rho_bar;
      rec.eta = o.eta;
      rec.penalty_c = row.penalty_c;
      rec.cert = r.cert;
    } else {
      AippSOptions opt;
      opt.inner = o.method == "raipp_s" ? InnerMethod::Raipp : InnerMethod::Aipp;
      opt.relative = o.relative;
      opt.time_limit = o.time_limit;
      if (o.delta) {
        const DirectionalResult d = solve_directional(prob, *o.delta, x0, y0, opt);
        const PrimalDualResult& r = d.primal_dual;
        fill_from_report(row, r.report);
        row.norm_u_rel = r.norm_u_rel;
        row.norm_v = r.cert.norm_v;
        row.delta = o.delta;
        row.tau = d.tau;
        row.dd_lower_bound = d.bounds.dd_lower_bound;
        row.distance_bound = d.bounds.distance_bound;
        rec.xi = r.xi;
        rec.rho_x = d.rho_x;
        rec.rho_y = d.tau;
        rec.relative = false;
        rec.rho_bar = r.rho_bar;
        rec.delta = o.delta;
        rec.tau = d.tau;
        rec.cert = r.cert;
      } else {
        const PrimalDualResult r = solve_primal_dual(prob, o.rho_x, o.rho_y, x0, y0, opt);
        fill_from_report(row, r.report);
        row.norm_u_rel = r.norm_u_rel;
        row.norm_v = r.cert.norm_v;
        rec.xi = r.xi;
        rec.rho_x = o.rho_x;
        rec.rho_y = o.rho_y;
        rec.relative = o.relative;
        rec.rho_bar = r.rho_bar;
        rec.cert = r.cert;
      }
    }
    const SmoothedObjective smoothed(prob, rec.xi, y0);
    row.p_hat_xi = smoothed.value(rec.cert.x_bar) + prob.h_value(rec.cert.x_bar);
    rec.termination = row.termination;
    row.record = rec;
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    row.termination = "Error";
    row.error = e.what();
  }
  return row;
}

std::string csv_quote(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string csv_header() {
  return "family,dims,method,iterations,acg_iterations,outer_iterations,oracle_calls,runtime_s,"
         "p_hat_xi,norm_u_rel,norm_v,termination,penalty_c,delta,tau,dd_lower_bound,"
         "distance_bound,error";
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }
std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string{}; }

}  // namespace

std::string csv_line(const SolveRow& r) {
  const std::vector<std::string> fields = {
      r.family,          r.dims,
      r.method,          std::to_string(r.iterations),
      std::to_string(r.acg_iterations), std::to_string(r.outer_iterations),
      std::to_string(r.oracle_calls),   r.runtime_text(),
      num(r.p_hat_xi),   num(r.norm_u_rel),
      num(r.norm_v),     r.termination,
      opt_num(r.penalty_c), opt_num(r.delta),
      opt_num(r.tau),    opt_num(r.dd_lower_bound),
      opt_num(r.distance_bound), r.error};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_quote(fields[i]);
  }
  return line;
}

SolveRow cmd_solve(const std::string& instance_path, const SolveOptions& options,
                   const std::string& out_csv, const std::string& cert_path) {
  InstanceData data;
  try {
    data = load_instance(instance_path);
  } catch (const ParseError& e) {
    throw UsageError(e.what());
  }
  SolveRow row = solve_instance(data, options);
  if (!out_csv.empty()) {
    const bool fresh = !fs::exists(out_csv) || fs::file_size(out_csv) == 0;
    std::ofstream f(out_csv, std::ios::app);
    if (!f) throw Error(fmt::format("cannot write '{}'", out_csv));
    if (fresh) f << csv_header() << "\r\n";
    f << csv_line(row) << "\r\n";
  }
  if (!cert_path.empty() && row.record) save_certificate(cert_path, *row.record);
  return row;
}

// ---- verify ---------------------------------------------------------------

VerifyReport cmd_verify(const std::string& instance_path, const std::string& certificate_path) {
  const InstanceData data = load_instance(instance_path);
  const CertificateRecord rec = load_certificate(certificate_path);
  if (rec.family != data.family) {
    throw DimensionError(fmt::format("certificate is for family '{}', instance is '{}'", rec.family,
                                     data.family));
  }
  return verify_certificate(data.problem(), data.constraint(), rec);
}

// ---- entry point ----------------------------------------------------------

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nonconvex-concave min-max solvers with stationarity certificates"};
  app.require_subcommand(1);

  GenerateOptions gen;
  double density = std::nan("");
  auto* g = app.add_subcommand("generate", "Generate a qvm, trr or pc instance");
  g->add_option("family", gen.family, "qvm, trr or pc")->required();
  g->add_option("--n", gen.qvm.n, "qvm: x dimension");
  g->add_option("--l", gen.qvm.l, "qvm: rows of each C_i");
  g->add_option("--k", gen.qvm.k, "qvm: number of quadratics");
  g->add_option("--M", gen.qvm.M, "qvm: largest Hessian eigenvalue");
  g->add_option("--m", gen.qvm.m, "qvm: minus the smallest Hessian eigenvalue");
  g->add_option("--density", density, "qvm/trr: fraction of nonzeros");
  g->add_option("--libsvm", gen.libsvm, "trr: LIBSVM data file");
  g->add_option("--samples", gen.samples, "trr: synthetic sample count");
  g->add_option("--features", gen.features, "trr: synthetic feature count");
  g->add_option("--alpha", gen.alpha, "trr: truncation parameter");
  g->add_option("--N", gen.N, "pc: channels");
  g->add_option("--K", gen.K, "pc: users");
  g->add_option("--seed", gen.seed, "random seed");
  g->add_option("--constraint-rows", gen.constraint_rows, "rows of a random feasible A x = b");
  g->add_option("--out", gen.out_path, "output instance file")->required();

  Index syn_samples = 100;
  Index syn_features = 20;
  double syn_density = 0.3;
  std::uint64_t syn_seed = 1;
  std::string syn_out;
  auto* s = app.add_subcommand("synth-libsvm", "Write a synthetic binary classification LIBSVM file");
  s->add_option("--samples", syn_samples);
  s->add_option("--features", syn_features);
  s->add_option("--density", syn_density);
  s->add_option("--seed", syn_seed);
  s->add_option("--out", syn_out)->required();

  SolveOptions sol;
  std::string sol_instance;
  std::string sol_csv;
  std::string sol_cert;
  bool absolute = false;
  double eta = 0.0;
  double delta = 0.0;
  auto* v = app.add_subcommand("solve", "Solve an instance and emit a CSV report row");
  v->add_option("--instance", sol_instance)->required();
  v->add_option("--method", sol.method, "aipp_s, raipp_s or qp_aipp_s");
  v->add_option("--rho-x", sol.rho_x);
  v->add_option("--rho-y", sol.rho_y);
  auto* eta_opt = v->add_option("--eta", eta, "feasibility tolerance (qp_aipp_s)");
  auto* delta_opt = v->add_option("--delta", delta, "solve for a delta-directional stationary point");
  v->add_option("--time-limit", sol.time_limit, "seconds");
  v->add_flag("--absolute", absolute, "use |u| <= rho_x instead of the relative criterion");
  v->add_option("--qp-inner", sol.qp_inner, "aipp or raipp");
  v->add_option("--hat-c", sol.hat_c);
  v->add_option("--out-csv", sol_csv);
  v->add_option("--cert", sol_cert, "write the certificate JSON here");

  std::string ver_instance;
  std::string ver_cert;
  auto* w = app.add_subcommand("verify", "Re-verify a certificate against its instance");
  w->add_option("--instance", ver_instance)->required();
  w->add_option("--cert", ver_cert)->required();

  std::string bench_config;
  std::string bench_out;
  auto* b = app.add_subcommand("bench", "Run a benchmark configuration");
  b->add_option("--config", bench_config)->required();
  b->add_option("--out", bench_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) {
      if (!std::isnan(density)) {
        gen.qvm.density = density;
        gen.trr_density = density;
      }
      gen.qvm.seed = gen.seed;
      const InstanceData d = cmd_generate(gen);
      out << instance_manifest(d);
      return kOk;
    }
    if (*s) {
      if (syn_samples < 1 || syn_features < 1 || !(syn_density > 0.0) || syn_density > 1.0) {
        throw UsageError("synth-libsvm: positive sizes and density in (0, 1] required");
      }
      trr_write_libsvm(syn_out, trr_synthesize(syn_samples, syn_features, syn_density, syn_seed));
      return kOk;
    }
    if (*v) {
      sol.relative = !absolute;
      if (*eta_opt) sol.eta = eta;
      if (*delta_opt) sol.delta = delta;
      const SolveRow row = cmd_solve(sol_instance, sol, sol_csv, sol_cert);
      out << csv_header() << '\n' << csv_line(row) << '\n';
      if (!row.error.empty()) err << "solver error: " << row.error << '\n';
      return row.converged() ? kOk : kNotConverged;
    }
    if (*w) {
      const VerifyReport rep = cmd_verify(ver_instance, ver_cert);
      out << rep.to_text();
      return rep.passed() ? kOk : kVerifyFailed;
    }
    if (*b) {
      const BenchResult res = cmd_bench(bench_config, bench_out);
      bool all = true;
      for (const auto& c : res.cells) {
        if (c.implemented && !c.row.converged()) all = false;
      }
      for (const auto& f : res.files) out << "wrote " << f << '\n';
      return all ? kOk : kNotConverged;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const DimensionError& e) {
    err << "dimension mismatch: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNotConverged;
  }
  return kUsage;
}

}  // namespace minmax::cli
