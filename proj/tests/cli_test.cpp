#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli_commands.hpp"

namespace fs = std::filesystem;
using namespace minmax;
using namespace minmax::cli;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "minmax");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  CliResult r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("minmax_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string column(const std::string& header, const std::string& row, const std::string& name) {
  const auto h = split_csv(header);
  const auto r = split_csv(row);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] == name) return i < r.size() ? r[i] : "";
  }
  return "<missing>";
}

}  // namespace

TEST_CASE("generate: manifest echoes the configuration") {
  const fs::path dir = scratch("generate");
  const std::string qvm = (dir / "qvm.inst").string();
  const CliResult r = run_cli({"generate", "qvm", "--n", "200", "--l", "10", "--k", "5", "--M", "1e1",
                               "--m", "1e0", "--seed", "1", "--out", qvm});
  REQUIRE(r.code == kOk);
  const std::string manifest = slurp(qvm + ".manifest");
  for (const char* line : {"family = qvm", "n = 200", "l = 10", "k = 5", "M = 10", "m = 1", "seed = 1"}) {
    CHECK_MESSAGE(manifest.find(std::string(line) + "\n") != std::string::npos, line);
  }
  CHECK(r.out == manifest);

  const std::string pc = (dir / "pc.inst").string();
  REQUIRE(run_cli({"generate", "pc", "--N", "5", "--K", "5", "--seed", "1", "--out", pc}).code == kOk);
  const std::string pm = slurp(pc + ".manifest");
  CHECK(pm.find("N = 5\n") != std::string::npos);
  CHECK(pm.find("K = 5\n") != std::string::npos);
}

TEST_CASE("generate: invalid parameters are usage errors") {
  const fs::path dir = scratch("bad");
  const std::string out = (dir / "x.inst").string();
  CHECK(run_cli({"generate", "qvm", "--density", "0", "--out", out}).code == kUsage);
  CHECK(run_cli({"generate", "nope", "--out", out}).code == kUsage);
  CHECK(run_cli({"generate", "qvm"}).code == kUsage);
  CHECK(run_cli({"solve", "--instance", (dir / "missing.inst").string()}).code == kUsage);
  CHECK(run_cli({}).code == kUsage);
  CHECK(!fs::exists(out));
}

TEST_CASE("solve then verify; a tampered certificate fails verification") {
  const fs::path dir = scratch("solve");
  const std::string inst = (dir / "qvm.inst").string();
  REQUIRE(run_cli({"generate", "qvm", "--n", "30", "--l", "5", "--k", "3", "--M", "1", "--m", "1",
                   "--seed", "2", "--out", inst}).code == kOk);
  const std::string csv = (dir / "runs.csv").string();
  const std::string cert = (dir / "cert.json").string();
  const CliResult s = run_cli({"solve", "--instance", inst, "--method", "raipp_s", "--rho-x", "1e-2",
                               "--rho-y", "1e-1", "--out-csv", csv, "--cert", cert});
  REQUIRE(s.code == kOk);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv_header());
  CHECK(column(rows[0], rows[1], "termination") == "Converged");
  CHECK(column(rows[0], rows[1], "family") == "qvm");
  CHECK(std::stod(column(rows[0], rows[1], "norm_u_rel")) <= 1e-2);
  CHECK(slurp(csv).find("\r\n") != std::string::npos);

  const CliResult v = run_cli({"verify", "--instance", inst, "--cert", cert});
  CHECK(v.code == kOk);
  CHECK(v.out.find("overall      PASS") != std::string::npos);

  // a second run appends without repeating the header
  REQUIRE(run_cli({"solve", "--instance", inst, "--method", "aipp_s", "--out-csv", csv}).code == kOk);
  CHECK(lines(slurp(csv)).size() == 3);

  CertificateRecord rec = load_certificate(cert);
  rec.cert.u_bar[0] += 10.0 * rec.rho_bar;
  const std::string bad = (dir / "bad.json").string();
  save_certificate(bad, rec);
  const CliResult vb = run_cli({"verify", "--instance", inst, "--cert", bad});
  CHECK(vb.code == kVerifyFailed);
  CHECK(vb.out.find("u_residual   FAIL") != std::string::npos);

  const std::string other = (dir / "pc.inst").string();
  REQUIRE(run_cli({"generate", "pc", "--N", "2", "--K", "2", "--out", other}).code == kOk);
  CHECK(run_cli({"verify", "--instance", other, "--cert", cert}).code == kUsage);
}

TEST_CASE("forced timeout gives a starred TimeLimit row") {
  const fs::path dir = scratch("timeout");
  const std::string inst = (dir / "qvm.inst").string();
  REQUIRE(run_cli({"generate", "qvm", "--n", "50", "--l", "5", "--k", "3", "--M", "1000", "--seed", "3",
                   "--out", inst}).code == kOk);
  const std::string csv = (dir / "t.csv").string();
  const CliResult r = run_cli({"solve", "--instance", inst, "--method", "aipp_s", "--rho-x", "1e-8",
                               "--time-limit", "0.001", "--out-csv", csv});
  CHECK(r.code == kNotConverged);
  const auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(column(rows[0], rows[1], "termination") == "TimeLimit");
  CHECK(column(rows[0], rows[1], "runtime_s") == "0.00*");
}

TEST_CASE("delta mode and the constrained method emit their extra columns") {
  const fs::path dir = scratch("delta");
  const std::string inst = (dir / "qvm.inst").string();
  REQUIRE(run_cli({"generate", "qvm", "--n", "10", "--l", "3", "--k", "2", "--density", "0.3", "--seed", "4",
                   "--constraint-rows", "2", "--out", inst}).code == kOk);
  const std::string csv = (dir / "d.csv").string();
  REQUIRE(run_cli({"solve", "--instance", inst, "--delta", "0.5", "--out-csv", csv}).code == kOk);
  auto rows = lines(slurp(csv));
  REQUIRE(rows.size() == 2);
  CHECK(column(rows[0], rows[1], "delta") == "0.5");
  const double tau = std::stod(column(rows[0], rows[1], "tau"));
  const double dd = std::stod(column(rows[0], rows[1], "dd_lower_bound"));
  CHECK(tau > 0.0);
  CHECK(dd >= -0.5);
  CHECK(std::stod(column(rows[0], rows[1], "distance_bound")) <= 0.5);

  const std::string cert = (dir / "qp.json").string();
  REQUIRE(run_cli({"solve", "--instance", inst, "--method", "qp_aipp_s", "--eta", "1e-3", "--out-csv", csv,
                   "--cert", cert}).code == kOk);
  rows = lines(slurp(csv));
  REQUIRE(rows.size() == 3);
  CHECK(!column(rows[0], rows[2], "penalty_c").empty());
  const CliResult v = run_cli({"verify", "--instance", inst, "--cert", cert});
  CHECK(v.code == kOk);
  CHECK(v.out.find("multiplier   PASS") != std::string::npos);
  CHECK(run_cli({"solve", "--instance", inst, "--method", "bogus"}).code == kUsage);
}

TEST_CASE("RFC 4180 quoting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_quote("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("bench: tables, logs, determinism and usage errors") {
  const fs::path dir = scratch("bench");
  {
    std::ofstream ini(dir / "small.ini");
    ini << "[bench]\nmethods = raipp_s, aipp_s, ag_s\ntime_limit = 600\nthreads = 2\n\n"
           "[qvm]\nn = 20\nl = 4\nk = 3\ndensity = 0.2\nseed = 5\ncurvatures = 1:1, 10:1\n"
           "rho_x = 1e-2\nrho_y = 1e-1\n\n"
           "[pc]\nsizes = 2x2\nseed = 1\nrho_x = 1e-1\nrho_y = 1e-1\nmethods = raipp_s\n";
  }
  const fs::path out1 = dir / "out1";
  const fs::path out2 = dir / "out2";
  const CliResult r1 = run_cli({"bench", "--config", (dir / "small.ini").string(), "--out", out1.string()});
  REQUIRE(r1.code == kOk);
  REQUIRE(run_cli({"bench", "--config", (dir / "small.ini").string(), "--out", out2.string()}).code == kOk);
  for (const char* f : {"qvm.md", "qvm.csv", "pc.md", "pc.csv", "runs.jsonl"}) {
    CHECK_MESSAGE(fs::exists(out1 / f), f);
  }
  const std::string md = slurp(out1 / "qvm.md");
  CHECK(md.find("**") != std::string::npos);
  CHECK(md.find("n/a") != std::string::npos);

  const auto t1 = lines(slurp(out1 / "qvm.csv"));
  const auto t2 = lines(slurp(out2 / "qvm.csv"));
  REQUIRE(t1.size() == t2.size());
  REQUIRE(t1.size() == 1 + 2 * 3);
  for (std::size_t i = 1; i < t1.size(); ++i) {
    CHECK(column(t1[0], t1[i], "iterations") == column(t2[0], t2[i], "iterations"));
    CHECK(column(t1[0], t1[i], "method") == column(t2[0], t2[i], "method"));
    const std::string cert = column(t1[0], t1[i], "certificate");
    if (!cert.empty()) {
      const fs::path cp = fs::path(cert).is_absolute() ? fs::path(cert) : out1 / cert;
      const fs::path ip = [&] {
        const fs::path p = column(t1[0], t1[i], "instance_file");
        return p.is_absolute() ? p : out1 / p;
      }();
      CHECK(run_cli({"verify", "--instance", ip.string(), "--cert", cp.string()}).code == kOk);
    }
  }
  CHECK(lines(slurp(out1 / "runs.jsonl")).size() == 2 * 3 + 1);

  {
    std::ofstream ini(dir / "empty.ini");
    ini << "[bench]\nmethods =\n\n[qvm]\nn = 10\n";
  }
  CHECK(run_cli({"bench", "--config", (dir / "empty.ini").string(), "--out", (dir / "o3").string()}).code ==
        kUsage);
  {
    std::ofstream ini(dir / "unknown.ini");
    ini << "[bench]\nmethods = frobnicate\n\n[qvm]\nn = 10\n";
  }
  CHECK(run_cli({"bench", "--config", (dir / "unknown.ini").string(), "--out", (dir / "o4").string()}).code ==
        kUsage);
}

TEST_CASE("shipped bench configuration parses and references existing data") {
  const char* src = std::getenv("MINMAX_SOURCE_DIR");
  REQUIRE(src != nullptr);
  const fs::path cfg = fs::path(src) / "configs" / "bench.ini";
  REQUIRE(fs::exists(cfg));
  const std::string text = slurp(cfg);
  CHECK(text.find("[qvm]") != std::string::npos);
  CHECK(text.find("[trr]") != std::string::npos);
  CHECK(text.find("[pc]") != std::string::npos);
  CHECK(fs::exists(fs::path(src) / "configs" / "data" / "trr_synthetic_100x20.libsvm"));
}
