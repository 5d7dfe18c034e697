#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <thread>

#include "cli_commands.hpp"

namespace minmax::cli {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kImplemented = {"aipp_s", "raipp_s", "qp_aipp_s"};
// Comparison slots for external baselines that this library does not ship.
const std::set<std::string> kReserved = {"ag_s", "pgsf"};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(","));
  std::vector<std::string> out;
  for (auto& p : parts) {
    boost::trim(p);
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

template <class T>
T parse_number(const std::string& s, const std::string& context) {
  T v{};
  const std::string t = boost::trim_copy(s);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw UsageError(fmt::format("{}: cannot parse '{}'", context, s));
  }
  return v;
}

template <class T>
T get(const pt::ptree& sec, const std::string& key, T fallback, const std::string& where) {
  const auto v = sec.get_optional<std::string>(key);
  if (!v) return fallback;
  return parse_number<T>(*v, where + "." + key);
}

struct Row {
  std::string family;
  std::string label;
  InstanceData data;
  SolveOptions base;
  std::vector<std::string> methods;
  std::string instance_path;
};

std::vector<std::string> methods_of(const pt::ptree& sec, const std::vector<std::string>& fallback,
                                    const std::string& where) {
  const auto v = sec.get_optional<std::string>("methods");
  std::vector<std::string> m = v ? split_list(*v) : fallback;
  if (m.empty()) throw UsageError(fmt::format("[{}]: the method list is empty", where));
  for (const auto& name : m) {
    if (!kImplemented.count(name) && !kReserved.count(name)) {
      throw UsageError(fmt::format("[{}]: unknown method '{}'", where, name));
    }
  }
  return m;
}

SolveOptions tolerances_of(const pt::ptree& sec, double time_limit, const std::string& where,
                           double rho_x, double rho_y) {
  SolveOptions o;
  o.rho_x = get<double>(sec, "rho_x", rho_x, where);
  o.rho_y = get<double>(sec, "rho_y", rho_y, where);
  o.time_limit = get<double>(sec, "time_limit", time_limit, where);
  if (sec.get_optional<std::string>("eta")) o.eta = get<double>(sec, "eta", 0.0, where);
  if (const auto r = sec.get_optional<std::string>("relative")) o.relative = boost::trim_copy(*r) != "false";
  if (const auto q = sec.get_optional<std::string>("qp_inner")) o.qp_inner = boost::trim_copy(*q);
  return o;
}

int thread_count(const pt::ptree& bench) {
  int n = get<int>(bench, "threads", 1, "bench");
  if (const char* env = std::getenv("MINMAX_BENCH_THREADS")) {
    n = parse_number<int>(env, "MINMAX_BENCH_THREADS");
  }
  if (n < 1) throw UsageError("thread count must be at least 1");
  return n;
}

std::vector<Row> build_rows(const pt::ptree& tree, const fs::path& config_dir,
                            const std::vector<std::string>& default_methods, double time_limit) {
  std::vector<Row> rows;
  if (const auto sec = tree.get_child_optional("qvm")) {
    const auto methods = methods_of(*sec, default_methods, "qvm");
    GenerateOptions g;
    g.family = "qvm";
    g.qvm.n = get<Index>(*sec, "n", 50, "qvm");
    g.qvm.l = get<Index>(*sec, "l", 10, "qvm");
    g.qvm.k = get<Index>(*sec, "k", 5, "qvm");
    g.qvm.density = get<double>(*sec, "density", 0.05, "qvm");
    g.seed = get<std::uint64_t>(*sec, "seed", 1, "qvm");
    g.qvm.seed = g.seed;
    g.constraint_rows = get<Index>(*sec, "constraint_rows", 0, "qvm");
    const auto curv = split_list(sec->get<std::string>("curvatures", "10:1"));
    if (curv.empty()) throw UsageError("[qvm]: no curvature pairs");
    for (const auto& pair : curv) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw UsageError(fmt::format("[qvm]: curvature '{}' is not M:m", pair));
      g.qvm.M = parse_number<double>(pair.substr(0, colon), "qvm.curvatures");
      g.qvm.m = parse_number<double>(pair.substr(colon + 1), "qvm.curvatures");
      Row r;
      r.family = "qvm";
      r.label = fmt::format("M={:g} m={:g}", g.qvm.M, g.qvm.m);
      r.data = build_instance(g);
      r.base = tolerances_of(*sec, time_limit, "qvm", 1e-2, 1e-1);
      r.methods = methods;
      rows.push_back(std::move(r));
    }
  }
  if (const auto sec = tree.get_child_optional("trr")) {
    const auto methods = methods_of(*sec, default_methods, "trr");
    const auto files = split_list(sec->get<std::string>("files", ""));
    if (files.empty()) throw UsageError("[trr]: no data files listed");
    for (const auto& file : files) {
      GenerateOptions g;
      g.family = "trr";
      g.alpha = get<double>(*sec, "alpha", 10.0, "trr");
      fs::path p(file);
      if (p.is_relative()) p = config_dir / p;
      g.libsvm = p.string();
      Row r;
      r.family = "trr";
      r.label = fs::path(file).stem().string();
      r.data = build_instance(g);
      r.base = tolerances_of(*sec, time_limit, "trr", 1e-5, 1e-3);
      r.methods = methods;
      rows.push_back(std::move(r));
    }
  }
  if (const auto sec = tree.get_child_optional("pc")) {
    const auto methods = methods_of(*sec, default_methods, "pc");
    const auto sizes = split_list(sec->get<std::string>("sizes", "5x5"));
    if (sizes.empty()) throw UsageError("[pc]: no sizes listed");
    for (const auto& size : sizes) {
      const auto x = size.find('x');
      if (x == std::string::npos) throw UsageError(fmt::format("[pc]: size '{}' is not NxK", size));
      GenerateOptions g;
      g.family = "pc";
      g.N = parse_number<Index>(size.substr(0, x), "pc.sizes");
      g.K = parse_number<Index>(size.substr(x + 1), "pc.sizes");
      g.seed = get<std::uint64_t>(*sec, "seed", 1, "pc");
      Row r;
      r.family = "pc";
      r.label = fmt::format("N={} K={}", g.N, g.K);
      r.data = build_instance(g);
      r.base = tolerances_of(*sec, time_limit, "pc", 1e-1, 1e-1);
      r.methods = methods;
      rows.push_back(std::move(r));
    }
  }
  if (rows.empty()) throw UsageError("config lists no families ([qvm], [trr] or [pc])");
  return rows;
}

// Index of the best converged cell per row for a given key, or -1.
template <class Key>
long best_per_row(const std::vector<const BenchCell*>& row_cells, Key key) {
  long best = -1;
  for (std::size_t i = 0; i < row_cells.size(); ++i) {
    const BenchCell& c = *row_cells[i];
    if (!c.implemented || !c.row.converged()) continue;
    if (best < 0 || key(c) < key(*row_cells[static_cast<std::size_t>(best)])) best = static_cast<long>(i);
  }
  return best;
}

std::vector<std::string> row_order(const std::vector<BenchCell>& cells, const std::string& family) {
  std::vector<std::string> labels;
  for (const auto& c : cells) {
    if (c.family == family && std::find(labels.begin(), labels.end(), c.row_label) == labels.end()) {
      labels.push_back(c.row_label);
    }
  }
  return labels;
}

std::vector<const BenchCell*> cells_in_row(const std::vector<BenchCell>& cells, const std::string& family,
                                           const std::string& label, const std::vector<std::string>& methods) {
  std::vector<const BenchCell*> out;
  for (const auto& m : methods) {
    for (const auto& c : cells) {
      if (c.family == family && c.row_label == label && c.method == m) out.push_back(&c);
    }
  }
  return out;
}

long best_iter(const std::vector<const BenchCell*>& rc) {
  return best_per_row(rc, [](const BenchCell& c) { return c.row.iterations; });
}
long best_time(const std::vector<const BenchCell*>& rc) {
  return best_per_row(rc, [](const BenchCell& c) { return c.row.runtime_s; });
}

}  // namespace

std::string bench_markdown(const std::vector<BenchCell>& cells, const std::string& family,
                           const std::vector<std::string>& methods) {
  std::string s = "| Instance |";
  for (const auto& m : methods) s += fmt::format(" Iterations {} |", m);
  for (const auto& m : methods) s += fmt::format(" Runtime {} |", m);
  for (const auto& m : methods) s += fmt::format(" p̂_ξ(x̄) {} |", m);
  s += "\n|---|";
  for (std::size_t i = 0; i < 3 * methods.size(); ++i) s += "---:|";
  s += '\n';

  for (const auto& label : row_order(cells, family)) {
    const auto rc = cells_in_row(cells, family, label, methods);
    const long bi = best_iter(rc);
    const long bt = best_time(rc);
    auto cell_text = [](const BenchCell& c, const std::string& value) -> std::string {
      if (!c.implemented) return "n/a";
      if (c.row.termination == "Error") return "error";
      return value;
    };
    s += "| " + label + " |";
    for (std::size_t i = 0; i < rc.size(); ++i) {
      std::string v = cell_text(*rc[i], std::to_string(rc[i]->row.iterations));
      if (static_cast<long>(i) == bi) v = "**" + v + "**";
      s += " " + v + " |";
    }
    for (std::size_t i = 0; i < rc.size(); ++i) {
      std::string v = cell_text(*rc[i], rc[i]->row.runtime_text());
      if (static_cast<long>(i) == bt) v = "**" + v + "**";
      s += " " + v + " |";
    }
    for (const BenchCell* c : rc) s += " " + cell_text(*c, fmt::format("{:.6g}", c->row.p_hat_xi)) + " |";
    s += '\n';
  }
  return s;
}

BenchResult cmd_bench(const std::string& config_path, const std::string& out_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(config_path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw UsageError(fmt::format("cannot read config: {}", e.what()));
  }
  const pt::ptree bench = tree.get_child("bench", pt::ptree{});
  const double time_limit = get<double>(bench, "time_limit", 4000.0, "bench");
  const auto default_methods = split_list(bench.get<std::string>("methods", "raipp_s"));
  if (default_methods.empty()) throw UsageError("[bench]: the method list is empty");
  std::set<std::string> formats;
  for (const auto& f : split_list(bench.get<std::string>("formats", "markdown, csv"))) {
    if (f != "markdown" && f != "csv") throw UsageError(fmt::format("[bench]: unknown format '{}'", f));
    formats.insert(f);
  }
  const int threads = thread_count(bench);

  const fs::path config_dir = fs::absolute(config_path).parent_path();
  std::vector<Row> rows = build_rows(tree, config_dir, default_methods, time_limit);

  const fs::path out(out_dir);
  fs::create_directories(out / "instances");
  fs::create_directories(out / "certificates");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].instance_path = (out / "instances" / fmt::format("{}_{}.inst", rows[i].family, i)).string();
    save_instance_with_manifest(rows[i].instance_path, rows[i].data);
  }

  BenchResult res;
  std::vector<std::pair<std::size_t, std::string>> work;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& m : rows[i].methods) {
      work.emplace_back(i, m);
      BenchCell c;
      c.family = rows[i].family;
      c.row_label = rows[i].label;
      c.method = m;
      c.instance_path = rows[i].instance_path;
      res.cells.push_back(std::move(c));
    }
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t w = next++; w < work.size(); w = next++) {
      const auto& [ri, method] = work[w];
      BenchCell& cell = res.cells[w];
      const Row& row = rows[ri];
      if (kReserved.count(method)) {
        cell.implemented = false;
        cell.row.family = row.family;
        cell.row.method = method;
        cell.row.termination = "NotImplemented";
        continue;
      }
      SolveOptions o = row.base;
      o.method = method;
      try {
        cell.row = solve_instance(row.data, o);
      } catch (const std::exception& e) {
        cell.row.family = row.family;
        cell.row.method = method;
        cell.row.termination = "Error";
        cell.row.error = e.what();
      }
      if (cell.row.record) {
        cell.certificate_path =
            (out / "certificates" / fmt::format("{}_{}_{}.json", row.family, ri, method)).string();
        save_certificate(cell.certificate_path, *cell.row.record);
      }
    }
  };
  const int n_threads = std::min<int>(threads, static_cast<int>(std::max<std::size_t>(work.size(), 1)));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Report assembly.
  std::vector<std::string> families;
  for (const auto& r : rows) {
    if (std::find(families.begin(), families.end(), r.family) == families.end()) families.push_back(r.family);
  }
  for (const auto& fam : families) {
    std::vector<std::string> methods;
    for (const auto& r : rows) {
      if (r.family == fam) methods = r.methods;
    }
    if (formats.count("markdown")) {
      const fs::path p = out / (fam + ".md");
      std::ofstream f(p);
      f << bench_markdown(res.cells, fam, methods);
      res.files.push_back(p.string());
    }
    if (formats.count("csv")) {
      const fs::path p = out / (fam + ".csv");
      std::ofstream f(p);
      f << "instance," << csv_header() << ",best_iterations,best_runtime,instance_file,certificate\r\n";
      for (const auto& label : row_order(res.cells, fam)) {
        const auto rc = cells_in_row(res.cells, fam, label, methods);
        const long bi = best_iter(rc);
        const long bt = best_time(rc);
        for (std::size_t i = 0; i < rc.size(); ++i) {
          const BenchCell& c = *rc[i];
          f << csv_quote(label) << ',' << csv_line(c.row) << ','
            << (static_cast<long>(i) == bi ? "true" : "false") << ','
            << (static_cast<long>(i) == bt ? "true" : "false") << ',' << csv_quote(c.instance_path) << ','
            << csv_quote(c.certificate_path) << "\r\n";
        }
      }
      res.files.push_back(p.string());
    }
  }

  const fs::path log = out / "runs.jsonl";
  std::ofstream lf(log);
  for (const auto& c : res.cells) {
    nlohmann::json j;
    j["family"] = c.family;
    j["instance"] = c.row_label;
    j["method"] = c.method;
    j["implemented"] = c.implemented;
    j["termination"] = c.row.termination;
    j["iterations"] = c.row.iterations;
    j["outer_iterations"] = c.row.outer_iterations;
    j["oracle_calls"] = c.row.oracle_calls;
    j["runtime_s"] = c.row.runtime_s;
    j["p_hat_xi"] = c.row.p_hat_xi;
    j["norm_u_rel"] = c.row.norm_u_rel;
    j["norm_v"] = c.row.norm_v;
    if (!c.row.error.empty()) j["error"] = c.row.error;
    j["instance_file"] = c.instance_path;
    j["certificate"] = c.certificate_path;
    lf << j.dump() << '\n';
  }
  res.files.push_back(log.string());
  return res;
}

}  // namespace minmax::cli
