#include "minmax/certificate_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace minmax {

namespace {

using nlohmann::json;

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector vector_field(const json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(fmt::format("certificate lacks '{}'", key));
  const auto v = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string certificate_to_json(const CertificateRecord& r) {
  json j;
  j["family"] = r.family;
  j["method"] = r.method;
  j["n_x"] = r.n_x;
  j["n_y"] = r.n_y;
  j["x0"] = to_json(r.x0);
  j["y0"] = to_json(r.y0);
  j["xi"] = r.xi;
  j["rho_x"] = r.rho_x;
  j["rho_y"] = r.rho_y;
  j["relative"] = r.relative;
  j["rho_bar"] = r.rho_bar;
  if (r.eta) j["eta"] = *r.eta;
  if (r.penalty_c) j["penalty_c"] = *r.penalty_c;
  if (r.delta) j["delta"] = *r.delta;
  if (r.tau) j["tau"] = *r.tau;
  j["termination"] = r.termination;
  j["x_bar"] = to_json(r.cert.x_bar);
  j["y_bar"] = to_json(r.cert.y_bar);
  j["u_bar"] = to_json(r.cert.u_bar);
  j["v_bar"] = to_json(r.cert.v_bar);
  if (r.cert.r_bar) j["r_bar"] = to_json(*r.cert.r_bar);
  j["norm_u"] = r.cert.norm_u;
  j["norm_v"] = r.cert.norm_v;
  if (r.cert.feas_violation) j["feas_violation"] = *r.cert.feas_violation;
  return j.dump(1);
}

CertificateRecord certificate_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("certificate is not valid JSON: {}", e.what()));
  }
  try {
    CertificateRecord r;
    r.family = j.at("family").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.n_x = j.at("n_x").get<Index>();
    r.n_y = j.at("n_y").get<Index>();
    r.x0 = vector_field(j, "x0");
    r.y0 = vector_field(j, "y0");
    r.xi = j.at("xi").get<double>();
    r.rho_x = j.at("rho_x").get<double>();
    r.rho_y = j.at("rho_y").get<double>();
    r.relative = j.at("relative").get<bool>();
    r.rho_bar = j.at("rho_bar").get<double>();
    r.eta = optional_field<double>(j, "eta");
    r.penalty_c = optional_field<double>(j, "penalty_c");
    r.delta = optional_field<double>(j, "delta");
    r.tau = optional_field<double>(j, "tau");
    r.termination = j.value("termination", std::string{});
    r.cert.x_bar = vector_field(j, "x_bar");
    r.cert.y_bar = vector_field(j, "y_bar");
    r.cert.u_bar = vector_field(j, "u_bar");
    r.cert.v_bar = vector_field(j, "v_bar");
    if (j.contains("r_bar")) r.cert.r_bar = vector_field(j, "r_bar");
    r.cert.norm_u = j.at("norm_u").get<double>();
    r.cert.norm_v = j.at("norm_v").get<double>();
    r.cert.feas_violation = optional_field<double>(j, "feas_violation");
    return r;
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed certificate: {}", e.what()));
  }
}

void save_certificate(const std::string& path, const CertificateRecord& record) {
  std::ofstream f(path);
  if (!f) throw Error(fmt::format("cannot write '{}'", path));
  f << certificate_to_json(record) << '\n';
  if (!f) throw Error(fmt::format("write to '{}' failed", path));
}

CertificateRecord load_certificate(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(fmt::format("cannot open certificate '{}'", path));
  std::ostringstream ss;
  ss << f.rdbuf();
  return certificate_from_json(ss.str());
}

}  // namespace minmax
