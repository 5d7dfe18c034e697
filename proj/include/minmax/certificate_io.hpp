#pragma once

#include <optional>
#include <string>

#include "minmax/problem.hpp"

namespace minmax {

/// A solver output plus everything needed to re-verify it from scratch.
struct CertificateRecord {
  std::string family;
  std::string method;  // aipp_s, raipp_s, qp_aipp_s
  Index n_x = 0;
  Index n_y = 0;
  Vector x0;
  Vector y0;
  double xi = 0.0;
  double rho_x = 0.0;
  double rho_y = 0.0;
  bool relative = false;
  double rho_bar = 0.0;  // absolute bound the stored u_bar was held to
  std::optional<double> eta;
  std::optional<double> penalty_c;
  std::optional<double> delta;  // directional mode
  std::optional<double> tau;
  StationaryCertificate cert;
  std::string termination;
};

std::string certificate_to_json(const CertificateRecord& record);
CertificateRecord certificate_from_json(const std::string& text);

void save_certificate(const std::string& path, const CertificateRecord& record);
CertificateRecord load_certificate(const std::string& path);

}  // namespace minmax
