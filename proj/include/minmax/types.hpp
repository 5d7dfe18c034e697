#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minmax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Error hierarchy. Everything thrown by the library derives from Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidCurvature : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Raised when a computed quantity that is analytically nonnegative comes out
// clearly negative (beyond rounding).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

enum class Termination { Converged, TimeLimit, IterLimit };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "Converged";
    case Termination::TimeLimit:
      return "TimeLimit";
    case Termination::IterLimit:
      return "IterLimit";
  }
  return "?";
}

// Per-category oracle counts. One "oracle call" is an O(1) bundle in which
// every category appears at least once, so the bundled total is the largest
// single-category count.
struct OracleTally {
  std::int64_t phi_value = 0;
  std::int64_t grad_x = 0;
  std::int64_t h_value = 0;
  std::int64_t h_resolvent = 0;
  std::int64_t y_resolvent = 0;

  std::int64_t bundled() const {
    return std::max({phi_value, grad_x, h_value, h_resolvent, y_resolvent});
  }
  OracleTally& operator+=(const OracleTally& o) {
    phi_value += o.phi_value;
    grad_x += o.grad_x;
    h_value += o.h_value;
    h_resolvent += o.h_resolvent;
    y_resolvent += o.y_resolvent;
    return *this;
  }
};

struct SolveReport {
  std::int64_t outer_iterations = 0;
  std::int64_t acg_iterations = 0;
  OracleTally tally;
  double wall_time = 0.0;  // seconds
  double terminal_value = 0.0;
  Termination termination = Termination::IterLimit;
  std::optional<double> penalty_c_final;

  std::int64_t oracle_calls() const { return tally.bundled(); }
};

// Wall-clock budget shared by nested solver loops.
class Deadline {
 public:
  using Clock = std::chrono::steady_clock;

  explicit Deadline(double seconds)
      : start_(Clock::now()),
        limit_(seconds),
        end_(seconds > 0 && seconds < 1e12
                 ? start_ + std::chrono::duration_cast<Clock::duration>(
                                std::chrono::duration<double>(seconds))
                 : Clock::time_point::max()) {}

  bool expired() const { return Clock::now() >= end_; }
  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }
  double limit() const { return limit_; }

 private:
  Clock::time_point start_;
  double limit_;
  Clock::time_point end_;
};

// Thrown by inner loops when the wall-clock budget runs out; outer drivers
// catch it and report Termination::TimeLimit.
struct TimeLimitReached : Error {
  TimeLimitReached() : Error("time limit reached") {}
};

}  // namespace minmax
