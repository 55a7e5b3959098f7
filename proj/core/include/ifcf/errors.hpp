#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ifcf {

enum class ErrorKind {
  Domain,               // argument outside the model's time interval
  NotPositiveDefinite,  // spatial metric lost definiteness
  OutsideCone,          // curvature argument not in the positive cone
  NonSymmetric,         // shape operator not self-adjoint w.r.t. the metric
  NotSpacelike,         // |Du| too close to (or above) one
  NotConvex,            // shifted principal curvature below the convexity floor
  ComplexSpectrum,      // shape operator produced a complex eigenvalue pair
  Stiffness,            // step rejected too many times
  ConvexityLost,        // homogeneous oracle left the positive cone
  InsufficientRange,    // trace too short for the requested analysis
  NonPositiveSeries,    // rate fit on a series with non-positive entries
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, std::string(to_string(kind)) + ": " + message);
}

}  // namespace ifcf
