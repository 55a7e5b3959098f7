#include "ifcf/errors.hpp"

namespace ifcf {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::OutsideCone: return "OutsideCone";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::NotSpacelike: return "NotSpacelike";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::Stiffness: return "StiffnessError";
    case ErrorKind::ConvexityLost: return "ConvexityLost";
    case ErrorKind::InsufficientRange: return "InsufficientRange";
    case ErrorKind::NonPositiveSeries: return "NonPositiveSeries";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IOError";
  }
  return "Error";
}

}  // namespace ifcf
