#include "dol/errors.hpp"

namespace dol {

std::string_view error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::Data: return "DataError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Spec: return "SpecError";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Unsupported: return "UnsupportedError";
    case ErrorKind::Extrapolation: return "ExtrapolationError";
    case ErrorKind::NoCriticalPoint: return "NoCriticalPointError";
    case ErrorKind::Alignment: return "AlignmentError";
    case ErrorKind::Input: return "InputError";
    case ErrorKind::Offset: return "OffsetError";
    case ErrorKind::DegenerateFit: return "DegenerateFitError";
  }
  return "Error";
}

}  // namespace dol
