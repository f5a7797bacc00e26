#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dol {

enum class ErrorKind {
  Format,
  Data,
  Io,
  Spec,
  Domain,
  Config,
  Unsupported,
  Extrapolation,
  NoCriticalPoint,
  Alignment,
  Input,
  Offset,
  DegenerateFit,
};

// Name used on stderr by the CLI, e.g. "FormatError".
std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view kind_name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using FormatError = TypedError<ErrorKind::Format>;
using IoError = TypedError<ErrorKind::Io>;
using SpecError = TypedError<ErrorKind::Spec>;
using DomainError = TypedError<ErrorKind::Domain>;
using ConfigError = TypedError<ErrorKind::Config>;
using UnsupportedError = TypedError<ErrorKind::Unsupported>;
using ExtrapolationError = TypedError<ErrorKind::Extrapolation>;
using NoCriticalPointError = TypedError<ErrorKind::NoCriticalPoint>;
using AlignmentError = TypedError<ErrorKind::Alignment>;
using InputError = TypedError<ErrorKind::Input>;
using OffsetError = TypedError<ErrorKind::Offset>;
using DegenerateFitError = TypedError<ErrorKind::DegenerateFit>;

// Non-finite value in a dataset; carries the offending (zero-based) row.
class DataError : public Error {
 public:
  DataError(std::size_t row, const std::string& what)
      : Error(ErrorKind::Data, what), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace dol
