#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rectify {

enum class ErrorKind {
  InvalidArgument,
  InvalidAlgebraVector,
  InvalidGroupElement,
  LogDomainError,
  NormalizationFailure,
  ActionError,
  CoreAxiomError,
  InvarianceError,
  NotComposable,
  DefectOverflow,
  DefectTooLarge,
  RangeEscape,
  NonContraction,
  GridError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `witness` carries the offending indices (arrow ids,
/// object ids, sample indices) so callers can report them without parsing the
/// message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::vector<std::int64_t> witness = {}, std::string tag = {})
      : std::runtime_error(message),
        kind_(kind),
        witness_(std::move(witness)),
        tag_(std::move(tag)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::vector<std::int64_t>& witness() const noexcept { return witness_; }
  // Axiom id or similar sub-classification, e.g. "no_escape".
  const std::string& tag() const noexcept { return tag_; }

 private:
  ErrorKind kind_;
  std::vector<std::int64_t> witness_;
  std::string tag_;
};

}  // namespace rectify
