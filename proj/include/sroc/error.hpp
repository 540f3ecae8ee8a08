#pragma once

#include <stdexcept>
#include <string>

namespace sroc {

enum class ErrorKind {
  UndefinedMetric,
  InfiniteOdds,
  InfiniteLogit,
  Boundary,
  InsufficientData,
  NonConvergence,
  DegenerateVariance,
  SingularCovariance,
  UnorderedInput,
  InvalidInterval,
  InvalidArgument,
  EmptyReport,
  AllReplicatesFailed,
  Io,
  MalformedHeader,
  Validation,
  DuplicateReader,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sroc
