#pragma once

#include <stdexcept>
#include <string>

namespace aqkm {

/// Broad failure classes. The CLI maps these onto exit codes.
enum class ErrorKind {
  kDimension,
  kEmptySet,
  kDomain,
  kInsufficientData,
  kLookup,
  kBudget,
  kMissingLabel,
  kAbortedSession,
  kParse,
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define AQKM_DEFINE_ERROR(Name, Kind)                              \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(Kind, what) {}  \
  };

AQKM_DEFINE_ERROR(DimensionError, ErrorKind::kDimension)
AQKM_DEFINE_ERROR(EmptySetError, ErrorKind::kEmptySet)
AQKM_DEFINE_ERROR(DomainError, ErrorKind::kDomain)
AQKM_DEFINE_ERROR(InsufficientDataError, ErrorKind::kInsufficientData)
AQKM_DEFINE_ERROR(LookupError, ErrorKind::kLookup)
AQKM_DEFINE_ERROR(BudgetError, ErrorKind::kBudget)
AQKM_DEFINE_ERROR(MissingLabelError, ErrorKind::kMissingLabel)
AQKM_DEFINE_ERROR(AbortedSessionError, ErrorKind::kAbortedSession)
AQKM_DEFINE_ERROR(IoError, ErrorKind::kIo)

#undef AQKM_DEFINE_ERROR

/// Malformed input; `line` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::kParse,
              line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace aqkm
