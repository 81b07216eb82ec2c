#pragma once

#include <stdexcept>
#include <string>

namespace qlocal {

/// Malformed input files or strings (JSON, circuit text, pairings).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A documented operation precondition was violated by the caller.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

/// A noise-strength threshold (p0) was exceeded; carries the failing stage.
class ThresholdExceeded : public PreconditionError {
 public:
  ThresholdExceeded(const std::string& what, int stage_index)
      : PreconditionError(what), stage(stage_index) {}
  int stage;
};

/// Exact branch enumeration would exceed the configured budget.
class BranchBudgetExceeded : public PreconditionError {
 public:
  explicit BranchBudgetExceeded(const std::string& what) : PreconditionError(what) {}
};

/// Violation of an internal invariant, i.e. an implementation bug.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

namespace detail {
[[noreturn]] void assert_fail(const char* expr, const char* file, int line);
}

}  // namespace qlocal

#define QLOCAL_ASSERT(expr) \
  ((expr) ? static_cast<void>(0) : ::qlocal::detail::assert_fail(#expr, __FILE__, __LINE__))
