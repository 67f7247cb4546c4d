#pragma once

#include <stdexcept>
#include <string>

namespace hyperhaar {

// Exact arithmetic left the representable 64-bit rational range.  Exactness is
// never silently degraded: callers either narrow successfully or see this.
struct OverflowError : std::overflow_error {
  explicit OverflowError(const std::string& what)
      : std::overflow_error("exact arithmetic overflow: " + what) {}
};

// Two rectangles share a side in some coordinate where distinct sides are
// required (products of Haar functions degenerate there).
struct CoincidenceError : std::invalid_argument {
  explicit CoincidenceError(const std::string& what)
      : std::invalid_argument("coincident sides: " + what) {}
};

// A dense grid (or dense enumeration) would exceed the fixed size limit.
// Predictable memory is part of the contract; nothing falls back silently.
struct CapacityError : std::length_error {
  explicit CapacityError(const std::string& what)
      : std::length_error("capacity exceeded: " + what) {}
};

// A combinatorial enumeration would exceed its work budget.
struct BudgetError : std::length_error {
  explicit BudgetError(const std::string& what)
      : std::length_error("enumeration budget exceeded: " + what) {}
};

// A colored graph fails one of the admissibility conditions.
struct NotAdmissible : std::invalid_argument {
  explicit NotAdmissible(const std::string& what)
      : std::invalid_argument("graph not admissible: " + what) {}
};

}  // namespace hyperhaar
