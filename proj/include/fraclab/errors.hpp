#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

// Invalid mathematical input: preconditions violated, values outside the
// domain of the requested operation.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A budget was exhausted (word counts, point counts, memory caps).  Callers
// may retry with a larger budget or a coarser resolution.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

// The requested decision cannot be certified at the working precision.
// Callers may retry with a smaller precision parameter.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fraclab
