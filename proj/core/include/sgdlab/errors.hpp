#pragma once

#include <stdexcept>
#include <string>

namespace sgdlab {

// Invalid inputs are reported with std::invalid_argument. The two types below
// cover the remaining failure classes callers may want to tell apart.

// An exact oracle was asked for data outside the structure it can handle
// (e.g. more than two distinct (curvature, linear) pairs).
class UnsupportedInstance : public std::domain_error {
 public:
  explicit UnsupportedInstance(const std::string& what) : std::domain_error(what) {}
};

// The arguments are well-formed but lie outside the range where the quantity's
// inequality is claimed (e.g. eta > 1/(lambda_max n)).
class PreconditionViolation : public std::domain_error {
 public:
  explicit PreconditionViolation(const std::string& what) : std::domain_error(what) {}
};

}  // namespace sgdlab
