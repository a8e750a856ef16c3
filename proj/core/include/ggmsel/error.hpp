#pragma once

#include <stdexcept>
#include <string>

namespace ggmsel {

/// Argument outside the domain of a function (invalid dof, probability, size).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to converge or produced a non-finite value.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible options, e.g. a search strategy that does not apply to a family.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file; the message names the offending line.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Enumeration refused because the collection is larger than the configured cap.
class CollectionTooLarge : public std::runtime_error {
 public:
  CollectionTooLarge(const std::string& what, double estimated_count)
      : std::runtime_error(what), estimated_count_(estimated_count) {}

  double estimated_count() const noexcept { return estimated_count_; }

 private:
  double estimated_count_;
};

}  // namespace ggmsel
