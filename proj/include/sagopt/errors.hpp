#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sagopt {

// A stepper produced a non-finite or runaway state.
class DivergedError : public std::runtime_error {
 public:
  DivergedError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index_(index) {}
  // Iteration index (or vector entry, depending on the raiser) that went bad.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// The leading coefficient of a four-term recurrence vanished.
class DegenerateSchemeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IntegrationFailure : public std::runtime_error {
 public:
  IntegrationFailure(const std::string& what, double last_valid_t)
      : std::runtime_error(what), last_valid_t_(last_valid_t) {}
  double last_valid_t() const noexcept { return last_valid_t_; }

 private:
  double last_valid_t_;
};

class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what,
                             std::optional<std::size_t> index = std::nullopt)
      : std::invalid_argument(what), index_(index) {}
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Backtracking exhausted its per-iteration reduction budget.
class StallError : public std::runtime_error {
 public:
  StallError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace sagopt
