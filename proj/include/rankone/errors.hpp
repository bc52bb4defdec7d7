#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

/// An argument violates a documented precondition. `constraint()` names the
/// violated condition so reports and the CLI can echo it.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string constraint, const std::string& what)
      : std::invalid_argument(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const { return constraint_; }

 private:
  std::string constraint_;
};

/// An iterative procedure stopped before reaching its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

inline void require(bool ok, const char* constraint, const std::string& what) {
  if (!ok) throw PreconditionError(constraint, what);
}

}  // namespace rankone
