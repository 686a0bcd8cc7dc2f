#ifndef ROBIN_ERRORS_HPP
#define ROBIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace robin {

// Invalid geometry / experiment configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class MeshError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation
// (non-positive coefficients, asymmetric input, dimension mismatch).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Raised by the sparse factorization when a pivot is not strictly positive.
// pivot() is the 0-based row of the input matrix at which elimination broke.
class NotPositiveDefinite : public std::runtime_error {
public:
  explicit NotPositiveDefinite(long pivot)
      : std::runtime_error("matrix is not positive definite (pivot at row " +
                           std::to_string(pivot + 1) + ")"),
        pivot_(pivot) {}

  long pivot() const noexcept { return pivot_; }

private:
  long pivot_;
};

}  // namespace robin

#endif  // ROBIN_ERRORS_HPP
