#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vt25 {

// Bad input: malformed files, out-of-range parameters, inconsistent
// geometry. The CLI maps these to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, int line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class DomainTooSmallError : public ValidationError {
 public:
  DomainTooSmallError(int required_nx, int required_ny, int nx, int ny)
      : ValidationError("tube does not fit in a " + std::to_string(nx) + "x" + std::to_string(ny) +
                        " grid; required nx >= " + std::to_string(required_nx) +
                        ", ny >= " + std::to_string(required_ny)),
        required_nx_(required_nx),
        required_ny_(required_ny) {}
  int required_nx() const noexcept { return required_nx_; }
  int required_ny() const noexcept { return required_ny_; }

 private:
  int required_nx_;
  int required_ny_;
};

// Failures while the simulation is running. Exit status 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivergenceError : public RuntimeError {
 public:
  explicit DivergenceError(std::int64_t step)
      : RuntimeError("non-finite field value detected at step " + std::to_string(step)),
        step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

class NotImplementedError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace vt25
