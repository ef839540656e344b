#ifndef NHPP_ERRORS_HPP
#define NHPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nhpp {

// Bad user input: malformed files, out-of-domain parameters, mismatched shapes.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failures.
class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (series non-convergence, overflow).
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Resource limits that the caller can raise explicitly (e.g. Dahl cell cap).
class capacity_error : public std::runtime_error {
 public:
  explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nhpp

#endif
