#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ridge {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

// Array sizes that disagree with the grid.
class ShapeError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

// Input violates a documented precondition (e.g. inadmissible field).
class PreconditionError : public Error {
public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

// Configuration rejected; carries every violation found, not only the first.
class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const char* kind() const noexcept override { return "validation"; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline void require_shape(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

}  // namespace detail
}  // namespace ridge
