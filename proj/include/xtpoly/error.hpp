#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace xtpoly {

/// Invalid physical parameters (densities, moduli, porosity, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Mesh topology or geometry violates a PolyMesh invariant.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or more configuration fields are invalid. Every violation is listed.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}
  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& i : v) s += "\n  - " + i;
    return s;
  }
  std::vector<std::string> issues_;
};

/// Linear solver failure (singular matrix, dimension mismatch, ...).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state detected during time stepping.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, int slab)
      : std::runtime_error(what + " (slab " + std::to_string(slab) + ")"), slab_(slab) {}
  int slab() const noexcept { return slab_; }

 private:
  int slab_;
};

}  // namespace xtpoly
