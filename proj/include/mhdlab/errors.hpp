#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mhdlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two fields (or a field and a kernel) live on different grids.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A mollifier scale below what the grid can represent.
class UnderResolvedKernel : public Error {
 public:
  using Error::Error;
};

/// An argument outside the domain where the operation is defined
/// (p < 1, gamma outside [0, 2], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Ratio with a vanishing denominator.
class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

/// Picard iteration exhausted its budget; carries the iterate distances.
class PicardDivergence : public Error {
 public:
  PicardDivergence(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Smallness condition of a conditional bound is not met.
class ConditionNotMet : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Schema validation failure; one entry per offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid config:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace mhdlab
