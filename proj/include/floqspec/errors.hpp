#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace floqspec {

inline std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: names the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(double time, const std::string& message)
      : Error("integration failed at t = " + format_number(time) + ": " + message),
        time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NonDiagonalizableError : public Error {
 public:
  explicit NonDiagonalizableError(double condition)
      : Error("non-diagonalizable monodromy: eigenvector condition number " +
              format_number(condition)),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

class UnstableSystemError : public Error {
 public:
  UnstableSystemError(double growth_rate, const std::string& message)
      : Error(message), growth_rate_(growth_rate) {}
  double growth_rate() const noexcept { return growth_rate_; }

 private:
  double growth_rate_;
};

class ResonantDenominatorError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(double estimate, const std::string& message)
      : Error(message + " (achieved error estimate " + format_number(estimate) + ")"),
        estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace floqspec
