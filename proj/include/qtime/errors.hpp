#pragma once

#include <stdexcept>
#include <string>

namespace qtime {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Solver did not reach its tolerance; carries the achieved residual.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& msg, double residual)
      : Error(msg + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

// A validated object violated one of its invariants; carries the measured defect.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& msg, double defect)
      : Error(msg + " (defect " + std::to_string(defect) + ")"), defect_(defect) {}
  double defect() const { return defect_; }

 private:
  double defect_ = 0.0;
};

class PovmError : public Error {
 public:
  using Error::Error;
};

class NotSameChannelError : public Error {
 public:
  using Error::Error;
};

class CertificateError : public Error {
 public:
  CertificateError(const std::string& stage, double residual)
      : Error("certificate failure at stage '" + stage + "' (residual " +
              std::to_string(residual) + ")"),
        stage_(stage),
        residual_(residual) {}
  const std::string& stage() const { return stage_; }
  double residual() const { return residual_; }

 private:
  std::string stage_;
  double residual_ = 0.0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_ = 0;
};

}  // namespace qtime
