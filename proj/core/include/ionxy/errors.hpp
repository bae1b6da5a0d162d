#pragma once

#include <stdexcept>
#include <string>

namespace ionxy {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1 (numerical failure), except ConfigError which maps to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class UnstableChain : public Error {
 public:
  UnstableChain(const std::string& what, double margin) : Error(what), margin_(margin) {}
  /// Lowest transverse eigenvalue ω² in rad²/s² (≤ 0).
  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

class NoStablePoint : public Error {
 public:
  using Error::Error;
};

class ResonantDetuning : public Error {
 public:
  ResonantDetuning(const std::string& what, int mode) : Error(what), mode_(mode) {}
  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class StepUnderflow : public Error {
 public:
  StepUnderflow(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class BasisMismatch : public Error {
 public:
  using Error::Error;
};

class FitFailure : public Error {
 public:
  FitFailure(const std::string& what, double relative_residual)
      : Error(what), relative_residual_(relative_residual) {}
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  double relative_residual_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ionxy
