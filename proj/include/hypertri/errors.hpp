#ifndef HYPERTRI_ERRORS_HPP
#define HYPERTRI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hypertri {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A point (t, x, xi) of the evaluation domain, attached to failures.
struct Witness {
  double t = 0.0;
  double x = 0.0;
  double xi = 0.0;
};

std::string to_string(const Witness& w);

class EvaluationError : public Error {
public:
  EvaluationError(const std::string& what, Witness where)
      : Error(what + " at " + to_string(where)), where_(where) {}
  const Witness& where() const noexcept { return where_; }

private:
  Witness where_;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// No eigenvector component stays away from zero on the shell |xi| >= M.
class ConditionFailure : public Error {
public:
  ConditionFailure(const std::string& what, Witness where, double min_modulus, int step = 0)
      : Error(what + " (min modulus " + std::to_string(min_modulus) + " at " + to_string(where) +
              (step > 0 ? ", step " + std::to_string(step) : std::string()) + ")"),
        where_(where), min_modulus_(min_modulus), step_(step) {}
  const Witness& where() const noexcept { return where_; }
  double min_modulus() const noexcept { return min_modulus_; }
  int step() const noexcept { return step_; }

private:
  Witness where_;
  double min_modulus_;
  int step_;
};

class BadEigenpair : public Error {
public:
  BadEigenpair(const std::string& what, Witness where, double residual, int step = 0)
      : Error(what + " (residual " + std::to_string(residual) + " at " + to_string(where) +
              (step > 0 ? ", step " + std::to_string(step) : std::string()) + ")"),
        where_(where), residual_(residual), step_(step) {}
  const Witness& where() const noexcept { return where_; }
  double residual() const noexcept { return residual_; }
  int step() const noexcept { return step_; }

private:
  Witness where_;
  double residual_;
  int step_;
};

class ContinuationError : public Error {
public:
  using Error::Error;
};

/// Explicit time stepping left its stability region or produced non-finite values.
class InstabilityError : public Error {
public:
  InstabilityError(const std::string& what, double t, double cfl)
      : Error(what + " (t = " + std::to_string(t) + ", dt*max|lambda+b| = " + std::to_string(cfl) + ")"),
        t_(t), cfl_(cfl) {}
  double time() const noexcept { return t_; }
  double cfl() const noexcept { return cfl_; }

private:
  double t_;
  double cfl_;
};

class NotXIndependent : public Error {
public:
  using Error::Error;
};

class NotContractive : public Error {
public:
  NotContractive(const std::string& what, double rho)
      : Error(what + " (rho = " + std::to_string(rho) + ")"), rho_(rho) {}
  double rho() const noexcept { return rho_; }

private:
  double rho_;
};

class SolveFailure : public Error {
public:
  using Error::Error;
};

class DegenerateData : public Error {
public:
  using Error::Error;
};

/// A required input file does not exist or cannot be read.
class MissingFile : public Error {
public:
  using Error::Error;
};

/// Syntax or schema error in an expression or scenario file.
class ParseError : public Error {
public:
  using Error::Error;
};

} // namespace hypertri

#endif
