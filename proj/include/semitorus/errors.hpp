#pragma once

#include <stdexcept>
#include <string>

namespace semitorus {

// Base class so callers can catch everything the library throws in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Grid cannot represent the requested object (aliasing, window, Nyquist).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Exponent inequalities violated. `inequality` names the one that failed.
class FeasibilityError : public Error {
 public:
  FeasibilityError(std::string inequality, const std::string& what)
      : Error(what), inequality_(std::move(inequality)) {}
  const std::string& inequality() const { return inequality_; }

 private:
  std::string inequality_;
};

// Numerical stage failed; `stage` is a short tag such as "caustic" or "eigensolve".
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace semitorus
