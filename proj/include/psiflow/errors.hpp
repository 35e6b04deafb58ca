#pragma once

#include <stdexcept>
#include <string>

namespace psiflow {

// Common base so callers can catch everything from this library at once.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// density
class EvalAtSingularity : public Error {
 public:
  explicit EvalAtSingularity(const std::string& msg) : Error(msg) {}
};
class NotMinimalRadius : public Error {
 public:
  explicit NotMinimalRadius(const std::string& msg) : Error(msg) {}
};

// curve
class DegenerateRadius : public Error {
 public:
  explicit DegenerateRadius(const std::string& msg) : Error(msg) {}
};
class SingularProximity : public Error {
 public:
  explicit SingularProximity(const std::string& msg) : Error(msg) {}
};
class WindingInconsistency : public Error {
 public:
  explicit WindingInconsistency(const std::string& msg) : Error(msg) {}
};
class InvalidCurve : public Error {
 public:
  explicit InvalidCurve(const std::string& msg) : Error(msg) {}
};

// flow
class StepRejectedRepeatedly : public Error {
 public:
  explicit StepRejectedRepeatedly(const std::string& msg) : Error(msg) {}
};
class SelfIntersection : public Error {
 public:
  explicit SelfIntersection(const std::string& msg) : Error(msg) {}
};
class NoCollapseDetected : public Error {
 public:
  explicit NoCollapseDetected(const std::string& msg) : Error(msg) {}
};

// circle ODE
class NoClosedForm : public Error {
 public:
  explicit NoClosedForm(const std::string& msg) : Error(msg) {}
};
class BlowUp : public Error {
 public:
  explicit BlowUp(const std::string& msg) : Error(msg) {}
};

// analysis
class TimeOutOfDomain : public Error {
 public:
  explicit TimeOutOfDomain(const std::string& msg) : Error(msg) {}
};
class NotGlobalCase : public Error {
 public:
  explicit NotGlobalCase(const std::string& msg) : Error(msg) {}
};

// io
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace psiflow
