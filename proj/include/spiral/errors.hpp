#pragma once

#include <stdexcept>
#include <string>

namespace spiral {

// Base of every error the library raises on purpose. `kind()` is the stable
// name written into machine-readable error records.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
  virtual const char* kind() const noexcept { return "Error"; }
};

#define SPIRAL_ERROR(Name)                                              \
  class Name : public Error {                                           \
   public:                                                              \
    using Error::Error;                                                 \
    const char* kind() const noexcept override { return #Name; }        \
  }

SPIRAL_ERROR(NonConvergence);
SPIRAL_ERROR(InvalidOrder);
SPIRAL_ERROR(InvalidMatrix);
SPIRAL_ERROR(InvalidTraces);
SPIRAL_ERROR(SingularSystem);
SPIRAL_ERROR(TruncationTooSmall);
SPIRAL_ERROR(CurveLost);
SPIRAL_ERROR(DomainError);
SPIRAL_ERROR(UnclassifiedPoint);
SPIRAL_ERROR(InsufficientDecades);
SPIRAL_ERROR(PreconditionFailed);
SPIRAL_ERROR(ConfigError);

#undef SPIRAL_ERROR

class ResonantMode : public Error {
 public:
  ResonantMode(int k, const std::string& msg) : Error(msg), k_(k) {}
  const char* kind() const noexcept override { return "ResonantMode"; }
  int index() const noexcept { return k_; }

 private:
  int k_;
};

// A zero of the profile lies on the ray {tλ : t > 0}.
class RayBlocked : public Error {
 public:
  RayBlocked(double t, const std::string& msg) : Error(msg), t_(t) {}
  const char* kind() const noexcept override { return "RayBlocked"; }
  double t() const noexcept { return t_; }

 private:
  double t_;
};

}  // namespace spiral
