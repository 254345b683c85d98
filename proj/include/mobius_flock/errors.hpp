#pragma once

#include <stdexcept>
#include <string>

namespace mobius_flock {

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define MOBIUS_FLOCK_ERROR(Name)                                       \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name, what) {}     \
  }

// geometry
MOBIUS_FLOCK_ERROR(ConcentricCircles);
MOBIUS_FLOCK_ERROR(GeometryViolation);
MOBIUS_FLOCK_ERROR(IntersectingCircles);
MOBIUS_FLOCK_ERROR(DegenerateRoot);
MOBIUS_FLOCK_ERROR(Singularity);

// graph
MOBIUS_FLOCK_ERROR(Disconnected);
MOBIUS_FLOCK_ERROR(SelfLoop);
MOBIUS_FLOCK_ERROR(DuplicateEdge);
MOBIUS_FLOCK_ERROR(NotCirculant);
MOBIUS_FLOCK_ERROR(InvalidGraph);

// control / sim
MOBIUS_FLOCK_ERROR(BarrierViolation);
MOBIUS_FLOCK_ERROR(WrongGainSign);
MOBIUS_FLOCK_ERROR(InvalidGains);
MOBIUS_FLOCK_ERROR(InfeasibleInitialConditions);
MOBIUS_FLOCK_ERROR(NonFiniteState);
MOBIUS_FLOCK_ERROR(StepBudgetExceeded);
MOBIUS_FLOCK_ERROR(InvalidConfig);

#undef MOBIUS_FLOCK_ERROR

}  // namespace mobius_flock
