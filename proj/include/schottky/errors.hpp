#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace schottky {

struct Error : std::runtime_error {
    Error(std::string code_, const std::string& what_)
        : std::runtime_error(code_ + ": " + what_), code(std::move(code_)) {}
    std::string code;
};

#define SCHOTTKY_DEFINE_ERROR(Name)                                            \
    struct Name : Error {                                                      \
        explicit Name(const std::string& what_) : Error(#Name, what_) {}       \
    }

SCHOTTKY_DEFINE_ERROR(PoleAtZ);
SCHOTTKY_DEFINE_ERROR(ParabolicOrIdentity);
SCHOTTKY_DEFINE_ERROR(NotLoxodromic);
SCHOTTKY_DEFINE_ERROR(CapacityExceeded);
SCHOTTKY_DEFINE_ERROR(SingularGroupElement);
SCHOTTKY_DEFINE_ERROR(NearPole);
SCHOTTKY_DEFINE_ERROR(ConvergenceCriterionViolated);
SCHOTTKY_DEFINE_ERROR(TailNotMet);
SCHOTTKY_DEFINE_ERROR(NotConverged);
SCHOTTKY_DEFINE_ERROR(PoleCollision);
SCHOTTKY_DEFINE_ERROR(LeavesFundamentalDomain);
SCHOTTKY_DEFINE_ERROR(DerivativeUnavailable);
SCHOTTKY_DEFINE_ERROR(IndexOutOfRange);
SCHOTTKY_DEFINE_ERROR(ConfigParseError);

#undef SCHOTTKY_DEFINE_ERROR

}  // namespace schottky
