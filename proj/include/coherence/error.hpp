#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coherence {

enum class ErrorKind {
    // ratfun
    Indeterminate,
    ZeroFunction,
    DegreeZero,
    Improper,
    // graph
    SelfLoop,
    NonPositiveWeight,
    NodeOutOfRange,
    NonPositiveAlpha,
    TooFewNodes,
    Disconnected,
    // netfreq
    InvalidNetwork,
    SingularAtS,
    NodeZeroAtS,
    CoherentPoleAtS,
    InvalidMajorants,
    PreconditionNotMet,
    RegionContainsSingularity,
    NotIncreasing,
    NotAPoleOfF,
    // timedomain
    AlgebraicLoopSingular,
    UnstableModel,
    MissingReference,
    LengthMismatch,
    // ensemble
    InvalidDistribution,
    NotAffine,
    // plumbing
    InvalidArgument,
    ConfigParse,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

}  // namespace coherence
