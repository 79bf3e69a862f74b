#include "coherence/error.hpp"

namespace coherence {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Indeterminate: return "Indeterminate";
        case ErrorKind::ZeroFunction: return "ZeroFunction";
        case ErrorKind::DegreeZero: return "DegreeZero";
        case ErrorKind::Improper: return "Improper";
        case ErrorKind::SelfLoop: return "SelfLoop";
        case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorKind::NodeOutOfRange: return "NodeOutOfRange";
        case ErrorKind::NonPositiveAlpha: return "NonPositiveAlpha";
        case ErrorKind::TooFewNodes: return "TooFewNodes";
        case ErrorKind::Disconnected: return "Disconnected";
        case ErrorKind::InvalidNetwork: return "InvalidNetwork";
        case ErrorKind::SingularAtS: return "SingularAtS";
        case ErrorKind::NodeZeroAtS: return "NodeZeroAtS";
        case ErrorKind::CoherentPoleAtS: return "CoherentPoleAtS";
        case ErrorKind::InvalidMajorants: return "InvalidMajorants";
        case ErrorKind::PreconditionNotMet: return "PreconditionNotMet";
        case ErrorKind::RegionContainsSingularity: return "RegionContainsSingularity";
        case ErrorKind::NotIncreasing: return "NotIncreasing";
        case ErrorKind::NotAPoleOfF: return "NotAPoleOfF";
        case ErrorKind::AlgebraicLoopSingular: return "AlgebraicLoopSingular";
        case ErrorKind::UnstableModel: return "UnstableModel";
        case ErrorKind::MissingReference: return "MissingReference";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::NotAffine: return "NotAffine";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ConfigParse: return "ConfigParse";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace coherence
