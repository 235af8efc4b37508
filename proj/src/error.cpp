#include "mmm/error.hpp"

namespace mmm {

const char* errcName(Errc c) {
    switch (c) {
    case Errc::EmptyVertexLabel: return "EmptyVertexLabel";
    case Errc::InvalidTag: return "InvalidTag";
    case Errc::PennedInTargetNotPen: return "PennedInTargetNotPen";
    case Errc::SelfEndpoint: return "SelfEndpoint";
    case Errc::DepthCapExceeded: return "DepthCapExceeded";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::UnknownType: return "UnknownType";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::Malformed: return "Malformed";
    case Errc::MergeMismatch: return "MergeMismatch";
    case Errc::StatusDowngrade: return "StatusDowngrade";
    case Errc::IdImmutable: return "IdImmutable";
    case Errc::ImmutablePublicField: return "ImmutablePublicField";
    case Errc::NotDistinct: return "NotDistinct";
    case Errc::DuplicateIdConflict: return "DuplicateIdConflict";
    case Errc::NotFound: return "NotFound";
    case Errc::TargetNotFound: return "TargetNotFound";
    case Errc::SeqOutOfRange: return "SeqOutOfRange";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::AlreadyObsolete: return "AlreadyObsolete";
    case Errc::PatternArityError: return "PatternArityError";
    case Errc::MalformedQuery: return "MalformedQuery";
    case Errc::NotInExtent: return "NotInExtent";
    case Errc::ContractViolation: return "ContractViolation";
    case Errc::AnchorMissing: return "AnchorMissing";
    case Errc::Expired: return "Expired";
    case Errc::AlreadyPublic: return "AlreadyPublic";
    case Errc::UnknownScenario: return "UnknownScenario";
    case Errc::TerritoryLocked: return "TerritoryLocked";
    case Errc::AmbiguousPrefix: return "AmbiguousPrefix";
    }
    return "UnknownError";
}

} // namespace mmm
