// Domain error taxonomy. Every failure a caller can act on carries one of
// these codes; the CLI prints the code name verbatim and exits 2.
#pragma once

#include <stdexcept>
#include <string>

namespace mmm {

enum class Errc {
    // construction / validation
    EmptyVertexLabel,
    InvalidTag,
    PennedInTargetNotPen,
    SelfEndpoint,
    DepthCapExceeded,
    KindMismatch,
    UnknownType,
    InvariantViolation,
    Malformed,
    // orders, merging, mutation
    MergeMismatch,
    StatusDowngrade,
    IdImmutable,
    ImmutablePublicField,
    NotDistinct,
    DuplicateIdConflict,
    // store
    NotFound,
    TargetNotFound,
    SeqOutOfRange,
    DigestMismatch,
    AlreadyObsolete,
    // activities / explorer
    PatternArityError,
    MalformedQuery,
    NotInExtent,
    // sync
    ContractViolation,
    AnchorMissing,
    Expired,
    AlreadyPublic,
    // harness / cli
    UnknownScenario,
    TerritoryLocked,
    AmbiguousPrefix,
};

const char* errcName(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string detail = {})
        : std::runtime_error(detail.empty() ? std::string(errcName(code))
                                            : std::string(errcName(code)) + ": " + detail),
          code_(code) {}

    Errc code() const { return code_; }
    const char* name() const { return errcName(code_); }

private:
    Errc code_;
};

// Shorthand used throughout: throw_if(cond, Errc::NotFound, "...").
inline void throwIf(bool cond, Errc code, const std::string& detail = {}) {
    if (cond)
        throw Error(code, detail);
}

} // namespace mmm
