// The contribution: an atomic, typed, authored landmark. Vertices, edges
// (adirectional, unidirectional, bidirectional), and pens share the same
// attribute frame and differ by payload.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mmm/ids.hpp"
#include "mmm/marks.hpp"
#include "mmm/status.hpp"
#include "mmm/types.hpp"

namespace mmm {

struct Authorship {
    std::set<std::string> authors; // non-empty
    std::string date;              // ISO-8601 calendar date, e.g. "2026-08-16"

    auto operator<=>(const Authorship&) const = default;
};

struct VertexPayload {
    auto operator<=>(const VertexPayload&) const = default;
};

// Unordered endpoint pair, stored sorted.
struct AdirEdgePayload {
    LandmarkId a, b;
    auto operator<=>(const AdirEdgePayload&) const = default;
};

struct UnidirEdgePayload {
    LandmarkId from, to;
    auto operator<=>(const UnidirEdgePayload&) const = default;
};

// Seven-component edge: endpoints, main label (on Contribution), one label
// and one tag set per direction. One, two or all three labels may be empty.
struct BidirEdgePayload {
    LandmarkId from, to;
    std::string labelFwd, labelBwd;
    std::set<std::string> tagsFwd, tagsBwd;
    auto operator<=>(const BidirEdgePayload&) const = default;
};

struct PenPayload {
    std::set<LandmarkId> contents;
    auto operator<=>(const PenPayload&) const = default;
};

using Payload =
    std::variant<VertexPayload, AdirEdgePayload, UnidirEdgePayload, BidirEdgePayload, PenPayload>;

// Maximum nesting of edges whose endpoints are themselves edges.
inline constexpr int kEdgeDepthCap = 8;

struct Contribution {
    LandmarkId id;
    std::string label; // markdown allowed; non-empty for vertices
    std::set<std::string> tags;
    ConcreteType ctype = ConcreteType::Narrative;
    Payload payload;
    std::set<Authorship> authorships;
    Status status;
    MarkSet marks;
    std::int64_t timestamp = 0; // first-encounter instant (ms or sim tick)

    bool operator==(const Contribution&) const = default;

    Kind kind() const { return kindOf(ctype); }
    bool isEdge() const { return isEdgeKind(kind()); }
    bool isPen() const { return kind() == Kind::Pen; }
    bool isVertex() const { return kind() == Kind::Vertex; }

    ContentKey contentKey() const { return makeContentKey(label, typeName(ctype)); }

    // Endpoint ids for edges (empty for vertices and pens).
    std::vector<LandmarkId> endpoints() const;

    const PenPayload* pen() const { return std::get_if<PenPayload>(&payload); }
    PenPayload* pen() { return std::get_if<PenPayload>(&payload); }

    bool hasTag(const std::string& t) const { return tags.count(t) > 0; }
    bool isObsolete() const { return hasMark(marks, "obsolete"); }
    bool isRefrigerated() const { return hasMark(marks, "refrigerated"); }
};

// --- validation -------------------------------------------------------------
void validateTag(const std::string& tag);             // '@' prefix, non-empty rest
void validateContribution(const Contribution& c);     // context-free invariants

// --- constructors -----------------------------------------------------------
// All constructors validate and return a Local-status contribution.

Contribution makeVertex(LandmarkId id, std::string label, ConcreteType ctype,
                        std::set<std::string> tags, Authorship auth, std::int64_t timestamp);

// Adirectional and unidirectional edges. For adirectional types the endpoint
// pair is unordered; it is stored sorted.
Contribution makeEdge(LandmarkId id, ConcreteType ctype, LandmarkId from, LandmarkId to,
                      std::string label, std::set<std::string> tags, Authorship auth,
                      std::int64_t timestamp);

Contribution makeBidirEdge(LandmarkId id, ConcreteType ctype, LandmarkId from, LandmarkId to,
                           std::string mainLabel, std::string labelFwd, std::string labelBwd,
                           std::set<std::string> tags, std::set<std::string> tagsFwd,
                           std::set<std::string> tagsBwd, Authorship auth, std::int64_t timestamp);

Contribution makePen(LandmarkId id, ConcreteType ctype, std::string label,
                     std::set<LandmarkId> contents, std::set<std::string> tags, Authorship auth,
                     std::int64_t timestamp);

// --- orders and merge -------------------------------------------------------

// c ⪯ c': id ≤, same label, tag subset, same type, authorship subset,
// status ≤. Payload, marks and timestamp do not participate.
bool contributionLeq(const Contribution& c, const Contribution& cp,
                     const ContractResolver& resolver = nullContractResolver());

// Join of two contributions sharing label+type, or of two pens of the same
// concrete type (whose contents are unioned and whose labels may differ).
// Commutative, associative, idempotent; the least upper bound under ⪯.
// Throws MergeMismatch otherwise.
Contribution mergeContribution(const Contribution& c, const Contribution& cp,
                               const ContractResolver& resolver = nullContractResolver(),
                               const std::function<void(const ShareContract&)>& onNewContract = {});

// True when the pair is accepted by mergeContribution.
bool mergeable(const Contribution& c, const Contribution& cp);

// --- attribute editors ------------------------------------------------------
// Pure mutators enforcing the status permission matrix: on a Public
// contribution the label, type, endpoints, tag removal and authorship
// shrinking are immutable; additions of tags/authorships and all mark
// edits stay legal. Throwers: ImmutablePublicField, StatusDowngrade,
// IdImmutable, KindMismatch, EmptyVertexLabel, InvalidTag, NotDistinct.
namespace edit {

void addTag(Contribution& c, const std::string& tag);
void removeTag(Contribution& c, const std::string& tag);
void addAuthorship(Contribution& c, Authorship a);
void removeAuthorship(Contribution& c, const Authorship& a);
void addAuthorToAuthorship(Contribution& c, const Authorship& which, const std::string& author);
void setLabel(Contribution& c, std::string label);
void setType(Contribution& c, ConcreteType t);
void setEndpoints(Contribution& c, LandmarkId from, LandmarkId to);
void setMark(Contribution& c, Mark m);
void removeMark(Contribution& c, const Mark& m);
void removeMarksNamed(Contribution& c, const std::string& name);
void upgradeStatus(Contribution& c, const Status& target,
                   const ContractResolver& resolver = nullContractResolver());
void changeId(Contribution& c, const LandmarkId& id); // always throws IdImmutable

} // namespace edit

} // namespace mmm
