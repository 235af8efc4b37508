#include "mmm/contribution.hpp"

#include <algorithm>
#include <sstream>

#include "mmm/error.hpp"

namespace mmm {

namespace {

// Canonical text form of a payload, used only to break ties when merging
// same-id contributions whose payloads diverged. Not a wire format.
std::string payloadKey(const Payload& p) {
    std::ostringstream os;
    if (std::holds_alternative<VertexPayload>(p)) {
        os << "v";
    } else if (const auto* a = std::get_if<AdirEdgePayload>(&p)) {
        os << "a:" << a->a.hex() << ":" << a->b.hex();
    } else if (const auto* u = std::get_if<UnidirEdgePayload>(&p)) {
        os << "u:" << u->from.hex() << ":" << u->to.hex();
    } else if (const auto* b = std::get_if<BidirEdgePayload>(&p)) {
        os << "b:" << b->from.hex() << ":" << b->to.hex() << ":" << b->labelFwd << ":"
           << b->labelBwd;
        for (const auto& t : b->tagsFwd)
            os << ":" << t;
        os << "/";
        for (const auto& t : b->tagsBwd)
            os << ":" << t;
    } else if (const auto* pen = std::get_if<PenPayload>(&p)) {
        os << "p";
        for (const auto& m : pen->contents)
            os << ":" << m.hex();
    }
    return os.str();
}

Kind payloadKind(const Payload& p) {
    if (std::holds_alternative<VertexPayload>(p))
        return Kind::Vertex;
    if (std::holds_alternative<AdirEdgePayload>(p))
        return Kind::AdirectionalEdge;
    if (std::holds_alternative<UnidirEdgePayload>(p))
        return Kind::UnidirectionalEdge;
    if (std::holds_alternative<BidirEdgePayload>(p))
        return Kind::BidirectionalEdge;
    return Kind::Pen;
}

void requireMutableMainAttributes(const Contribution& c, const char* what) {
    throwIf(c.status.isPublic(), Errc::ImmutablePublicField, what);
}

} // namespace

std::vector<LandmarkId> Contribution::endpoints() const {
    if (const auto* a = std::get_if<AdirEdgePayload>(&payload))
        return {a->a, a->b};
    if (const auto* u = std::get_if<UnidirEdgePayload>(&payload))
        return {u->from, u->to};
    if (const auto* b = std::get_if<BidirEdgePayload>(&payload))
        return {b->from, b->to};
    return {};
}

void validateTag(const std::string& tag) {
    throwIf(tag.size() < 2 || tag[0] != '@', Errc::InvalidTag, tag);
}

void validateContribution(const Contribution& c) {
    throwIf(c.id.isPit(), Errc::InvariantViolation, "the all-zero id belongs to the pit");
    throwIf(payloadKind(c.payload) != c.kind(), Errc::InvariantViolation,
            "payload does not match the concrete type's kind");
    if (c.isVertex())
        throwIf(c.label.empty(), Errc::EmptyVertexLabel, "vertex labels cannot be empty");
    for (const auto& t : c.tags)
        validateTag(t);
    if (const auto* b = std::get_if<BidirEdgePayload>(&c.payload)) {
        for (const auto& t : b->tagsFwd)
            validateTag(t);
        for (const auto& t : b->tagsBwd)
            validateTag(t);
    }
    // An edge may loop a landmark to itself, but can never be its own endpoint.
    auto eps = c.endpoints();
    throwIf(std::find(eps.begin(), eps.end(), c.id) != eps.end(), Errc::SelfEndpoint,
            "an edge cannot be its own endpoint");
    for (const auto& a : c.authorships)
        throwIf(a.authors.empty(), Errc::InvariantViolation, "authorship without authors");
    if (const auto* pen = std::get_if<PenPayload>(&c.payload))
        throwIf(pen->contents.count(c.id) > 0, Errc::InvariantViolation,
                "a pen cannot contain itself");
    for (const auto& m : c.marks)
        validateMark(m);
}

Contribution makeVertex(LandmarkId id, std::string label, ConcreteType ctype,
                        std::set<std::string> tags, Authorship auth, std::int64_t timestamp) {
    throwIf(!isVertexType(ctype), Errc::KindMismatch, "not a vertex type");
    throwIf(label.empty(), Errc::EmptyVertexLabel, "vertex labels cannot be empty");
    Contribution c;
    c.id = id;
    c.label = std::move(label);
    c.tags = std::move(tags);
    c.ctype = ctype;
    c.payload = VertexPayload{};
    c.authorships = {std::move(auth)};
    c.status = Status::local();
    c.timestamp = timestamp;
    validateContribution(c);
    return c;
}

Contribution makeEdge(LandmarkId id, ConcreteType ctype, LandmarkId from, LandmarkId to,
                      std::string label, std::set<std::string> tags, Authorship auth,
                      std::int64_t timestamp) {
    auto k = kindOf(ctype);
    throwIf(k != Kind::AdirectionalEdge && k != Kind::UnidirectionalEdge, Errc::KindMismatch,
            "not an adirectional/unidirectional edge type");
    Contribution c;
    c.id = id;
    c.label = std::move(label);
    c.tags = std::move(tags);
    c.ctype = ctype;
    if (k == Kind::AdirectionalEdge)
        c.payload = AdirEdgePayload{std::min(from, to), std::max(from, to)};
    else
        c.payload = UnidirEdgePayload{from, to};
    c.authorships = {std::move(auth)};
    c.status = Status::local();
    c.timestamp = timestamp;
    validateContribution(c);
    return c;
}

Contribution makeBidirEdge(LandmarkId id, ConcreteType ctype, LandmarkId from, LandmarkId to,
                           std::string mainLabel, std::string labelFwd, std::string labelBwd,
                           std::set<std::string> tags, std::set<std::string> tagsFwd,
                           std::set<std::string> tagsBwd, Authorship auth,
                           std::int64_t timestamp) {
    throwIf(kindOf(ctype) != Kind::BidirectionalEdge, Errc::KindMismatch,
            "not a bidirectional edge type");
    Contribution c;
    c.id = id;
    c.label = std::move(mainLabel);
    c.tags = std::move(tags);
    c.ctype = ctype;
    c.payload = BidirEdgePayload{from, to, std::move(labelFwd), std::move(labelBwd),
                                 std::move(tagsFwd), std::move(tagsBwd)};
    c.authorships = {std::move(auth)};
    c.status = Status::local();
    c.timestamp = timestamp;
    validateContribution(c);
    return c;
}

Contribution makePen(LandmarkId id, ConcreteType ctype, std::string label,
                     std::set<LandmarkId> contents, std::set<std::string> tags, Authorship auth,
                     std::int64_t timestamp) {
    throwIf(!isPenType(ctype), Errc::KindMismatch, "not a pen type");
    Contribution c;
    c.id = id;
    c.label = std::move(label);
    c.tags = std::move(tags);
    c.ctype = ctype;
    c.payload = PenPayload{std::move(contents)};
    c.authorships = {std::move(auth)};
    c.status = Status::local();
    c.timestamp = timestamp;
    validateContribution(c);
    return c;
}

bool contributionLeq(const Contribution& c, const Contribution& cp,
                     const ContractResolver& resolver) {
    if (!(c.id <= cp.id))
        return false;
    if (c.label != cp.label || c.ctype != cp.ctype)
        return false;
    if (!std::includes(cp.tags.begin(), cp.tags.end(), c.tags.begin(), c.tags.end()))
        return false;
    if (!std::includes(cp.authorships.begin(), cp.authorships.end(), c.authorships.begin(),
                       c.authorships.end()))
        return false;
    return statusLeq(c.status, cp.status, resolver);
}

bool mergeable(const Contribution& c, const Contribution& cp) {
    if (c.isPen() && cp.isPen())
        return c.ctype == cp.ctype;
    return c.label == cp.label && c.ctype == cp.ctype;
}

Contribution mergeContribution(const Contribution& c, const Contribution& cp,
                               const ContractResolver& resolver,
                               const std::function<void(const ShareContract&)>& onNewContract) {
    throwIf(!mergeable(c, cp), Errc::MergeMismatch,
            "merge requires equal label and type, or two pens of one type");
    // Survivor selection: larger id wins; same-id divergence (legal for
    // private attribute edits) breaks ties on label then canonical payload,
    // keeping the fold associative.
    auto key = [](const Contribution& x) {
        return std::make_tuple(x.id, x.label, payloadKey(x.payload));
    };
    const Contribution& s = key(cp) >= key(c) ? cp : c;
    const Contribution& o = (&s == &cp) ? c : cp;

    Contribution out;
    out.id = s.id;
    out.label = s.label;
    out.ctype = s.ctype;
    if (const auto* sp = std::get_if<PenPayload>(&s.payload)) {
        PenPayload joined = *sp;
        if (const auto* op = std::get_if<PenPayload>(&o.payload))
            joined.contents.insert(op->contents.begin(), op->contents.end());
        out.payload = std::move(joined);
    } else {
        out.payload = s.payload;
    }
    out.tags = s.tags;
    out.tags.insert(o.tags.begin(), o.tags.end());
    out.authorships = s.authorships;
    out.authorships.insert(o.authorships.begin(), o.authorships.end());
    out.status = statusJoin(c.status, cp.status, resolver, onNewContract);
    out.marks = mergeMarks(c.marks, cp.marks);
    out.timestamp = std::min(c.timestamp, cp.timestamp);
    return out;
}

namespace edit {

void addTag(Contribution& c, const std::string& tag) {
    validateTag(tag);
    c.tags.insert(tag);
}

void removeTag(Contribution& c, const std::string& tag) {
    requireMutableMainAttributes(c, "cannot remove a tag from a public contribution");
    throwIf(c.tags.erase(tag) == 0, Errc::NotFound, "tag not present: " + tag);
}

void addAuthorship(Contribution& c, Authorship a) {
    throwIf(a.authors.empty(), Errc::InvariantViolation, "authorship without authors");
    c.authorships.insert(std::move(a));
}

void removeAuthorship(Contribution& c, const Authorship& a) {
    requireMutableMainAttributes(c, "cannot remove an authorship from a public contribution");
    throwIf(c.authorships.erase(a) == 0, Errc::NotFound, "authorship not present");
}

void addAuthorToAuthorship(Contribution& c, const Authorship& which, const std::string& author) {
    requireMutableMainAttributes(c, "cannot grow an authorship list of a public contribution");
    auto it = c.authorships.find(which);
    throwIf(it == c.authorships.end(), Errc::NotFound, "authorship not present");
    Authorship grown = *it;
    grown.authors.insert(author);
    c.authorships.erase(it);
    c.authorships.insert(std::move(grown));
}

void setLabel(Contribution& c, std::string label) {
    requireMutableMainAttributes(c, "public labels are immutable");
    throwIf(c.isVertex() && label.empty(), Errc::EmptyVertexLabel,
            "vertex labels cannot be empty");
    c.label = std::move(label);
}

void setType(Contribution& c, ConcreteType t) {
    requireMutableMainAttributes(c, "public types are immutable");
    throwIf(kindOf(t) != c.kind(), Errc::KindMismatch,
            "a type change cannot alter the landmark kind");
    c.ctype = t;
}

void setEndpoints(Contribution& c, LandmarkId from, LandmarkId to) {
    requireMutableMainAttributes(c, "public edge endpoints are immutable");
    throwIf(!c.isEdge(), Errc::KindMismatch, "only edges have endpoints");
    if (auto* a = std::get_if<AdirEdgePayload>(&c.payload)) {
        a->a = std::min(from, to);
        a->b = std::max(from, to);
    } else if (auto* u = std::get_if<UnidirEdgePayload>(&c.payload)) {
        u->from = from;
        u->to = to;
    } else if (auto* b = std::get_if<BidirEdgePayload>(&c.payload)) {
        b->from = from;
        b->to = to;
    }
    validateContribution(c);
}

void setMark(Contribution& c, Mark m) {
    validateMark(m);
    c.marks.insert(std::move(m));
}

void removeMark(Contribution& c, const Mark& m) { c.marks.erase(m); }

void removeMarksNamed(Contribution& c, const std::string& name) {
    for (auto it = c.marks.begin(); it != c.marks.end();) {
        if (it->name == name)
            it = c.marks.erase(it);
        else
            ++it;
    }
}

void upgradeStatus(Contribution& c, const Status& target, const ContractResolver& resolver) {
    throwIf(target == c.status, Errc::NotDistinct, "status unchanged");
    throwIf(!statusLeq(c.status, target, resolver), Errc::StatusDowngrade,
            "status may only move towards public");
    c.status = target;
}

void changeId(Contribution&, const LandmarkId&) {
    throw Error(Errc::IdImmutable, "contribution identifiers never change");
}

} // namespace edit

} // namespace mmm
