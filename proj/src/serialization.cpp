#include "mmm/serialization.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <vector>

#include "mmm/error.hpp"
#include "mmm/types.hpp"

using nlohmann::json;

namespace mmm {

namespace {

const json& need(const json& j, const char* key) {
    auto it = j.find(key);
    throwIf(it == j.end(), Errc::Malformed, std::string("missing field '") + key + "'");
    return *it;
}

std::string needString(const json& j, const char* key) {
    const json& v = need(j, key);
    throwIf(!v.is_string(), Errc::Malformed, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

const json& needObject(const json& j, const char* key) {
    const json& v = need(j, key);
    throwIf(!v.is_object(), Errc::Malformed, std::string("field '") + key + "' must be an object");
    return v;
}

const json& needArray(const json& j, const char* key) {
    const json& v = need(j, key);
    throwIf(!v.is_array(), Errc::Malformed, std::string("field '") + key + "' must be an array");
    return v;
}

std::int64_t needInt(const json& j, const char* key) {
    const json& v = need(j, key);
    throwIf(!v.is_number_integer(), Errc::Malformed,
            std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

bool needBool(const json& j, const char* key) {
    const json& v = need(j, key);
    throwIf(!v.is_boolean(), Errc::Malformed, std::string("field '") + key + "' must be a boolean");
    return v.get<bool>();
}

std::set<std::string> stringSet(const json& arr, const char* what) {
    std::set<std::string> out;
    for (const auto& e : arr) {
        throwIf(!e.is_string(), Errc::Malformed, std::string(what) + " entries must be strings");
        out.insert(e.get<std::string>());
    }
    return out;
}

json stringSetToJson(const std::set<std::string>& s) {
    json a = json::array();
    for (const auto& v : s)
        a.push_back(v);
    return a;
}

LandmarkId idField(const json& j, const char* key) {
    return LandmarkId::fromHex(needString(j, key));
}

} // namespace

// --- authorship -------------------------------------------------------------

json authorshipToJson(const Authorship& a) {
    return json{{"authors", stringSetToJson(a.authors)}, {"date", a.date}};
}

Authorship authorshipFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "authorship must be an object");
    Authorship a;
    a.authors = stringSet(needArray(j, "authors"), "authors");
    a.date = needString(j, "date");
    return a;
}

// --- status -----------------------------------------------------------------

json statusToJson(const Status& s) {
    switch (s.state) {
    case Status::State::Local:
        return json{{"state", "local"}};
    case Status::State::Public:
        return json{{"state", "public"}};
    case Status::State::SharedWith:
        return json{{"contract", s.contractRef},
                    {"groups", stringSetToJson(s.groups)},
                    {"state", "sharedWith"}};
    }
    throw Error(Errc::InvariantViolation, "unreachable status state");
}

Status statusFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "status must be an object");
    auto state = statusStateFromName(needString(j, "state"));
    if (state == Status::State::SharedWith)
        return Status::shared(stringSet(needArray(j, "groups"), "groups"),
                              needString(j, "contract"));
    throwIf(j.contains("groups") || j.contains("contract"), Errc::Malformed,
            "groups/contract only valid for sharedWith status");
    return state == Status::State::Public ? Status::pub() : Status::local();
}

// --- marks --------------------------------------------------------------------

json markToJson(const Mark& m) {
    return json{{"name", m.name}, {"params", m.params}};
}

Mark markFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "mark must be an object");
    Mark m;
    m.name = needString(j, "name");
    if (auto it = j.find("params"); it != j.end())
        m.params = *it;
    validateMark(m);
    return m;
}

// --- contracts ----------------------------------------------------------------

json contractToJson(const ShareContract& c) {
    json hosts = json::array();
    for (const auto& h : c.alternateHosts)
        hosts.push_back(h);
    json j{{"allowAddressDisclosure", c.allowAddressDisclosure},
           {"allowRepublish", c.allowRepublish},
           {"alternateHosts", hosts},
           {"contractId", c.contractId}};
    j["expiry"] = c.expiry ? json(*c.expiry) : json(nullptr);
    return j;
}

ShareContract contractFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "contract must be an object");
    ShareContract c;
    c.contractId = needString(j, "contractId");
    c.allowAddressDisclosure = needBool(j, "allowAddressDisclosure");
    c.allowRepublish = needBool(j, "allowRepublish");
    for (const auto& h : needArray(j, "alternateHosts")) {
        throwIf(!h.is_string(), Errc::Malformed, "alternateHosts entries must be strings");
        c.alternateHosts.push_back(h.get<std::string>());
    }
    if (auto it = j.find("expiry"); it != j.end() && !it->is_null()) {
        throwIf(!it->is_number_integer(), Errc::Malformed, "expiry must be an integer or null");
        c.expiry = it->get<std::int64_t>();
    }
    return c;
}

// --- contribution -------------------------------------------------------------

namespace {

json payloadToJson(const Contribution& c) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, VertexPayload>) {
                return json::object();
            } else if constexpr (std::is_same_v<T, AdirEdgePayload>) {
                auto lo = std::min(p.a, p.b), hi = std::max(p.a, p.b);
                return json{{"endpoints", json::array({lo.hex(), hi.hex()})}};
            } else if constexpr (std::is_same_v<T, UnidirEdgePayload>) {
                return json{{"from", p.from.hex()}, {"to", p.to.hex()}};
            } else if constexpr (std::is_same_v<T, BidirEdgePayload>) {
                return json{{"from", p.from.hex()},       {"labelBwd", p.labelBwd},
                            {"labelFwd", p.labelFwd},     {"tagsBwd", stringSetToJson(p.tagsBwd)},
                            {"tagsFwd", stringSetToJson(p.tagsFwd)}, {"to", p.to.hex()}};
            } else {
                json contents = json::array();
                for (const auto& id : p.contents)
                    contents.push_back(id.hex());
                return json{{"contents", contents}};
            }
        },
        c.payload);
}

Payload payloadFromJson(Kind kind, const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "payload must be an object");
    switch (kind) {
    case Kind::Vertex:
        return VertexPayload{};
    case Kind::AdirectionalEdge: {
        const json& eps = needArray(j, "endpoints");
        throwIf(eps.size() != 2, Errc::Malformed, "endpoints must hold exactly two ids");
        throwIf(!eps[0].is_string() || !eps[1].is_string(), Errc::Malformed,
                "endpoints entries must be strings");
        auto a = LandmarkId::fromHex(eps[0].get<std::string>());
        auto b = LandmarkId::fromHex(eps[1].get<std::string>());
        if (b < a)
            std::swap(a, b);
        return AdirEdgePayload{a, b};
    }
    case Kind::UnidirectionalEdge:
        return UnidirEdgePayload{idField(j, "from"), idField(j, "to")};
    case Kind::BidirectionalEdge: {
        BidirEdgePayload p;
        p.from = idField(j, "from");
        p.to = idField(j, "to");
        p.labelFwd = needString(j, "labelFwd");
        p.labelBwd = needString(j, "labelBwd");
        p.tagsFwd = stringSet(needArray(j, "tagsFwd"), "tagsFwd");
        p.tagsBwd = stringSet(needArray(j, "tagsBwd"), "tagsBwd");
        return p;
    }
    case Kind::Pen: {
        PenPayload p;
        for (const auto& e : needArray(j, "contents")) {
            throwIf(!e.is_string(), Errc::Malformed, "contents entries must be strings");
            p.contents.insert(LandmarkId::fromHex(e.get<std::string>()));
        }
        return p;
    }
    }
    throw Error(Errc::InvariantViolation, "unreachable payload kind");
}

} // namespace

json contributionToJson(const Contribution& c) {
    json auths = json::array();
    for (const auto& a : c.authorships)
        auths.push_back(authorshipToJson(a));
    json marks = json::array();
    for (const auto& m : c.marks)
        marks.push_back(markToJson(m));
    return json{{"authorships", auths},
                {"id", c.id.hex()},
                {"kind", kindName(c.kind())},
                {"label", c.label},
                {"marks", marks},
                {"payload", payloadToJson(c)},
                {"status", statusToJson(c.status)},
                {"tags", stringSetToJson(c.tags)},
                {"timestamp", c.timestamp},
                {"type", typeName(c.ctype)}};
}

Contribution contributionFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "landmark must be an object");
    Contribution c;
    c.id = idField(j, "id");
    c.ctype = typeFromName(needString(j, "type"));
    auto kind = kindFromName(needString(j, "kind"));
    throwIf(kind != c.kind(), Errc::InvariantViolation,
            "kind '" + std::string(kindName(kind)) + "' disagrees with type '" +
                std::string(typeName(c.ctype)) + "'");
    c.label = needString(j, "label");
    c.tags = stringSet(needArray(j, "tags"), "tags");
    for (const auto& a : needArray(j, "authorships"))
        c.authorships.insert(authorshipFromJson(a));
    c.status = statusFromJson(needObject(j, "status"));
    for (const auto& m : needArray(j, "marks"))
        c.marks.insert(markFromJson(m));
    c.timestamp = needInt(j, "timestamp");
    c.payload = payloadFromJson(kind, needObject(j, "payload"));
    // At parse time every constructor-level invariant surfaces as either a
    // structural problem (bad tag shape) or a generic invariant violation.
    try {
        validateContribution(c);
    } catch (const Error& e) {
        if (e.code() == Errc::InvalidTag)
            throw Error(Errc::Malformed, e.what());
        if (e.code() == Errc::Malformed || e.code() == Errc::UnknownType ||
            e.code() == Errc::InvariantViolation)
            throw;
        throw Error(Errc::InvariantViolation, e.what());
    }
    return c;
}

// --- landscape document ---------------------------------------------------

std::string serializeLandscape(const Landscape& l) {
    json landmarks = json::array();
    for (const auto& [id, c] : l.all())
        landmarks.push_back(contributionToJson(c));
    return json{{"landmarks", landmarks}, {"mmm_version", kFormatVersion}}.dump();
}

namespace {

// Nesting depth of an edge: 0 when no endpoint is itself an edge, else one
// more than the deepest edge endpoint. Dangling endpoints count as depth 0.
struct DepthChecker {
    const Landscape::Map& byId;
    std::map<LandmarkId, int> memo;
    std::set<LandmarkId> onStack;

    int depthOf(const Contribution& c) {
        if (auto it = memo.find(c.id); it != memo.end())
            return it->second;
        throwIf(onStack.count(c.id) > 0, Errc::InvariantViolation,
                "endpoint cycle through edge " + c.id.hex());
        onStack.insert(c.id);
        int depth = 0;
        for (const auto& ep : c.endpoints()) {
            auto it = byId.find(ep);
            if (it != byId.end() && it->second.isEdge())
                depth = std::max(depth, 1 + depthOf(it->second));
        }
        onStack.erase(c.id);
        memo[c.id] = depth;
        return depth;
    }
};

} // namespace

Landscape parseLandscape(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw Error(Errc::Malformed, std::string("invalid JSON: ") + e.what());
    }
    throwIf(!doc.is_object(), Errc::Malformed, "document must be an object");
    auto version = needString(doc, "mmm_version");
    throwIf(version != kFormatVersion, Errc::Malformed, "unsupported mmm_version '" + version + "'");

    Landscape out;
    for (const auto& entry : needArray(doc, "landmarks")) {
        Contribution c = contributionFromJson(entry);
        throwIf(out.find(c.id) != nullptr, Errc::InvariantViolation,
                "duplicate landmark id " + c.id.hex());
        out.put(std::move(c));
    }

    DepthChecker checker{out.all(), {}, {}};
    for (const auto& [id, c] : out.all()) {
        if (c.ctype == ConcreteType::PennedIn) {
            const auto& to = std::get<UnidirEdgePayload>(c.payload).to;
            const Contribution* target = out.find(to);
            throwIf(target != nullptr && !target->isPen(), Errc::InvariantViolation,
                    "pennedIn edge " + id.hex() + " targets non-pen " + to.hex());
        }
        if (c.isEdge())
            throwIf(checker.depthOf(c) > kEdgeDepthCap, Errc::InvariantViolation,
                    "edge " + id.hex() + " exceeds nesting depth cap");
    }
    return out;
}

Digest256 canonicalDigest(const Landscape& l) { return sha256(serializeLandscape(l)); }

// --- wire envelope --------------------------------------------------------------

bool isWireMessageName(std::string_view name) {
    static constexpr std::array<std::string_view, 8> kNames = {
        "SHARE_OFFER", "SHARE_ACCEPT",     "SHARE_REJECT", "SUBSCRIBE",
        "SUBSCRIBE_INVITE", "SERVE_BATCH", "OBSOLETE_NOTICE", "ACK"};
    return std::find(kNames.begin(), kNames.end(), name) != kNames.end();
}

std::string serializeWire(const WireMessage& m) {
    return json{{"body", m.body}, {"msg", m.msg}}.dump();
}

WireMessage parseWire(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(Errc::Malformed, std::string("invalid wire JSON: ") + e.what());
    }
    throwIf(!j.is_object(), Errc::Malformed, "wire message must be an object");
    WireMessage m;
    m.msg = needString(j, "msg");
    throwIf(!isWireMessageName(m.msg), Errc::Malformed, "unknown message '" + m.msg + "'");
    m.body = needObject(j, "body");
    return m;
}

} // namespace mmm
