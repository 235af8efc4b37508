// Canonical JSON forms: the .mmm.json landscape document, per-contribution
// objects (also used as event payloads), and the newline-delimited wire
// envelope. Serialization is bit-deterministic: landmarks sorted by id, keys
// sorted, set members sorted.
#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mmm/digest.hpp"
#include "mmm/landscape.hpp"

namespace mmm {

inline constexpr const char* kFormatVersion = "0.1";

// --- per-value codecs ---------------------------------------------------
nlohmann::json authorshipToJson(const Authorship& a);
Authorship authorshipFromJson(const nlohmann::json& j);

nlohmann::json statusToJson(const Status& s);
Status statusFromJson(const nlohmann::json& j);

nlohmann::json markToJson(const Mark& m);
Mark markFromJson(const nlohmann::json& j);

nlohmann::json contractToJson(const ShareContract& c);
ShareContract contractFromJson(const nlohmann::json& j);

nlohmann::json contributionToJson(const Contribution& c);
// Validates context-free invariants; throws Malformed / UnknownType /
// InvariantViolation (empty vertex label and friends).
Contribution contributionFromJson(const nlohmann::json& j);

// --- landscape document ---------------------------------------------------
// {"landmarks":[...sorted by id...],"mmm_version":"0.1"} — the pit is never
// serialized; it is implicit in every landscape.
std::string serializeLandscape(const Landscape& l);

// Full parse with whole-document checks: duplicate ids, pennedIn targets
// that are present must be pens, edge recursion depth cap.
Landscape parseLandscape(std::string_view bytes);

Digest256 canonicalDigest(const Landscape& l);

// --- wire envelope ----------------------------------------------------------
struct WireMessage {
    std::string msg; // SHARE_OFFER, SHARE_ACCEPT, SHARE_REJECT, SUBSCRIBE,
                     // SUBSCRIBE_INVITE, SERVE_BATCH, OBSOLETE_NOTICE, ACK
    nlohmann::json body = nlohmann::json::object();
};

bool isWireMessageName(std::string_view name);
std::string serializeWire(const WireMessage& m); // single line, no trailing \n
WireMessage parseWire(std::string_view line);    // throws Malformed

} // namespace mmm
