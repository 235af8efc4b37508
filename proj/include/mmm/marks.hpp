// Marks: named annotations for house-keeping (new, obsolete, rewarded, ...).
// Predefined names get their parameter shapes validated; custom names are
// allowed and carried verbatim.
#pragma once

#include <cstdint>
#include <set>
#include <string>

#include <json.hpp>

#include "mmm/ids.hpp"

namespace mmm {

struct Mark {
    std::string name;
    nlohmann::json params = nlohmann::json::object();

    bool operator==(const Mark& o) const { return name == o.name && params == o.params; }
    bool operator<(const Mark& o) const {
        if (name != o.name)
            return name < o.name;
        return params.dump() < o.params.dump();
    }
};

using MarkSet = std::set<Mark>;

// Predefined mark names. Everything here is house-keeping; rewarded and
// obsolete additionally carry cross-peer meaning and survive wire transfer.
bool isPredefinedMark(const std::string& name);

// Internal-only marks this engine adds on top of the predefined list
// (reception provenance, obsolescence advisories). Never sent on the wire.
bool isInternalMark(const std::string& name);

// Throws Malformed when a predefined mark's params have the wrong shape.
void validateMark(const Mark& m);

// --- constructors for the structured marks ---
Mark makeRewarded(const std::string& descriptor, std::int64_t distance, const LandmarkId& rewardedId);
Mark makeObsolete(std::int64_t deadline);
Mark makeSharedWith(const std::string& peer, const std::string& contractId);
Mark makeNew();
Mark makeRefrigerated();
Mark makeReceivedUnder(const std::string& contractId, const std::string& fromPeer);

// --- accessors ---
struct RewardInfo {
    std::string descriptor;
    std::int64_t distance = 0;
    LandmarkId rewardedId;
};
bool isRewarded(const Mark& m);
RewardInfo rewardInfo(const Mark& m); // precondition: isRewarded

bool hasMark(const MarkSet& marks, const std::string& name);
const Mark* findMark(const MarkSet& marks, const std::string& name); // first by order, nullptr if none

// Union of two mark sets, except: rewarded marks collapse to the minimum
// distance per (descriptor, rewardedId), and obsolete marks collapse to the
// earliest deadline. Commutative, associative, idempotent.
MarkSet mergeMarks(const MarkSet& a, const MarkSet& b);

// Wire copy of a mark set: drops house-keeping marks except rewarded and
// obsolete, keeps custom (user) marks.
MarkSet stripHouseKeeping(const MarkSet& marks);

} // namespace mmm
