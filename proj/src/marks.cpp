#include "mmm/marks.hpp"

#include <array>
#include <map>
#include <tuple>

#include "mmm/error.hpp"

namespace mmm {

namespace {

constexpr std::array<const char*, 11> kPredefined = {
    "new",        "obsolete",      "syncWith", "subscribedTo", "rewarded", "sharedWith",
    "refrigerated", "synchronisable", "hidden",   "dim",          "highlighted",
};

constexpr std::array<const char*, 2> kInternal = {"receivedUnder", "obsoleteNotice"};

bool isHex32(const std::string& s) {
    if (s.size() != 32)
        return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
            return false;
    return true;
}

} // namespace

bool isPredefinedMark(const std::string& name) {
    for (auto* p : kPredefined)
        if (name == p)
            return true;
    return false;
}

bool isInternalMark(const std::string& name) {
    for (auto* p : kInternal)
        if (name == p)
            return true;
    return false;
}

void validateMark(const Mark& m) {
    throwIf(!m.params.is_object(), Errc::Malformed, "mark params must be an object: " + m.name);
    if (m.name == "rewarded") {
        throwIf(!m.params.contains("descriptor") || !m.params["descriptor"].is_string(),
                Errc::Malformed, "rewarded mark needs a string descriptor");
        throwIf(!m.params.contains("distance") || !m.params["distance"].is_number_integer() ||
                    m.params["distance"].get<std::int64_t>() < 0,
                Errc::Malformed, "rewarded mark needs a non-negative integer distance");
        throwIf(!m.params.contains("rewardedId") || !m.params["rewardedId"].is_string() ||
                    !isHex32(m.params["rewardedId"].get<std::string>()),
                Errc::Malformed, "rewarded mark needs a 32-hex rewardedId");
    } else if (m.name == "obsolete") {
        throwIf(!m.params.contains("deadline") || !m.params["deadline"].is_number_integer(),
                Errc::Malformed, "obsolete mark needs an integer deadline");
    } else if (m.name == "sharedWith") {
        throwIf(!m.params.contains("peer") || !m.params["peer"].is_string(), Errc::Malformed,
                "sharedWith mark needs a string peer");
    }
}

Mark makeRewarded(const std::string& descriptor, std::int64_t distance, const LandmarkId& rewardedId) {
    Mark m{"rewarded",
           {{"descriptor", descriptor}, {"distance", distance}, {"rewardedId", rewardedId.hex()}}};
    validateMark(m);
    return m;
}

Mark makeObsolete(std::int64_t deadline) { return Mark{"obsolete", {{"deadline", deadline}}}; }

Mark makeSharedWith(const std::string& peer, const std::string& contractId) {
    return Mark{"sharedWith", {{"contract", contractId}, {"peer", peer}}};
}

Mark makeNew() { return Mark{"new", nlohmann::json::object()}; }

Mark makeRefrigerated() { return Mark{"refrigerated", nlohmann::json::object()}; }

Mark makeReceivedUnder(const std::string& contractId, const std::string& fromPeer) {
    return Mark{"receivedUnder", {{"contract", contractId}, {"from", fromPeer}}};
}

bool isRewarded(const Mark& m) { return m.name == "rewarded"; }

RewardInfo rewardInfo(const Mark& m) {
    validateMark(m);
    return RewardInfo{m.params["descriptor"].get<std::string>(),
                      m.params["distance"].get<std::int64_t>(),
                      LandmarkId::fromHex(m.params["rewardedId"].get<std::string>())};
}

bool hasMark(const MarkSet& marks, const std::string& name) {
    return findMark(marks, name) != nullptr;
}

const Mark* findMark(const MarkSet& marks, const std::string& name) {
    for (const auto& m : marks)
        if (m.name == name)
            return &m;
    return nullptr;
}

MarkSet mergeMarks(const MarkSet& a, const MarkSet& b) {
    MarkSet out;
    // rewarded: (descriptor, rewardedId) -> min distance
    std::map<std::pair<std::string, std::string>, std::int64_t> rewards;
    // obsolete: min deadline
    bool haveObsolete = false;
    std::int64_t obsoleteDeadline = 0;
    auto take = [&](const MarkSet& src) {
        for (const auto& m : src) {
            if (m.name == "rewarded") {
                auto info = rewardInfo(m);
                auto key = std::make_pair(info.descriptor, info.rewardedId.hex());
                auto it = rewards.find(key);
                if (it == rewards.end() || info.distance < it->second)
                    rewards[key] = info.distance;
            } else if (m.name == "obsolete") {
                validateMark(m);
                auto deadline = m.params["deadline"].get<std::int64_t>();
                if (!haveObsolete || deadline < obsoleteDeadline) {
                    haveObsolete = true;
                    obsoleteDeadline = deadline;
                }
            } else {
                out.insert(m);
            }
        }
    };
    take(a);
    take(b);
    for (const auto& [key, dist] : rewards)
        out.insert(makeRewarded(key.first, dist, LandmarkId::fromHex(key.second)));
    if (haveObsolete)
        out.insert(makeObsolete(obsoleteDeadline));
    return out;
}

MarkSet stripHouseKeeping(const MarkSet& marks) {
    MarkSet out;
    for (const auto& m : marks) {
        if (m.name == "rewarded" || m.name == "obsolete") {
            out.insert(m);
            continue;
        }
        if (isPredefinedMark(m.name) || isInternalMark(m.name))
            continue;
        out.insert(m);
    }
    return out;
}

} // namespace mmm
