// Contribution statuses (Local, SharedWith, Public), sharing contracts, the
// status partial order and its join. Downgrades are forbidden everywhere.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mmm {

// Governance record attached to a share. The default contract forbids
// disclosing the source's address and forbids republishing.
struct ShareContract {
    std::string contractId;
    bool allowAddressDisclosure = false;
    bool allowRepublish = false;
    std::vector<std::string> alternateHosts;
    std::optional<std::int64_t> expiry; // epoch ms / sim tick; none = never

    bool operator==(const ShareContract&) const = default;
};

// True when `wider` is no more constraining than `base`: every permission
// base grants is granted by wider, and wider expires no earlier.
bool contractNoMoreConstraining(const ShareContract& base, const ShareContract& wider);

// Field-wise join: permissions OR'd, the later expiry wins (none = never),
// alternate hosts unioned. The id flattens: "join:" + sorted union of the
// constituent base ids, so nested joins stay associative.
ShareContract contractJoin(const ShareContract& a, const ShareContract& b);

// Maps a contract id to the contract record, when known. Unknown ids are
// treated as the default (most restrictive) contract.
using ContractResolver = std::function<std::optional<ShareContract>(const std::string&)>;

const ContractResolver& nullContractResolver();

struct Status {
    enum class State { Local, SharedWith, Public };

    State state = State::Local;
    std::set<std::string> groups; // SharedWith only
    std::string contractRef;      // SharedWith only

    auto operator<=>(const Status&) const = default;

    static Status local() { return Status{}; }
    static Status shared(std::set<std::string> groups, std::string contractRef) {
        return Status{State::SharedWith, std::move(groups), std::move(contractRef)};
    }
    static Status pub() { return Status{State::Public, {}, {}}; }

    bool isLocal() const { return state == State::Local; }
    bool isShared() const { return state == State::SharedWith; }
    bool isPublic() const { return state == State::Public; }
};

// Partial order: s ≤ s' iff s is Local, or s' is Public, or both are
// SharedWith with group inclusion and s' contract no more constraining.
bool statusLeq(const Status& s, const Status& sp,
               const ContractResolver& resolver = nullContractResolver());

// Least upper bound. Reduces to max on comparable inputs; on incomparable
// SharedWith pairs it unions groups and joins the contracts. A newly
// synthesized contract is handed to onNewContract for registration.
Status statusJoin(const Status& a, const Status& b,
                  const ContractResolver& resolver = nullContractResolver(),
                  const std::function<void(const ShareContract&)>& onNewContract = {});

const char* statusStateName(Status::State s);
Status::State statusStateFromName(const std::string& name); // throws Malformed

} // namespace mmm
