#include "mmm/status.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "mmm/error.hpp"

namespace mmm {

namespace {

std::int64_t expiryOrMax(const std::optional<std::int64_t>& e) {
    return e ? *e : std::numeric_limits<std::int64_t>::max();
}

// A contract id is either a plain id or "join:" + comma-joined sorted base
// ids. Flattening keeps the join associative.
std::set<std::string> contractIdParts(const std::string& id) {
    std::set<std::string> parts;
    if (id.rfind("join:", 0) == 0) {
        std::stringstream ss(id.substr(5));
        std::string part;
        while (std::getline(ss, part, ','))
            if (!part.empty())
                parts.insert(part);
    } else if (!id.empty()) {
        parts.insert(id);
    }
    return parts;
}

std::string contractIdFromParts(const std::set<std::string>& parts) {
    if (parts.empty())
        return "";
    if (parts.size() == 1)
        return *parts.begin();
    std::string out = "join:";
    bool first = true;
    for (const auto& p : parts) {
        if (!first)
            out += ',';
        out += p;
        first = false;
    }
    return out;
}

ShareContract resolveOrDefault(const ContractResolver& resolver, const std::string& ref) {
    if (resolver) {
        if (auto c = resolver(ref))
            return *c;
    }
    ShareContract def;
    def.contractId = ref;
    return def;
}

} // namespace

bool contractNoMoreConstraining(const ShareContract& base, const ShareContract& wider) {
    if (base.allowAddressDisclosure && !wider.allowAddressDisclosure)
        return false;
    if (base.allowRepublish && !wider.allowRepublish)
        return false;
    return expiryOrMax(wider.expiry) >= expiryOrMax(base.expiry);
}

ShareContract contractJoin(const ShareContract& a, const ShareContract& b) {
    ShareContract j;
    auto parts = contractIdParts(a.contractId);
    auto bParts = contractIdParts(b.contractId);
    parts.insert(bParts.begin(), bParts.end());
    j.contractId = contractIdFromParts(parts);
    j.allowAddressDisclosure = a.allowAddressDisclosure || b.allowAddressDisclosure;
    j.allowRepublish = a.allowRepublish || b.allowRepublish;
    std::set<std::string> hosts(a.alternateHosts.begin(), a.alternateHosts.end());
    hosts.insert(b.alternateHosts.begin(), b.alternateHosts.end());
    j.alternateHosts.assign(hosts.begin(), hosts.end());
    if (a.expiry && b.expiry)
        j.expiry = std::max(*a.expiry, *b.expiry);
    else
        j.expiry = std::nullopt; // either never expires -> join never expires
    return j;
}

const ContractResolver& nullContractResolver() {
    static const ContractResolver r = [](const std::string&) -> std::optional<ShareContract> {
        return std::nullopt;
    };
    return r;
}

bool statusLeq(const Status& s, const Status& sp, const ContractResolver& resolver) {
    if (s.state == Status::State::Local)
        return true;
    if (sp.state == Status::State::Public)
        return true;
    if (s.state == Status::State::SharedWith && sp.state == Status::State::SharedWith) {
        if (!std::includes(sp.groups.begin(), sp.groups.end(), s.groups.begin(), s.groups.end()))
            return false;
        auto base = resolveOrDefault(resolver, s.contractRef);
        auto wider = resolveOrDefault(resolver, sp.contractRef);
        return contractNoMoreConstraining(base, wider);
    }
    return false;
}

Status statusJoin(const Status& a, const Status& b, const ContractResolver& resolver,
                  const std::function<void(const ShareContract&)>& onNewContract) {
    if (a.isPublic() || b.isPublic())
        return Status::pub();
    if (a.isLocal())
        return b;
    if (b.isLocal())
        return a;
    // Both SharedWith. Comparable pairs take the larger (the paper's max);
    // only genuinely incomparable pairs synthesize a joined contract.
    if (a.contractRef == b.contractRef) {
        std::set<std::string> groups = a.groups;
        groups.insert(b.groups.begin(), b.groups.end());
        return Status::shared(std::move(groups), a.contractRef);
    }
    if (statusLeq(a, b, resolver))
        return b;
    if (statusLeq(b, a, resolver))
        return a;
    std::set<std::string> groups = a.groups;
    groups.insert(b.groups.begin(), b.groups.end());
    auto ca = resolveOrDefault(resolver, a.contractRef);
    auto cb = resolveOrDefault(resolver, b.contractRef);
    auto joined = contractJoin(ca, cb);
    if (joined.contractId != ca.contractId && joined.contractId != cb.contractId && onNewContract)
        onNewContract(joined);
    return Status::shared(std::move(groups), joined.contractId);
}

const char* statusStateName(Status::State s) {
    switch (s) {
    case Status::State::Local: return "local";
    case Status::State::SharedWith: return "sharedWith";
    case Status::State::Public: return "public";
    }
    return "local";
}

Status::State statusStateFromName(const std::string& name) {
    if (name == "local")
        return Status::State::Local;
    if (name == "sharedWith")
        return Status::State::SharedWith;
    if (name == "public")
        return Status::State::Public;
    throw Error(Errc::Malformed, "unknown status state: " + name);
}

} // namespace mmm
