#include "mmm/sync.hpp"

#include <algorithm>
#include <queue>

#include "mmm/error.hpp"

using nlohmann::json;

namespace mmm {

// --- subscription wire form -------------------------------------------------

namespace {

json configToJson(const WayfarerConfig& cfg) {
    json types = json::array();
    for (auto t : cfg.traversableTypes)
        types.push_back(typeName(t));
    json tags = json::array();
    for (const auto& t : cfg.excludedTags)
        tags.push_back(t);
    return json{{"directionPolicy", directionPolicyName(cfg.directionPolicy)},
                {"excludedTags", tags},
                {"maxEdges", cfg.maxEdges},
                {"traversableTypes", types}};
}

WayfarerConfig configFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "traversal config must be an object");
    WayfarerConfig cfg;
    if (j.contains("maxEdges")) {
        throwIf(!j["maxEdges"].is_number_integer() || j["maxEdges"].get<int>() < 0,
                Errc::Malformed, "maxEdges must be a non-negative integer");
        cfg.maxEdges = j["maxEdges"].get<int>();
    }
    if (j.contains("traversableTypes"))
        for (const auto& t : j["traversableTypes"]) {
            throwIf(!t.is_string(), Errc::Malformed, "traversableTypes entries must be strings");
            cfg.traversableTypes.insert(typeFromName(t.get<std::string>()));
        }
    if (j.contains("excludedTags"))
        for (const auto& t : j["excludedTags"]) {
            throwIf(!t.is_string(), Errc::Malformed, "excludedTags entries must be strings");
            cfg.excludedTags.insert(t.get<std::string>());
        }
    if (j.contains("directionPolicy")) {
        throwIf(!j["directionPolicy"].is_string(), Errc::Malformed,
                "directionPolicy must be a string");
        cfg.directionPolicy = directionPolicyFromName(j["directionPolicy"].get<std::string>());
    }
    return cfg;
}

template <typename T>
T requireField(const json& j, const char* key) {
    throwIf(!j.is_object() || !j.contains(key), Errc::Malformed,
            std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(Errc::Malformed, std::string("bad field '") + key + "'");
    }
}

} // namespace

json subscriptionToJson(const SubscriptionRequest& req) {
    return json{{"anchor", req.topic.anchorId.hex()},
                {"config", configToJson(req.topic.extent.config)},
                {"forwarding",
                 json{{"mayForwardToServer", req.forwarding.mayForwardToServer},
                      {"mayForwardToSubscriber", req.forwarding.mayForwardToSubscriber}}},
                {"frequency", req.frequency},
                {"radius", req.topic.extent.radius},
                {"servingPeer", req.servingPeer},
                {"until", req.until}};
}

SubscriptionRequest subscriptionFromJson(const json& j) {
    SubscriptionRequest req;
    req.topic.anchorId = LandmarkId::fromHex(requireField<std::string>(j, "anchor"));
    req.topic.extent.radius = requireField<int>(j, "radius");
    throwIf(req.topic.extent.radius < 0, Errc::Malformed, "radius must be non-negative");
    throwIf(!j.contains("config"), Errc::Malformed, "missing field 'config'");
    req.topic.extent.config = configFromJson(j["config"]);
    req.frequency = requireField<int>(j, "frequency");
    throwIf(req.frequency <= 0, Errc::Malformed, "frequency must be positive");
    req.until = requireField<std::int64_t>(j, "until");
    req.servingPeer = requireField<std::string>(j, "servingPeer");
    if (j.contains("forwarding")) {
        const json& f = j["forwarding"];
        req.forwarding.mayForwardToServer = requireField<bool>(f, "mayForwardToServer");
        req.forwarding.mayForwardToSubscriber = requireField<bool>(f, "mayForwardToSubscriber");
    }
    return req;
}

// --- peer node ----------------------------------------------------------------

PeerNode::PeerNode(std::string peerId, StoreConfig cfg)
    : peerId_(std::move(peerId)), store_(cfg) {
    defaultContract_.contractId = "default:" + peerId_;
    store_.registerContract(defaultContract_);
}

// Resharing what someone else shared privately needs a contract that allows
// republishing; our own contributions are ours to offer.
bool mayReshare(const TerritoryStore& store, const Contribution& c) {
    if (!c.status.isShared())
        return true;
    bool received = false;
    for (const auto& m : c.marks) {
        if (m.name != "receivedUnder")
            continue;
        received = true;
        if (m.params.contains("contract") && m.params["contract"].is_string() &&
            store.resolveContract(m.params["contract"].get<std::string>()).allowRepublish)
            return true;
    }
    return !received;
}

WireMessage buildShareOffer(TerritoryStore& store, const std::string& fromPeer,
                            const std::string& toPeer, const std::vector<LandmarkId>& ids,
                            const ShareContract& contract, const OfferOptions& opts,
                            const char* msgName) {
    std::set<LandmarkId> wanted(ids.begin(), ids.end());
    for (const auto& id : wanted)
        throwIf(!store.find(id), Errc::NotFound, "no landmark " + id.hex());

    std::vector<LandmarkId> outgoing;
    for (const auto& id : wanted) {
        const Contribution* c = store.find(id);
        if (c->isObsolete() && !opts.includeObsolete)
            continue; // obsolete contributions are not propagated
        throwIf(!mayReshare(store, *c), Errc::ContractViolation,
                "contribution " + id.hex() + " was received under a no-republish contract");
        outgoing.push_back(id);
    }

    store.registerContract(contract);
    auto registerNew = [&store](const ShareContract& c) { store.registerContract(c); };
    for (const auto& id : outgoing) {
        Status target = store.find(id)->status;
        if (target.isLocal())
            target = Status::shared({toPeer}, contract.contractId);
        else if (target.isShared())
            target = statusJoin(target, Status::shared({toPeer}, contract.contractId),
                                store.resolver(), registerNew);
        store.mutate(id, [&](Contribution& c) {
            if (!c.status.isPublic())
                edit::upgradeStatus(c, target, store.resolver());
            edit::setMark(c, makeSharedWith(toPeer, contract.contractId));
        });
    }

    json contributions = json::array();
    for (const auto& id : outgoing) {
        Contribution copy = *store.find(id);
        copy.marks = stripHouseKeeping(copy.marks);
        contributions.push_back(contributionToJson(copy));
    }
    return WireMessage{msgName, json{{"contract", contractToJson(contract)},
                                     {"contributions", std::move(contributions)},
                                     {"fromPeer", fromPeer},
                                     {"toPeer", toPeer}}};
}

WireMessage PeerNode::offerShare(const std::string& toPeer, const std::vector<LandmarkId>& ids,
                                 const ShareContract& contract, const OfferOptions& opts) {
    return buildShareOffer(store_, peerId_, toPeer, ids, contract, opts, "SHARE_OFFER");
}

ReceiveReport receiveShareInto(TerritoryStore& store, const WireMessage& offer,
                               std::int64_t now) {
    throwIf(offer.msg != "SHARE_OFFER" && offer.msg != "SERVE_BATCH" &&
                offer.msg != "SUBSCRIBE_INVITE",
            Errc::Malformed, "not a share offer: " + offer.msg);
    const json& body = offer.body;
    throwIf(!body.is_object() || !body.contains("contract") || !body.contains("contributions") ||
                !body["contributions"].is_array(),
            Errc::Malformed, "share offer needs contract and contributions");
    ShareContract contract = contractFromJson(body["contract"]);
    store.registerContract(contract);
    std::string fromPeer =
        body.contains("fromPeer") && body["fromPeer"].is_string() ? body["fromPeer"] : "";

    std::vector<Contribution> incoming;
    for (const auto& cj : body["contributions"])
        incoming.push_back(contributionFromJson(cj));

    // Concierge filter: anything in limbo here, plus everything in the batch
    // transitively linked to it, bounces at the door.
    const auto& limbo = store.graph().obsoleteSet;
    std::set<LandmarkId> batchIds;
    for (const auto& c : incoming)
        batchIds.insert(c.id);
    std::map<LandmarkId, std::set<LandmarkId>> adj; // within-batch links via endpoints
    std::set<LandmarkId> rejected;
    for (const auto& c : incoming) {
        if (limbo.count(c.id))
            rejected.insert(c.id);
        for (const auto& ep : c.endpoints()) {
            if (limbo.count(ep))
                rejected.insert(c.id);
            if (batchIds.count(ep)) {
                adj[c.id].insert(ep);
                adj[ep].insert(c.id);
            }
        }
    }
    std::deque<LandmarkId> queue(rejected.begin(), rejected.end());
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        for (const auto& n : adj[x])
            if (rejected.insert(n).second)
                queue.push_back(n);
    }

    ReceiveReport report;
    for (const auto& id : rejected)
        report.rejected.push_back(id);

    // Append survivors, referenced items first so depth checks see context.
    std::vector<Contribution> pending;
    for (auto& c : incoming) {
        if (rejected.count(c.id))
            continue;
        edit::setMark(c, makeNew());
        edit::setMark(c, makeReceivedUnder(contract.contractId, fromPeer));
        pending.push_back(std::move(c));
    }
    std::set<LandmarkId> done;
    bool progress = true;
    while (!pending.empty() && progress) {
        progress = false;
        std::vector<Contribution> later;
        for (auto& c : pending) {
            bool ready = true;
            for (const auto& ep : c.endpoints())
                if (batchIds.count(ep) && !done.count(ep) && !rejected.count(ep))
                    ready = false;
            if (!ready) {
                later.push_back(std::move(c));
                continue;
            }
            progress = true;
            try {
                store.append(c, Event::Kind::Received, fromPeer, now);
                report.accepted.push_back(c.id);
            } catch (const Error&) {
                report.rejected.push_back(c.id); // unmergeable or invariant-breaking copy
            }
            done.insert(c.id);
        }
        pending = std::move(later);
    }
    for (auto& c : pending) { // mutually-referencing leftovers; dangling is fine
        try {
            store.append(c, Event::Kind::Received, fromPeer, now);
            report.accepted.push_back(c.id);
        } catch (const Error&) {
            report.rejected.push_back(c.id);
        }
    }
    std::sort(report.accepted.begin(), report.accepted.end());
    std::sort(report.rejected.begin(), report.rejected.end());
    return report;
}

// --- subscriptions ------------------------------------------------------------

ReceiveReport PeerNode::receiveShare(const WireMessage& offer) {
    return receiveShareInto(store_, offer, now_);
}

WireMessage subscribeOnAnchor(TerritoryStore& store, const SubscriptionRequest& req,
                              const std::string& selfPeer, std::int64_t now) {
    throwIf(!store.find(req.topic.anchorId), Errc::AnchorMissing,
            "anchor " + req.topic.anchorId.hex() + " is not on this territory");
    throwIf(req.until < now, Errc::Expired, "subscription ends in the past");
    store.mutate(req.topic.anchorId, [&](Contribution& c) {
        edit::setMark(c, Mark{"subscribedTo",
                              json{{"frequency", req.frequency},
                                   {"server", req.servingPeer},
                                   {"until", req.until}}});
    });
    json body = subscriptionToJson(req);
    body["fromPeer"] = selfPeer;
    return WireMessage{"SUBSCRIBE", std::move(body)};
}

WireMessage PeerNode::subscribe(const SubscriptionRequest& req) {
    return subscribeOnAnchor(store_, req, peerId_, now_);
}

void PeerNode::acceptSubscription(const SubscriptionRequest& req, const std::string& subscriber) {
    throwIf(!store_.find(req.topic.anchorId), Errc::AnchorMissing,
            "anchor " + req.topic.anchorId.hex() + " is not on this territory");
    throwIf(req.until < now_, Errc::Expired, "subscription ends in the past");
    serving_.push_back(Serving{req, subscriber, now_});
}

std::vector<WireMessage> PeerNode::serveSubscriptions(std::int64_t tick) {
    std::vector<WireMessage> out;
    std::erase_if(serving_, [&](const Serving& s) { return s.req.until < tick; });
    for (const auto& s : serving_) {
        std::int64_t delta = tick - s.startTick;
        if (delta <= 0 || delta % s.req.frequency != 0)
            continue;
        if (!store_.find(s.req.topic.anchorId))
            continue;
        Area area = topicExtentArea(store_.graph(), s.req.topic);
        std::vector<LandmarkId> members;
        for (const auto& id : area) {
            const Contribution* c = store_.find(id);
            if (!c || c->isObsolete() || !mayReshare(store_, *c))
                continue;
            bool alreadyServed = false;
            for (const auto& m : c->marks)
                if (m.name == "sharedWith" && m.params.contains("peer") &&
                    m.params["peer"] == s.subscriber)
                    alreadyServed = true;
            if (alreadyServed)
                continue;
            members.push_back(id);
            if (members.size() >= static_cast<std::size_t>(kServeBatchCap))
                break;
        }
        if (members.empty())
            continue;
        WireMessage batch = buildShareOffer(store_, peerId_, s.subscriber, members,
                                            defaultContract_, {}, "SERVE_BATCH");
        batch.body["anchor"] = s.req.topic.anchorId.hex();
        out.push_back(std::move(batch));
    }
    return out;
}

WireMessage PeerNode::makeShareInvite(const std::string& toPeer,
                                      const SubscriptionRequest& suggested,
                                      const ShareContract& contract) {
    WireMessage invite = buildShareOffer(store_, peerId_, toPeer, {suggested.topic.anchorId},
                                         contract, {}, "SUBSCRIBE_INVITE");
    SubscriptionRequest offered = suggested;
    offered.servingPeer = peerId_;
    invite.body["subscription"] = subscriptionToJson(offered);
    return invite;
}

// --- publication -----------------------------------------------------------------

void publishContribution(TerritoryStore& store, const LandmarkId& id, bool idempotentIfPublic) {
    const Contribution* c = store.find(id);
    throwIf(!c, Errc::NotFound, "no landmark " + id.hex());
    if (c->status.isPublic()) {
        if (idempotentIfPublic)
            return;
        throw Error(Errc::AlreadyPublic, id.hex());
    }
    throwIf(!mayReshare(store, *c), Errc::ContractViolation,
            "contribution " + id.hex() + " was received under a no-republish contract");
    store.mutate(id, [&](Contribution& m) {
        edit::upgradeStatus(m, Status::pub(), store.resolver());
    });
}

void PeerNode::publish(const LandmarkId& id, bool idempotentIfPublic) {
    publishContribution(store_, id, idempotentIfPublic);
}

// --- rewards -----------------------------------------------------------------------

void rewardContribution(TerritoryStore& store, const LandmarkId& id,
                        const std::string& descriptor) {
    throwIf(!store.find(id), Errc::NotFound, "no landmark " + id.hex());
    store.mutate(id, [&](Contribution& c) {
        MarkSet keep;
        for (const auto& m : c.marks) {
            if (isRewarded(m)) {
                RewardInfo info = rewardInfo(m);
                if (info.descriptor == descriptor && info.rewardedId == id)
                    continue; // replaced by the distance-0 mark below
            }
            keep.insert(m);
        }
        keep.insert(makeRewarded(descriptor, 0, id));
        c.marks = std::move(keep);
    });
}

void PeerNode::reward(const LandmarkId& id, const std::string& descriptor) {
    rewardContribution(store_, id, descriptor);
}

int trickleRewardsOnce(TerritoryStore& store) {
    const Landscape& ls = store.landscape();

    std::map<LandmarkId, std::vector<LandmarkId>> intoward; // to -> froms, per directed edge
    for (const auto& [id, c] : ls.all()) {
        if (c.kind() != Kind::UnidirectionalEdge)
            continue;
        const auto& u = std::get<UnidirEdgePayload>(c.payload);
        if (ls.contains(u.from) && ls.contains(u.to))
            intoward[u.to].push_back(u.from);
    }

    using GroupKey = std::pair<std::string, LandmarkId>; // descriptor, rewarded id
    std::map<GroupKey, std::map<LandmarkId, std::int64_t>> current;
    for (const auto& [id, c] : ls.all())
        for (const auto& m : c.marks)
            if (isRewarded(m)) {
                RewardInfo info = rewardInfo(m);
                auto& slot = current[{info.descriptor, info.rewardedId}];
                auto it = slot.find(id);
                if (it == slot.end() || info.distance < it->second)
                    slot[id] = info.distance;
            }

    int changed = 0;
    for (const auto& [key, marks] : current) {
        // Multi-source shortest distance, walking arcs backwards.
        std::map<LandmarkId, std::int64_t> best;
        using Item = std::pair<std::int64_t, LandmarkId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (const auto& [id, d] : marks) {
            best[id] = d;
            heap.push({d, id});
        }
        while (!heap.empty()) {
            auto [d, id] = heap.top();
            heap.pop();
            if (best[id] != d)
                continue;
            auto it = intoward.find(id);
            if (it == intoward.end())
                continue;
            for (const auto& from : it->second) {
                auto b = best.find(from);
                if (b == best.end() || d + 1 < b->second) {
                    best[from] = d + 1;
                    heap.push({d + 1, from});
                }
            }
        }
        for (const auto& [id, d] : best) {
            auto it = marks.find(id);
            if (it != marks.end() && it->second <= d)
                continue;
            changed++;
            store.mutate(id, [&](Contribution& c) {
                MarkSet keep;
                for (const auto& m : c.marks) {
                    if (isRewarded(m)) {
                        RewardInfo info = rewardInfo(m);
                        if (info.descriptor == key.first && info.rewardedId == key.second)
                            continue;
                    }
                    keep.insert(m);
                }
                keep.insert(makeRewarded(key.first, d, key.second));
                c.marks = std::move(keep);
            });
        }
    }
    return changed;
}

int PeerNode::trickleRewards() { return trickleRewardsOnce(store_); }

// --- obsolescence notices --------------------------------------------------------

WireMessage PeerNode::makeObsoleteNotice(const std::vector<LandmarkId>& ids) const {
    json list = json::array();
    for (const auto& id : ids)
        list.push_back(id.hex());
    return WireMessage{"OBSOLETE_NOTICE", json{{"fromPeer", peerId_}, {"ids", std::move(list)}}};
}

// --- dispatch -----------------------------------------------------------------------

std::vector<WireMessage> PeerNode::handleMessage(const std::string& fromPeer,
                                                 const WireMessage& msg) {
    std::vector<WireMessage> replies;
    try {
        if (msg.msg == "SHARE_OFFER" || msg.msg == "SERVE_BATCH") {
            ReceiveReport report = receiveShare(msg);
            auto idList = [](const std::vector<LandmarkId>& ids) {
                json out = json::array();
                for (const auto& id : ids)
                    out.push_back(id.hex());
                return out;
            };
            if (!report.accepted.empty())
                replies.push_back({"SHARE_ACCEPT", json{{"fromPeer", peerId_},
                                                        {"ids", idList(report.accepted)}}});
            if (!report.rejected.empty())
                replies.push_back({"SHARE_REJECT", json{{"fromPeer", peerId_},
                                                        {"ids", idList(report.rejected)}}});
        } else if (msg.msg == "SUBSCRIBE") {
            acceptSubscription(subscriptionFromJson(msg.body), fromPeer);
            replies.push_back({"ACK", json{{"fromPeer", peerId_}, {"re", "SUBSCRIBE"}}});
        } else if (msg.msg == "SUBSCRIBE_INVITE") {
            receiveShare(msg);
            throwIf(!msg.body.contains("subscription"), Errc::Malformed,
                    "invite carries no subscription");
            SubscriptionRequest req = subscriptionFromJson(msg.body["subscription"]);
            req.servingPeer = fromPeer;
            replies.push_back(subscribe(req));
        } else if (msg.msg == "OBSOLETE_NOTICE") {
            for (const auto& idj : msg.body.value("ids", json::array())) {
                throwIf(!idj.is_string(), Errc::Malformed, "obsolete notice ids must be strings");
                LandmarkId id = LandmarkId::fromHex(idj.get<std::string>());
                if (store_.find(id))
                    store_.mutate(id, [&](Contribution& c) {
                        edit::setMark(c, Mark{"obsoleteNotice", json{{"from", fromPeer}}});
                    });
            }
            replies.push_back({"ACK", json{{"fromPeer", peerId_}, {"re", "OBSOLETE_NOTICE"}}});
        }
        // SHARE_ACCEPT / SHARE_REJECT / ACK need no action.
    } catch (const Error& e) {
        replies.clear();
        replies.push_back(
            {"ACK", json{{"error", e.name()}, {"fromPeer", peerId_}, {"re", msg.msg}}});
    }
    return replies;
}

} // namespace mmm
