// Peer node: share offers under contracts, the reception pipeline with the
// concierge limbo filter, subscriptions and serving, publication, and
// trickling rewards.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmm/explorer.hpp"
#include "mmm/serialization.hpp"
#include "mmm/store.hpp"

namespace mmm {

constexpr int kServeBatchCap = 256;

struct ForwardingPolicy {
    bool mayForwardToServer = false;
    bool mayForwardToSubscriber = false;
};

struct SubscriptionRequest {
    Topic topic;
    int frequency = 1;        // serve every this many ticks
    std::int64_t until = 0;   // last tick the subscription is live
    std::string servingPeer;  // who serves the extent
    ForwardingPolicy forwarding;
};

nlohmann::json subscriptionToJson(const SubscriptionRequest& req);
SubscriptionRequest subscriptionFromJson(const nlohmann::json& j); // throws Malformed

struct OfferOptions {
    bool includeObsolete = false; // obsolete contributions stay home by default
};

struct ReceiveReport {
    std::vector<LandmarkId> accepted;
    std::vector<LandmarkId> rejected;
};

// --- transport-free protocol operations ------------------------------------
// These work on a bare territory store; PeerNode wires them to a peer
// identity and the message loop, the CLI calls them directly.

// True when this store's holder may pass the contribution on: our own
// contributions always, received-private ones only under a contract that
// allows republishing.
bool mayReshare(const TerritoryStore& store, const Contribution& c);

WireMessage buildShareOffer(TerritoryStore& store, const std::string& fromPeer,
                            const std::string& toPeer, const std::vector<LandmarkId>& ids,
                            const ShareContract& contract, const OfferOptions& opts = {},
                            const char* msgName = "SHARE_OFFER");

ReceiveReport receiveShareInto(TerritoryStore& store, const WireMessage& offer,
                               std::int64_t now);

void publishContribution(TerritoryStore& store, const LandmarkId& id,
                         bool idempotentIfPublic = false);

void rewardContribution(TerritoryStore& store, const LandmarkId& id,
                        const std::string& descriptor);

int trickleRewardsOnce(TerritoryStore& store);

// Subscriber-side half of a subscription: requires the anchor locally,
// marks it subscribedTo, returns the SUBSCRIBE message for the server.
WireMessage subscribeOnAnchor(TerritoryStore& store, const SubscriptionRequest& req,
                              const std::string& selfPeer, std::int64_t now);

// A peer's engine: territory store plus the wire protocol around it.
class PeerNode {
public:
    explicit PeerNode(std::string peerId, StoreConfig cfg = {});

    const std::string& peerId() const { return peerId_; }
    TerritoryStore& store() { return store_; }
    const TerritoryStore& store() const { return store_; }

    std::int64_t now() const { return now_; }
    void setNow(std::int64_t t) { now_ = t; }

    // The contract used when a serve or invite does not name one.
    const ShareContract& defaultContract() const { return defaultContract_; }
    void setDefaultContract(ShareContract c) { defaultContract_ = std::move(c); }

    // --- sharing ------------------------------------------------------------

    // Builds a SHARE_OFFER, upgrading each contribution's status to cover the
    // recipient and marking it sharedWith(peer). House-keeping marks are
    // stripped from the wire copies (rewarded and obsolete survive).
    WireMessage offerShare(const std::string& toPeer, const std::vector<LandmarkId>& ids,
                           const ShareContract& contract, const OfferOptions& opts = {});

    // Reception pipeline: mark new + provenance, concierge-filter anything
    // linked to a locally-in-limbo contribution, merge homologues, append
    // the rest. Idempotent per offer.
    ReceiveReport receiveShare(const WireMessage& offer);

    // --- subscriptions ---------------------------------------------------------

    // Subscriber side: requires the anchor locally, marks it subscribedTo,
    // returns the SUBSCRIBE message for the serving peer.
    WireMessage subscribe(const SubscriptionRequest& req);

    // Server side bookkeeping (also reached through handleMessage).
    void acceptSubscription(const SubscriptionRequest& req, const std::string& subscriber);

    // Due subscriptions emit SERVE_BATCH messages (at most kServeBatchCap
    // contributions each); expired ones are dropped.
    std::vector<WireMessage> serveSubscriptions(std::int64_t tick);

    // Share-invite: offers the anchor itself plus a suggested subscription
    // the recipient may echo back as SUBSCRIBE.
    WireMessage makeShareInvite(const std::string& toPeer, const SubscriptionRequest& suggested,
                                const ShareContract& contract);

    // --- publication / rewards / obsolescence -----------------------------------

    void publish(const LandmarkId& id, bool idempotentIfPublic = false);

    void reward(const LandmarkId& id, const std::string& descriptor);

    // One trickle fixpoint pass: along every directed edge chain into a
    // rewarded contribution, marks gain the minimal distance. Returns how
    // many marks were set or lowered.
    int trickleRewards();

    WireMessage makeObsoleteNotice(const std::vector<LandmarkId>& ids) const;

    // --- dispatch ------------------------------------------------------------------

    // Routes one inbound message, returning replies for the sender. Domain
    // errors during handling become ACK replies carrying an error name.
    std::vector<WireMessage> handleMessage(const std::string& fromPeer, const WireMessage& msg);

private:
    struct Serving {
        SubscriptionRequest req;
        std::string subscriber;
        std::int64_t startTick = 0;
    };

    std::string peerId_;
    TerritoryStore store_;
    std::int64_t now_ = 0;
    ShareContract defaultContract_;
    std::vector<Serving> serving_;
};

} // namespace mmm
