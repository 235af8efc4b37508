#include "mmm/sim.hpp"

#include <algorithm>

#include "mmm/activities.hpp"
#include "mmm/error.hpp"

using nlohmann::json;

namespace mmm {

// --- network ------------------------------------------------------------------

SimNetwork::SimNetwork(std::uint64_t seed, StoreConfig baseConfig)
    : seed_(seed), baseConfig_(baseConfig), rng_(seed) {}

PeerNode& SimNetwork::addPeer(const std::string& name) {
    throwIf(peers_.count(name) > 0, Errc::InvariantViolation, "duplicate peer " + name);
    StoreConfig cfg = baseConfig_;
    cfg.idSeed = seed_ + peers_.size() + 1; // distinct, reproducible id streams
    auto node = std::make_unique<PeerNode>(name, cfg);
    node->setNow(tick_);
    return *(peers_[name] = std::move(node));
}

PeerNode& SimNetwork::peer(const std::string& name) {
    auto it = peers_.find(name);
    throwIf(it == peers_.end(), Errc::NotFound, "no peer " + name);
    return *it->second;
}

std::vector<std::string> SimNetwork::peerNames() const {
    std::vector<std::string> names;
    for (const auto& [name, p] : peers_)
        names.push_back(name);
    return names;
}

void SimNetwork::link(const std::string& a, const std::string& b) {
    throwIf(!peers_.count(a) || !peers_.count(b) || a == b, Errc::InvariantViolation,
            "bad link " + a + " -- " + b);
    links_.insert({std::min(a, b), std::max(a, b)});
}

bool SimNetwork::linked(const std::string& a, const std::string& b) const {
    return links_.count({std::min(a, b), std::max(a, b)}) > 0;
}

void SimNetwork::send(const std::string& from, const std::string& to, const WireMessage& msg) {
    throwIf(!linked(from, to), Errc::InvariantViolation, "no link " + from + " -> " + to);
    SimEnvelope env{tick_ + 1, nextSeq_++, from, to, serializeWire(msg)};
    trace_.push_back(env);
    pending_.push_back(std::move(env));
}

int SimNetwork::tick() {
    tick_++;
    for (auto& [name, p] : peers_)
        p->setNow(tick_);

    std::vector<SimEnvelope> due;
    std::erase_if(pending_, [&](const SimEnvelope& e) {
        if (e.deliverTick > tick_)
            return false;
        due.push_back(e);
        return true;
    });
    std::sort(due.begin(), due.end(), [](const SimEnvelope& x, const SimEnvelope& y) {
        return std::tie(x.to, x.from, x.seqNo) < std::tie(y.to, y.from, y.seqNo);
    });
    int count = 0;
    for (const auto& env : due) {
        count++;
        for (const auto& reply : peer(env.to).handleMessage(env.from, parseWire(env.line)))
            send(env.to, env.from, reply);
    }

    for (auto& [name, p] : peers_)
        for (const auto& batch : p->serveSubscriptions(tick_)) {
            std::string to = batch.body.value("toPeer", std::string{});
            if (!to.empty() && peers_.count(to) && linked(name, to))
                send(name, to, batch);
        }

    delivered_ += count;
    return count;
}

int SimNetwork::runUntilQuiet(int maxTicks) {
    int n = 0;
    while (!pending_.empty() && n < maxTicks) {
        tick();
        n++;
    }
    return n;
}

std::map<std::string, std::string> SimNetwork::digests() const {
    std::map<std::string, std::string> out;
    for (const auto& [name, p] : peers_)
        out[name] = canonicalDigest(p->store().landscape()).hex();
    return out;
}

std::map<std::string, int> SimNetwork::replication() const {
    std::map<std::string, int> out;
    for (const auto& [name, p] : peers_)
        for (const auto& [id, c] : p->store().landscape().all())
            out[id.hex()]++;
    return out;
}

int gossipPublicStep(SimNetwork& net) {
    int offers = 0;
    for (const auto& from : net.peerNames())
        for (const auto& to : net.peerNames()) {
            if (from == to || !net.linked(from, to))
                continue;
            PeerNode& sender = net.peer(from);
            std::vector<LandmarkId> ids;
            for (const auto& [id, c] : sender.store().landscape().all()) {
                if (!c.status.isPublic() || c.isObsolete())
                    continue;
                bool offered = false;
                for (const auto& m : c.marks)
                    if (m.name == "sharedWith" && m.params.contains("peer") &&
                        m.params["peer"] == to)
                        offered = true;
                if (!offered)
                    ids.push_back(id);
            }
            if (ids.empty())
                continue;
            net.send(from, to, sender.offerShare(to, ids, sender.defaultContract()));
            offers++;
        }
    return offers;
}

// --- reports -----------------------------------------------------------------------

std::string outcomeReport(const ScenarioOutcome& o) {
    json j{{"digests", o.digests}, {"extra", o.extra},      {"messages", o.messages},
           {"replication", o.replication}, {"rounds", o.rounds}, {"scenario", o.scenario},
           {"seed", o.seed}};
    return j.dump(2) + "\n";
}

std::vector<std::string> scanTraceForLocal(const std::vector<SimEnvelope>& trace) {
    std::vector<std::string> leaks;
    for (const auto& env : trace) {
        WireMessage m = parseWire(env.line);
        if (m.msg != "SHARE_OFFER" && m.msg != "SERVE_BATCH" && m.msg != "SUBSCRIBE_INVITE")
            continue;
        if (!m.body.is_object() || !m.body.contains("contributions"))
            continue;
        for (const auto& cj : m.body["contributions"])
            if (cj.contains("status") && cj["status"].is_object() &&
                cj["status"].value("state", std::string{}) == "local")
                leaks.push_back("tick " + std::to_string(env.deliverTick) + " " + env.from +
                                "->" + env.to + " " + cj.value("id", std::string{}));
    }
    return leaks;
}

// --- scenario helpers ----------------------------------------------------------------

namespace {

constexpr const char* kSimDate = "2026-01-01";

Authorship simAuthor(const std::string& peer) { return Authorship{{peer}, kSimDate}; }

LandmarkId addNode(PeerNode& p, ConcreteType t, const std::string& label) {
    LandmarkId id = p.store().newId(p.now());
    p.store().append(makeVertex(id, label, t, {}, {simAuthor(p.peerId())}, p.now()));
    return id;
}

LandmarkId addEdge(PeerNode& p, ConcreteType t, const LandmarkId& from, const LandmarkId& to) {
    LandmarkId id = p.store().newId(p.now());
    p.store().append(makeEdge(id, t, from, to, "", {}, {simAuthor(p.peerId())}, p.now()));
    return id;
}

ShareContract republishable(const std::string& id) {
    ShareContract k;
    k.contractId = id;
    k.allowRepublish = true;
    return k;
}

void finish(ScenarioOutcome& o, const SimNetwork& net) {
    o.digests = net.digests();
    o.replication = net.replication();
    o.messages = net.messagesDelivered();
    o.rounds = net.currentTick();
    o.trace = net.trace();
}

std::optional<std::int64_t> rewardDistance(const PeerNode& p, const LandmarkId& id,
                                           const LandmarkId& rewardedId) {
    const Contribution* c = p.store().find(id);
    if (!c)
        return std::nullopt;
    for (const auto& m : c->marks)
        if (isRewarded(m)) {
            RewardInfo info = rewardInfo(m);
            if (info.rewardedId == rewardedId)
                return info.distance;
        }
    return std::nullopt;
}

// --- scenarios -------------------------------------------------------------------

// One published contribution floods a five-peer full mesh by word of mouth.
ScenarioOutcome runFloodPublic(std::uint64_t seed) {
    ScenarioOutcome o{"flood-public", seed};
    SimNetwork net(seed);
    const std::vector<std::string> names{"p0", "p1", "p2", "p3", "p4"};
    for (const auto& n : names)
        net.addPeer(n);
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            net.link(names[i], names[j]);

    PeerNode& p0 = net.peer("p0");
    LandmarkId target = addNode(p0, ConcreteType::Narrative,
                                "Knowledge travels by word of mouth.");
    p0.publish(target);

    int floodedAt = -1;
    for (int round = 0; round < 10; ++round) {
        gossipPublicStep(net);
        net.tick();
        if (floodedAt < 0 &&
            net.replication()[target.hex()] == static_cast<int>(names.size()))
            floodedAt = static_cast<int>(net.currentTick());
        if (floodedAt >= 0 && net.idle())
            break;
    }
    net.runUntilQuiet(10);
    finish(o, net);
    o.extra = json{{"floodedAtTick", floodedAt},
                   {"networkDiameter", 1},
                   {"target", target.hex()}};
    return o;
}

// Alice obsoletes c; Bob's batch {c, c', e} bounces at her door while c sits
// in limbo, then lands wholesale after the purge.
ScenarioOutcome runLimboFilter(std::uint64_t seed) {
    ScenarioOutcome o{"limbo-filter", seed};
    StoreConfig cfg;
    cfg.limboDuration = 5;
    SimNetwork net(seed, cfg);
    PeerNode& alice = net.addPeer("alice");
    PeerNode& bob = net.addPeer("bob");
    net.link("alice", "bob");
    ShareContract k = republishable("k-limbo");

    LandmarkId c = addNode(alice, ConcreteType::Narrative, "The sky is blue.");
    net.send("alice", "bob", alice.offerShare("bob", {c}, k));
    net.runUntilQuiet(5);

    Activities bobActs(bob.store(), "bob", kSimDate, bob.now());
    auto created = bobActs.annotate(
        {c, "support", NewContent{"Rayleigh scattering favours blue light.", {}, {}}, {}});
    LandmarkId cp = created.front(), e = created.back();

    Activities aliceActs(alice.store(), "alice", kSimDate, alice.now());
    aliceActs.obsolete(c);
    std::int64_t deadline = alice.store().graph().obsoleteSet.at(c);

    net.send("bob", "alice", bob.offerShare("alice", {c, cp, e}, k));
    net.runUntilQuiet(5);
    bool filteredOut = !alice.store().find(cp) && !alice.store().find(e);

    while (net.currentTick() <= deadline)
        net.tick();
    auto purged = alice.store().purgeLimbo(net.currentTick());

    net.send("bob", "alice", bob.offerShare("alice", {c, cp, e}, k));
    net.runUntilQuiet(5);
    bool landed = alice.store().find(c) && alice.store().find(cp) && alice.store().find(e);

    finish(o, net);
    json purgedIds = json::array();
    for (const auto& id : purged)
        purgedIds.push_back(id.hex());
    o.extra = json{{"deadline", deadline},
                   {"filteredWhileInLimbo", filteredOut},
                   {"landedAfterPurge", landed},
                   {"purged", purgedIds}};
    return o;
}

// A peer with no links: ticks alone change nothing.
ScenarioOutcome runNoPeers(std::uint64_t seed) {
    ScenarioOutcome o{"no-peers", seed};
    SimNetwork net(seed);
    PeerNode& solo = net.addPeer("solo");
    LandmarkId q = addNode(solo, ConcreteType::Question, "Does anyone hear me?");
    LandmarkId n = addNode(solo, ConcreteType::Narrative, "Not on this network.");
    addEdge(solo, ConcreteType::Answers, n, q);
    std::string before = canonicalDigest(solo.store().landscape()).hex();
    for (int i = 0; i < 10; ++i)
        net.tick();
    std::string after = canonicalDigest(solo.store().landscape()).hex();
    finish(o, net);
    o.extra = json{{"digestAfter", after}, {"digestBefore", before},
                   {"unchanged", before == after}};
    return o;
}

// Two peers serving each other disjoint topics: topic content flows, the
// off-topic remainder never does, and the territories never converge.
ScenarioOutcome runDisjointTopics(std::uint64_t seed) {
    ScenarioOutcome o{"disjoint-topics", seed};
    SimNetwork net(seed);
    PeerNode& alice = net.addPeer("alice");
    PeerNode& bob = net.addPeer("bob");
    net.link("alice", "bob");
    ShareContract k = republishable("k-topics");

    LandmarkId anchorA = addNode(alice, ConcreteType::Question,
                                 "How do passive houses stay warm?");
    LandmarkId a1 = addNode(alice, ConcreteType::Narrative,
                            "Thick insulation keeps the heat in.");
    addEdge(alice, ConcreteType::Answers, a1, anchorA);
    LandmarkId offA = addNode(alice, ConcreteType::Data, "Alice's private grocery list.");

    LandmarkId anchorB = addNode(bob, ConcreteType::Question, "Which birds migrate at night?");
    LandmarkId b1 = addNode(bob, ConcreteType::Narrative, "Many songbirds fly after dusk.");
    addEdge(bob, ConcreteType::Answers, b1, anchorB);
    LandmarkId offB = addNode(bob, ConcreteType::Data, "Bob's private reading list.");

    net.send("alice", "bob", alice.offerShare("bob", {anchorA}, k));
    net.send("bob", "alice", bob.offerShare("alice", {anchorB}, k));
    net.runUntilQuiet(5);

    SubscriptionRequest subA{Topic{anchorA, TopicExtent{1, {}}}, 1, 60, "alice", {}};
    SubscriptionRequest subB{Topic{anchorB, TopicExtent{1, {}}}, 1, 60, "bob", {}};
    net.send("bob", "alice", bob.subscribe(subA));
    net.send("alice", "bob", alice.subscribe(subB));

    bool everEqual = false;
    while (net.currentTick() < 50) {
        net.tick();
        auto d = net.digests();
        if (d.at("alice") == d.at("bob"))
            everEqual = true;
    }
    bool offTopicLeaked = bob.store().find(offA) || alice.store().find(offB);
    bool topicFlowed = bob.store().find(a1) && alice.store().find(b1);

    finish(o, net);
    o.extra = json{{"everEqual", everEqual},
                   {"offTopicLeaked", offTopicLeaked},
                   {"topicContentFlowed", topicFlowed}};
    return o;
}

// Carol's observation is rewarded; the reward trickles up the supports chain
// and crosses peers with minimal distances: Alice 2, Bob 1, Carol 0.
ScenarioOutcome runRewardChain(std::uint64_t seed) {
    ScenarioOutcome o{"reward-chain", seed};
    SimNetwork net(seed);
    PeerNode& alice = net.addPeer("alice");
    PeerNode& bob = net.addPeer("bob");
    PeerNode& carol = net.addPeer("carol");
    net.link("alice", "bob");
    net.link("bob", "carol");
    ShareContract k = republishable("k-chain");

    LandmarkId cC = addNode(carol, ConcreteType::Narrative, "Original observation by Carol.");
    net.send("carol", "bob", carol.offerShare("bob", {cC}, k));
    net.runUntilQuiet(5);

    LandmarkId cB = addNode(bob, ConcreteType::Narrative, "Bob builds on Carol's observation.");
    LandmarkId eB = addEdge(bob, ConcreteType::Supports, cB, cC);
    net.send("bob", "alice", bob.offerShare("alice", {cC, cB, eB}, k));
    net.runUntilQuiet(5);

    LandmarkId cA = addNode(alice, ConcreteType::Narrative, "Alice builds on Bob's idea.");
    LandmarkId eA = addEdge(alice, ConcreteType::Supports, cA, cB);

    alice.reward(cC, "bounty");
    int propagated = alice.trickleRewards();

    net.send("alice", "bob", alice.offerShare("bob", {cC, cB, eB, cA, eA}, k));
    net.runUntilQuiet(5);
    bob.trickleRewards();
    net.send("bob", "carol", bob.offerShare("carol", {cC, cB, eB, cA, eA}, k));
    net.runUntilQuiet(5);
    carol.trickleRewards();

    auto dist = [&](PeerNode& p, const LandmarkId& id) -> json {
        auto d = rewardDistance(p, id, cC);
        return d ? json(*d) : json(nullptr);
    };
    finish(o, net);
    o.extra = json{{"aliceDistances", json{{"cA", dist(alice, cA)},
                                           {"cB", dist(alice, cB)},
                                           {"cC", dist(alice, cC)}}},
                   {"bobDistances", json{{"cA", dist(bob, cA)},
                                         {"cB", dist(bob, cB)},
                                         {"cC", dist(bob, cC)}}},
                   {"carolDistances", json{{"cC", dist(carol, cC)}}},
                   {"propagatedOnAlice", propagated}};
    return o;
}

using ScenarioFn = ScenarioOutcome (*)(std::uint64_t);

const std::map<std::string, ScenarioFn>& scenarioTable() {
    static const std::map<std::string, ScenarioFn> table{
        {"disjoint-topics", runDisjointTopics}, {"flood-public", runFloodPublic},
        {"limbo-filter", runLimboFilter},       {"no-peers", runNoPeers},
        {"reward-chain", runRewardChain},
    };
    return table;
}

} // namespace

std::vector<std::string> listScenarios() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : scenarioTable())
        names.push_back(name);
    return names;
}

ScenarioOutcome runScenario(const std::string& name, std::uint64_t seed) {
    auto it = scenarioTable().find(name);
    throwIf(it == scenarioTable().end(), Errc::UnknownScenario, name);
    return it->second(seed);
}

} // namespace mmm
