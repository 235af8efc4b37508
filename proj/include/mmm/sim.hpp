// Deterministic in-process multi-peer simulation: seeded peers, a logical
// clock with next-tick message delivery, scripted scenarios, and reports.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mmm/sync.hpp"

namespace mmm {

// One message in flight or already delivered, kept for the trace.
struct SimEnvelope {
    std::int64_t deliverTick = 0;
    int seqNo = 0; // enqueue order, ties broken deterministically
    std::string from;
    std::string to;
    std::string line; // serialized wire message
};

class SimNetwork {
public:
    explicit SimNetwork(std::uint64_t seed, StoreConfig baseConfig = {});

    PeerNode& addPeer(const std::string& name);
    PeerNode& peer(const std::string& name); // throws NotFound
    std::vector<std::string> peerNames() const;

    void link(const std::string& a, const std::string& b);
    bool linked(const std::string& a, const std::string& b) const;

    // Queues a message for delivery on the next tick. Only linked peers
    // may talk to each other.
    void send(const std::string& from, const std::string& to, const WireMessage& msg);

    // Advances the clock one tick: updates peers' clocks, delivers every
    // due message (sorted by recipient, sender, enqueue order), queues the
    // replies, then lets each peer serve its subscriptions. Returns the
    // number of messages delivered.
    int tick();

    // Ticks until no messages are in flight, at most maxTicks more ticks.
    // Returns the number of ticks run.
    int runUntilQuiet(int maxTicks);

    std::int64_t currentTick() const { return tick_; }
    int messagesDelivered() const { return delivered_; }
    bool idle() const { return pending_.empty(); }

    const std::vector<SimEnvelope>& trace() const { return trace_; }
    std::mt19937_64& rng() { return rng_; }

    // Per-peer canonical landscape digests, and how many peers hold each
    // contribution id.
    std::map<std::string, std::string> digests() const;
    std::map<std::string, int> replication() const;

private:
    std::uint64_t seed_;
    StoreConfig baseConfig_;
    std::mt19937_64 rng_;
    std::int64_t tick_ = 0;
    int nextSeq_ = 0;
    int delivered_ = 0;
    std::map<std::string, std::unique_ptr<PeerNode>> peers_;
    std::set<std::pair<std::string, std::string>> links_;
    std::vector<SimEnvelope> pending_;
    std::vector<SimEnvelope> trace_;
};

// Every peer gossips its public, non-obsolete contributions to each linked
// neighbour that has not been offered them yet. Returns offers queued.
int gossipPublicStep(SimNetwork& net);

struct ScenarioOutcome {
    std::string scenario;
    std::uint64_t seed = 0;
    std::int64_t rounds = 0;
    int messages = 0;
    std::map<std::string, std::string> digests;
    std::map<std::string, int> replication;
    nlohmann::json extra = nlohmann::json::object();
    std::vector<SimEnvelope> trace; // full message trace for the scanners
};

// The canonical machine-readable report: sorted keys, stable bytes for
// identical (scenario, seed) runs. Excludes the trace.
std::string outcomeReport(const ScenarioOutcome& o);

std::vector<std::string> listScenarios();
ScenarioOutcome runScenario(const std::string& name, std::uint64_t seed); // UnknownScenario

// Offers found in a trace whose contributions still carry Local status —
// must always come back empty.
std::vector<std::string> scanTraceForLocal(const std::vector<SimEnvelope>& trace);

} // namespace mmm
