// Event-sourced territory store: one mostly-append-only event log per
// territory, a live indexed graph, snapshots, limbo purging, refrigeration,
// and coarse time travel (replay shows membership history with current
// payloads).
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmm/ids.hpp"
#include "mmm/landscape.hpp"

namespace mmm {

struct Event {
    enum class Kind { Created, Received };

    std::uint64_t seq = 0;
    std::int64_t wallclock = 0;
    Kind kind = Kind::Created;
    std::string peer;      // Received only: the sending peer
    std::string payload;   // canonical contribution JSON, rewritten on mutation
    bool tombstoned = false;
    std::uint64_t rev = 0; // global mutation stamp; bumped on every rewrite
};

struct Snapshot {
    std::uint64_t atSeq = 0;
    std::uint64_t atRev = 0;
    std::string digestHex; // sha256 of bytes
    std::string bytes;     // canonical landscape serialization
};

// Live graph plus the secondary indices every reader leans on. Endpoints and
// pen members are indexed even while the referenced landmark is absent; such
// referrers are additionally listed as dangling until the reference resolves.
struct GraphState {
    Landscape landscape;
    std::map<ContentKey, std::set<LandmarkId>> byContentKey;
    std::map<LandmarkId, std::set<LandmarkId>> incident;      // endpoint -> edges
    std::map<LandmarkId, std::set<LandmarkId>> penMembership; // member -> pens
    std::map<std::string, std::set<LandmarkId>> tagIndex;
    std::map<LandmarkId, std::int64_t> obsoleteSet; // id -> limbo deadline
    std::set<LandmarkId> dangling;

    // Edge ids incident on `id` (empty set when none).
    const std::set<LandmarkId>& edgesAt(const LandmarkId& id) const;
    const std::set<LandmarkId>& pensOf(const LandmarkId& id) const;
};

struct StoreConfig {
    std::int64_t limboDuration = 100; // logical ticks; 30 days in ms otherwise
    std::uint64_t idSeed = 0;         // 0 = entropy-seeded generator
};

inline constexpr std::int64_t kLimboDefaultMillis = 30ll * 24 * 60 * 60 * 1000;

class TerritoryStore {
public:
    explicit TerritoryStore(StoreConfig cfg = {});

    // Bind to a directory: loads events.log, snapshot and contracts when
    // present, otherwise starts a fresh persistent territory.
    static TerritoryStore open(const std::filesystem::path& dir, StoreConfig cfg = {});

    // --- writes -------------------------------------------------------------
    // Appends one event per new contribution. A homologue of an existing id
    // routes through mergeContribution and rewrites that event instead (no
    // new event); an id collision with unmergeable content is corruption.
    std::uint64_t append(const Contribution& c, Event::Kind kind = Event::Kind::Created,
                         const std::string& peer = {}, std::int64_t wallclock = 0);

    // In-place attribute mutation: runs editor on a copy, revalidates,
    // rewrites the stored payload, bumps the revision, refreshes indices.
    void mutate(const LandmarkId& id, const std::function<void(Contribution&)>& editor);

    // Drop from the live graph and tombstone the log event. Core of
    // purgeLimbo; exposed for sync's reject-outright path.
    void drop(const LandmarkId& id);

    // --- reads ---------------------------------------------------------------
    const GraphState& graph() const { return graph_; }
    const Landscape& landscape() const { return graph_.landscape; }
    const Contribution* find(const LandmarkId& id) const { return graph_.landscape.find(id); }
    const Contribution& get(const LandmarkId& id) const; // NotFound
    Landscape warmLandscape() const;                     // excludes refrigerated
    std::uint64_t latestSeq() const { return nextSeq_ - 1; }
    const std::vector<Event>& events() const { return events_; }

    // Live nesting depth of an edge (0 when no endpoint is an edge, and for
    // non-edges and absent ids).
    int edgeDepth(const LandmarkId& id) const;

    // --- time travel ------------------------------------------------------------
    Landscape replayTo(std::uint64_t seq) const; // SeqOutOfRange past latest

    // --- snapshots ---------------------------------------------------------------
    Snapshot takeSnapshot() const;
    // Events a restore of `s` still needs (newer seq, newer rev, or tombstoned).
    std::vector<Event> eventsAfter(const Snapshot& s) const;
    static Landscape restoreAndReplay(const Snapshot& s, const std::vector<Event>& suffix);

    // Persist/load the snapshot pair (<name>.mmm.json + <name>.meta.json).
    void writeSnapshotFiles(const Snapshot& s, const std::filesystem::path& basename) const;
    static Snapshot readSnapshotFiles(const std::filesystem::path& basename);

    // --- lifecycle ------------------------------------------------------------------
    // Deletes every obsolete contribution whose limbo deadline lies strictly
    // before `now`; their events are tombstoned. Returns the purged ids.
    std::set<LandmarkId> purgeLimbo(std::int64_t now);

    void refrigerate(const LandmarkId& id); // NotFound / AlreadyObsolete

    // --- contracts ----------------------------------------------------------------------
    void registerContract(const ShareContract& c);
    ShareContract resolveContract(const std::string& ref) const; // default when unknown
    const ContractResolver& resolver() const { return resolver_; }

    const StoreConfig& config() const { return cfg_; }
    IdGenerator& ids() { return ids_; }

    // Fresh id stamped with `nowMillis` (wallclock ms or sim tick).
    LandmarkId newId(std::int64_t nowMillis);

private:
    void indexContribution(const Contribution& c);
    void unindexContribution(const Contribution& c);
    void refreshDangling(const LandmarkId& arrivedOrLeft);
    bool resolvesAllRefs(const Contribution& c) const;
    void contextChecks(const Contribution& c) const; // pennedIn target, depth cap
    int edgeDepthWith(const Contribution& c) const;
    void persistEventAppend(const Event& e);
    void persistRewrite();
    void persistContracts() const;

    StoreConfig cfg_;
    IdGenerator ids_;
    GraphState graph_;
    std::vector<Event> events_;                 // ordered by seq
    std::map<LandmarkId, std::size_t> eventAt_; // id -> index into events_
    std::uint64_t nextSeq_ = 1;
    std::uint64_t nextRev_ = 1;
    // Shared so the resolver closure stays valid across moves of the store.
    std::shared_ptr<std::map<std::string, ShareContract>> contracts_;
    ContractResolver resolver_;
    std::filesystem::path dir_; // empty = in-memory
};

} // namespace mmm
