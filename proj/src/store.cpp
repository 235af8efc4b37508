#include "mmm/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mmm/error.hpp"
#include "mmm/serialization.hpp"

using nlohmann::json;

namespace mmm {

namespace {

const std::set<LandmarkId> kEmptyIdSet;

json eventToJson(const Event& e) {
    return json{{"kind", e.kind == Event::Kind::Created ? "created" : "received"},
                {"payload", json::parse(e.payload)},
                {"peer", e.peer},
                {"rev", e.rev},
                {"seq", e.seq},
                {"tombstoned", e.tombstoned},
                {"wallclock", e.wallclock}};
}

Event eventFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "event record must be an object");
    Event e;
    auto kind = j.at("kind").get<std::string>();
    throwIf(kind != "created" && kind != "received", Errc::Malformed,
            "unknown event kind '" + kind + "'");
    e.kind = kind == "created" ? Event::Kind::Created : Event::Kind::Received;
    e.payload = j.at("payload").dump();
    e.peer = j.at("peer").get<std::string>();
    e.rev = j.at("rev").get<std::uint64_t>();
    e.seq = j.at("seq").get<std::uint64_t>();
    e.tombstoned = j.at("tombstoned").get<bool>();
    e.wallclock = j.at("wallclock").get<std::int64_t>();
    return e;
}

Contribution payloadContribution(const Event& e) {
    return contributionFromJson(json::parse(e.payload));
}

LandmarkId payloadId(const Event& e) {
    return LandmarkId::fromHex(json::parse(e.payload).at("id").get<std::string>());
}

void writeRecord(std::ostream& out, const std::string& bytes) {
    throwIf(bytes.size() > 0xffffffffull, Errc::Malformed, "event record too large");
    auto n = static_cast<std::uint32_t>(bytes.size());
    unsigned char len[4] = {static_cast<unsigned char>(n >> 24),
                            static_cast<unsigned char>(n >> 16),
                            static_cast<unsigned char>(n >> 8), static_cast<unsigned char>(n)};
    out.write(reinterpret_cast<const char*>(len), 4);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::string> readRecords(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    throwIf(!in, Errc::NotFound, "cannot open " + file.string());
    std::vector<std::string> records;
    for (;;) {
        unsigned char len[4];
        in.read(reinterpret_cast<char*>(len), 4);
        if (in.gcount() == 0)
            break;
        throwIf(in.gcount() != 4, Errc::Malformed, "truncated record length");
        std::uint32_t n = (std::uint32_t(len[0]) << 24) | (std::uint32_t(len[1]) << 16) |
                          (std::uint32_t(len[2]) << 8) | std::uint32_t(len[3]);
        std::string bytes(n, '\0');
        in.read(bytes.data(), n);
        throwIf(static_cast<std::uint32_t>(in.gcount()) != n, Errc::Malformed,
                "truncated record body");
        records.push_back(std::move(bytes));
    }
    return records;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    throwIf(!in, Errc::NotFound, "cannot open " + file.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void spill(const std::filesystem::path& file, const std::string& bytes) {
    auto tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        throwIf(!out, Errc::NotFound, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, file);
}

} // namespace

const std::set<LandmarkId>& GraphState::edgesAt(const LandmarkId& id) const {
    auto it = incident.find(id);
    return it == incident.end() ? kEmptyIdSet : it->second;
}

const std::set<LandmarkId>& GraphState::pensOf(const LandmarkId& id) const {
    auto it = penMembership.find(id);
    return it == penMembership.end() ? kEmptyIdSet : it->second;
}

TerritoryStore::TerritoryStore(StoreConfig cfg)
    : cfg_(cfg), ids_(cfg.idSeed ? IdGenerator(cfg.idSeed) : IdGenerator()),
      contracts_(std::make_shared<std::map<std::string, ShareContract>>()) {
    auto registry = contracts_;
    resolver_ = [registry](const std::string& ref) -> std::optional<ShareContract> {
        auto it = registry->find(ref);
        if (it == registry->end())
            return std::nullopt;
        return it->second;
    };
}

TerritoryStore TerritoryStore::open(const std::filesystem::path& dir, StoreConfig cfg) {
    TerritoryStore s(cfg);
    std::filesystem::create_directories(dir);
    s.dir_ = dir;
    auto contractsFile = dir / "contracts.json";
    if (std::filesystem::exists(contractsFile)) {
        json doc = json::parse(slurp(contractsFile));
        for (const auto& c : doc.at("contracts")) {
            auto contract = contractFromJson(c);
            (*s.contracts_)[contract.contractId] = contract;
        }
    }
    auto logFile = dir / "events.log";
    if (std::filesystem::exists(logFile)) {
        for (const auto& bytes : readRecords(logFile)) {
            Event e = eventFromJson(json::parse(bytes));
            throwIf(e.seq < s.nextSeq_, Errc::Malformed, "event log out of order");
            s.nextSeq_ = e.seq + 1;
            s.nextRev_ = std::max(s.nextRev_, e.rev + 1);
            s.events_.push_back(e);
            if (!e.tombstoned) {
                Contribution c = payloadContribution(e);
                s.eventAt_[c.id] = s.events_.size() - 1;
                s.graph_.landscape.put(c);
                s.indexContribution(*s.find(c.id));
                s.refreshDangling(c.id);
            }
        }
    }
    return s;
}

// --- indexing ------------------------------------------------------------

bool TerritoryStore::resolvesAllRefs(const Contribution& c) const {
    for (const auto& ep : c.endpoints())
        if (!graph_.landscape.contains(ep))
            return false;
    if (const auto* pen = c.pen())
        for (const auto& m : pen->contents)
            if (!graph_.landscape.contains(m))
                return false;
    return true;
}

namespace {

// A landmark `m` belongs to pen `p` via p's own contents or via any live
// pennedIn edge m -> p.
bool membershipHolds(const GraphState& g, const LandmarkId& m, const LandmarkId& p) {
    if (const Contribution* pen = g.landscape.find(p))
        if (const auto* pp = pen->pen(); pp && pp->contents.count(m) > 0)
            return true;
    for (const auto& eid : g.edgesAt(m)) {
        const Contribution* e = g.landscape.find(eid);
        if (e && e->ctype == ConcreteType::PennedIn) {
            const auto& u = std::get<UnidirEdgePayload>(e->payload);
            if (u.from == m && u.to == p)
                return true;
        }
    }
    return false;
}

void refreshMembership(GraphState& g, const LandmarkId& m, const LandmarkId& p) {
    if (membershipHolds(g, m, p)) {
        g.penMembership[m].insert(p);
    } else if (auto it = g.penMembership.find(m); it != g.penMembership.end()) {
        it->second.erase(p);
        if (it->second.empty())
            g.penMembership.erase(it);
    }
}

} // namespace

void TerritoryStore::indexContribution(const Contribution& c) {
    graph_.byContentKey[c.contentKey()].insert(c.id);
    for (const auto& ep : c.endpoints())
        graph_.incident[ep].insert(c.id);
    if (const auto* pen = c.pen())
        for (const auto& m : pen->contents)
            refreshMembership(graph_, m, c.id);
    if (c.ctype == ConcreteType::PennedIn) {
        const auto& u = std::get<UnidirEdgePayload>(c.payload);
        refreshMembership(graph_, u.from, u.to);
    }
    for (const auto& t : c.tags)
        graph_.tagIndex[t].insert(c.id);
    if (const auto* bi = std::get_if<BidirEdgePayload>(&c.payload)) {
        for (const auto& t : bi->tagsFwd)
            graph_.tagIndex[t].insert(c.id);
        for (const auto& t : bi->tagsBwd)
            graph_.tagIndex[t].insert(c.id);
    }
    if (auto m = findMark(c.marks, "obsolete"))
        graph_.obsoleteSet[c.id] = m->params.at("deadline").get<std::int64_t>();
    else
        graph_.obsoleteSet.erase(c.id);
    if (resolvesAllRefs(c))
        graph_.dangling.erase(c.id);
    else
        graph_.dangling.insert(c.id);
}

void TerritoryStore::unindexContribution(const Contribution& c) {
    auto dropFrom = [&](auto& map, const auto& key) {
        auto it = map.find(key);
        if (it == map.end())
            return;
        it->second.erase(c.id);
        if (it->second.empty())
            map.erase(it);
    };
    dropFrom(graph_.byContentKey, c.contentKey());
    for (const auto& ep : c.endpoints())
        dropFrom(graph_.incident, ep);
    for (const auto& t : c.tags)
        dropFrom(graph_.tagIndex, t);
    if (const auto* bi = std::get_if<BidirEdgePayload>(&c.payload)) {
        for (const auto& t : bi->tagsFwd)
            dropFrom(graph_.tagIndex, t);
        for (const auto& t : bi->tagsBwd)
            dropFrom(graph_.tagIndex, t);
    }
    graph_.obsoleteSet.erase(c.id);
    graph_.dangling.erase(c.id);
    // Membership refresh must run after the structural indices are updated.
    if (const auto* pen = c.pen())
        for (const auto& m : pen->contents)
            refreshMembership(graph_, m, c.id);
    if (c.ctype == ConcreteType::PennedIn) {
        const auto& u = std::get<UnidirEdgePayload>(c.payload);
        refreshMembership(graph_, u.from, u.to);
    }
}

void TerritoryStore::refreshDangling(const LandmarkId& arrivedOrLeft) {
    std::set<LandmarkId> referrers = graph_.edgesAt(arrivedOrLeft);
    for (const auto& p : graph_.pensOf(arrivedOrLeft))
        referrers.insert(p);
    for (const auto& r : referrers) {
        const Contribution* c = graph_.landscape.find(r);
        if (!c)
            continue;
        if (resolvesAllRefs(*c))
            graph_.dangling.erase(r);
        else
            graph_.dangling.insert(r);
    }
}

// --- context checks --------------------------------------------------------

int TerritoryStore::edgeDepthWith(const Contribution& c) const {
    // Depth against the live graph with `c` substituted for its own id.
    std::map<LandmarkId, int> memo;
    std::set<LandmarkId> onStack;
    std::function<int(const Contribution&)> depthOf = [&](const Contribution& e) -> int {
        if (auto it = memo.find(e.id); it != memo.end())
            return it->second;
        throwIf(onStack.count(e.id) > 0, Errc::InvariantViolation,
                "endpoint cycle through edge " + e.id.hex());
        onStack.insert(e.id);
        int depth = 0;
        for (const auto& ep : e.endpoints()) {
            const Contribution* t = ep == c.id ? &c : graph_.landscape.find(ep);
            if (t && t->isEdge())
                depth = std::max(depth, 1 + depthOf(*t));
        }
        onStack.erase(e.id);
        memo[e.id] = depth;
        return depth;
    };
    return depthOf(c);
}

void TerritoryStore::contextChecks(const Contribution& c) const {
    if (c.ctype == ConcreteType::PennedIn) {
        const auto& to = std::get<UnidirEdgePayload>(c.payload).to;
        const Contribution* target = graph_.landscape.find(to);
        throwIf(target != nullptr && !target->isPen(), Errc::PennedInTargetNotPen,
                "pennedIn edge targets non-pen " + to.hex());
    }
    if (c.isEdge())
        throwIf(edgeDepthWith(c) > kEdgeDepthCap, Errc::DepthCapExceeded,
                "edge nesting exceeds depth " + std::to_string(kEdgeDepthCap));
}

// --- writes ----------------------------------------------------------------

std::uint64_t TerritoryStore::append(const Contribution& c, Event::Kind kind,
                                     const std::string& peer, std::int64_t wallclock) {
    validateContribution(c);
    if (const Contribution* existing = find(c.id)) {
        throwIf(!mergeable(*existing, c), Errc::DuplicateIdConflict,
                "id " + c.id.hex() + " already holds different content");
        Contribution merged = mergeContribution(
            *existing, c, resolver_, [this](const ShareContract& sc) { registerContract(sc); });
        auto idx = eventAt_.at(c.id);
        if (!(merged == *existing)) {
            unindexContribution(*existing);
            graph_.landscape.put(merged);
            indexContribution(*find(c.id));
            refreshDangling(c.id);
            events_[idx].payload = contributionToJson(merged).dump();
            events_[idx].rev = nextRev_++;
            persistRewrite();
        }
        return events_[idx].seq;
    }
    contextChecks(c);
    Event e;
    e.seq = nextSeq_++;
    e.wallclock = wallclock;
    e.kind = kind;
    e.peer = peer;
    e.payload = contributionToJson(c).dump();
    e.rev = nextRev_++;
    events_.push_back(e);
    eventAt_[c.id] = events_.size() - 1;
    graph_.landscape.put(c);
    indexContribution(*find(c.id));
    refreshDangling(c.id);
    persistEventAppend(e);
    return e.seq;
}

void TerritoryStore::mutate(const LandmarkId& id,
                            const std::function<void(Contribution&)>& editor) {
    const Contribution* live = find(id);
    throwIf(live == nullptr, Errc::NotFound, "no contribution " + id.hex());
    Contribution next = *live;
    editor(next);
    throwIf(next.id != id, Errc::InvariantViolation, "mutation must not change the id");
    validateContribution(next);
    contextChecks(next);
    unindexContribution(*live);
    graph_.landscape.put(next);
    indexContribution(*find(id));
    refreshDangling(id);
    auto idx = eventAt_.at(id);
    events_[idx].payload = contributionToJson(next).dump();
    events_[idx].rev = nextRev_++;
    persistRewrite();
}

void TerritoryStore::drop(const LandmarkId& id) {
    const Contribution* live = find(id);
    if (!live)
        return;
    unindexContribution(*live);
    graph_.landscape.erase(id);
    refreshDangling(id);
    auto it = eventAt_.find(id);
    if (it != eventAt_.end()) {
        events_[it->second].tombstoned = true;
        eventAt_.erase(it);
    }
    persistRewrite();
}

int TerritoryStore::edgeDepth(const LandmarkId& id) const {
    const Contribution* c = find(id);
    if (!c || !c->isEdge())
        return 0;
    return edgeDepthWith(*c);
}

// --- reads -----------------------------------------------------------------

const Contribution& TerritoryStore::get(const LandmarkId& id) const {
    const Contribution* c = find(id);
    throwIf(c == nullptr, Errc::NotFound, "no contribution " + id.hex());
    return *c;
}

Landscape TerritoryStore::warmLandscape() const {
    Landscape out;
    for (const auto& [id, c] : graph_.landscape.all())
        if (!c.isRefrigerated())
            out.put(c);
    return out;
}

Landscape TerritoryStore::replayTo(std::uint64_t seq) const {
    throwIf(seq > latestSeq(), Errc::SeqOutOfRange,
            "seq " + std::to_string(seq) + " past latest " + std::to_string(latestSeq()));
    Landscape out;
    for (const auto& e : events_) {
        if (e.seq > seq)
            break;
        if (!e.tombstoned)
            out.put(payloadContribution(e));
    }
    return out;
}

// --- snapshots ---------------------------------------------------------------

Snapshot TerritoryStore::takeSnapshot() const {
    Snapshot s;
    s.atSeq = latestSeq();
    s.atRev = nextRev_ - 1;
    s.bytes = serializeLandscape(graph_.landscape);
    s.digestHex = sha256(s.bytes).hex();
    return s;
}

std::vector<Event> TerritoryStore::eventsAfter(const Snapshot& s) const {
    std::vector<Event> out;
    for (const auto& e : events_)
        if (e.tombstoned || e.seq > s.atSeq || e.rev > s.atRev)
            out.push_back(e);
    return out;
}

Landscape TerritoryStore::restoreAndReplay(const Snapshot& s, const std::vector<Event>& suffix) {
    throwIf(sha256(s.bytes).hex() != s.digestHex, Errc::DigestMismatch,
            "snapshot bytes do not match their digest");
    Landscape out = parseLandscape(s.bytes);
    for (const auto& e : suffix) {
        if (e.tombstoned)
            out.erase(payloadId(e));
        else if (e.seq > s.atSeq || e.rev > s.atRev)
            out.put(payloadContribution(e));
    }
    return out;
}

void TerritoryStore::writeSnapshotFiles(const Snapshot& s,
                                        const std::filesystem::path& basename) const {
    auto data = basename;
    data += ".mmm.json";
    spill(data, s.bytes);
    auto meta = basename;
    meta += ".meta.json";
    spill(meta, json{{"atRev", s.atRev}, {"atSeq", s.atSeq}, {"digest", s.digestHex}}.dump());
}

Snapshot TerritoryStore::readSnapshotFiles(const std::filesystem::path& basename) {
    Snapshot s;
    auto data = basename;
    data += ".mmm.json";
    s.bytes = slurp(data);
    auto meta = basename;
    meta += ".meta.json";
    json m = json::parse(slurp(meta));
    s.atSeq = m.at("atSeq").get<std::uint64_t>();
    s.atRev = m.at("atRev").get<std::uint64_t>();
    s.digestHex = m.at("digest").get<std::string>();
    return s;
}

// --- lifecycle ----------------------------------------------------------------

std::set<LandmarkId> TerritoryStore::purgeLimbo(std::int64_t now) {
    std::set<LandmarkId> due;
    for (const auto& [id, deadline] : graph_.obsoleteSet)
        if (now > deadline)
            due.insert(id);
    for (const auto& id : due)
        drop(id);
    return due;
}

void TerritoryStore::refrigerate(const LandmarkId& id) {
    const Contribution* c = find(id);
    throwIf(c == nullptr, Errc::NotFound, "no contribution " + id.hex());
    throwIf(c->isObsolete(), Errc::AlreadyObsolete, "cannot refrigerate " + id.hex());
    mutate(id, [](Contribution& x) { edit::setMark(x, makeRefrigerated()); });
}

// --- contracts --------------------------------------------------------------------

void TerritoryStore::registerContract(const ShareContract& c) {
    (*contracts_)[c.contractId] = c;
    persistContracts();
}

ShareContract TerritoryStore::resolveContract(const std::string& ref) const {
    if (auto found = resolver_(ref))
        return *found;
    ShareContract fallback;
    fallback.contractId = ref;
    return fallback;
}

LandmarkId TerritoryStore::newId(std::int64_t nowMillis) {
    LandmarkId id = ids_.next(nowMillis);
    while (find(id) != nullptr)
        id = ids_.next(nowMillis);
    return id;
}

// --- persistence -----------------------------------------------------------------

void TerritoryStore::persistEventAppend(const Event& e) {
    if (dir_.empty())
        return;
    std::ofstream out(dir_ / "events.log", std::ios::binary | std::ios::app);
    throwIf(!out, Errc::NotFound, "cannot append to event log");
    writeRecord(out, eventToJson(e).dump());
}

void TerritoryStore::persistRewrite() {
    if (dir_.empty())
        return;
    std::string bytes;
    {
        std::ostringstream buf;
        for (const auto& e : events_)
            writeRecord(buf, eventToJson(e).dump());
        bytes = buf.str();
    }
    spill(dir_ / "events.log", bytes);
}

void TerritoryStore::persistContracts() const {
    if (dir_.empty())
        return;
    json arr = json::array();
    for (const auto& [ref, c] : *contracts_)
        arr.push_back(contractToJson(c));
    spill(dir_ / "contracts.json", json{{"contracts", arr}}.dump());
}

} // namespace mmm
