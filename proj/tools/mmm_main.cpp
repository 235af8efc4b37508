// Command-line front end: territory lifecycle, editing, querying, exploring,
// sharing plumbing, simulation, and time travel.
#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mmm/activities.hpp"
#include "mmm/error.hpp"
#include "mmm/explorer.hpp"
#include "mmm/serialization.hpp"
#include "mmm/sim.hpp"
#include "mmm/store.hpp"
#include "mmm/sync.hpp"
#include "mmm/topography.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmm;

namespace {

bool gJson = false;

std::int64_t nowMillis() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

std::string todayDate() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", &tm);
    return buf;
}

void emit(const json& machine, const std::string& human) {
    if (gJson)
        std::cout << machine.dump() << "\n";
    else
        std::cout << human << "\n";
}

// --- territory session -------------------------------------------------------

struct TerritoryConfig {
    std::string authorName = "anonymous";
    std::int64_t limboDuration = kLimboDefaultMillis;
    std::string filterRulesPath;
};

TerritoryConfig loadConfig(const fs::path& dir) {
    TerritoryConfig cfg;
    std::ifstream in(dir / "config.json");
    if (!in.good())
        return cfg;
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(Errc::Malformed, "unreadable territory config");
    cfg.authorName = j.value("authorName", cfg.authorName);
    cfg.limboDuration = j.value("limboDuration", cfg.limboDuration);
    cfg.filterRulesPath = j.value("filterRules", cfg.filterRulesPath);
    return cfg;
}

void saveConfig(const fs::path& dir, const TerritoryConfig& cfg) {
    json j{{"authorName", cfg.authorName}, {"limboDuration", cfg.limboDuration}};
    if (!cfg.filterRulesPath.empty())
        j["filterRules"] = cfg.filterRulesPath;
    std::ofstream out(dir / "config.json");
    out << j.dump(2) << "\n";
}

// One writer per territory: a lock file taken with O_EXCL for the lifetime
// of the invocation.
struct TerritoryLock {
    fs::path path;
    int fd = -1;

    explicit TerritoryLock(const fs::path& dir) : path(dir / ".lock") {
        fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            if (errno == EEXIST)
                throw Error(Errc::TerritoryLocked, "another session holds " + path.string());
            throw Error(Errc::Malformed, "cannot create lock file " + path.string());
        }
    }
    ~TerritoryLock() {
        if (fd >= 0) {
            ::close(fd);
            ::unlink(path.c_str());
        }
    }
    TerritoryLock(const TerritoryLock&) = delete;
    TerritoryLock& operator=(const TerritoryLock&) = delete;
};

struct Session {
    fs::path dir;
    TerritoryConfig cfg;
    TerritoryLock lock;
    TerritoryStore store;

    Session(const fs::path& d, TerritoryConfig c, StoreConfig scfg)
        : dir(d), cfg(std::move(c)), lock(d), store(TerritoryStore::open(d, scfg)) {}
};

std::string gTerritory;
std::string gAuthorOverride;

Session openSession() {
    if (gTerritory.empty()) {
        std::cerr << "error: no territory given (use --territory or MMM_TERRITORY)\n";
        std::exit(1);
    }
    fs::path dir(gTerritory);
    if (!fs::is_directory(dir)) {
        std::cerr << "error: territory " << dir.string() << " does not exist (run init first)\n";
        std::exit(1);
    }
    TerritoryConfig cfg = loadConfig(dir);
    if (!gAuthorOverride.empty())
        cfg.authorName = gAuthorOverride;
    StoreConfig scfg;
    scfg.limboDuration = cfg.limboDuration;
    return Session(dir, cfg, scfg);
}

// Ids are accepted as unambiguous lowercase-hex prefixes of 8+ characters.
LandmarkId resolveId(const TerritoryStore& store, const std::string& prefix) {
    throwIf(prefix.size() < 8, Errc::Malformed,
            "id prefix '" + prefix + "' is shorter than 8 hex characters");
    throwIf(prefix.size() > 32 ||
                prefix.find_first_not_of("0123456789abcdef") != std::string::npos,
            Errc::Malformed, "bad id prefix '" + prefix + "'");
    if (prefix.size() == 32)
        return LandmarkId::fromHex(prefix);
    if (prefix.find_first_not_of('0') == std::string::npos)
        return LandmarkId::pit();
    std::optional<LandmarkId> found;
    for (const auto& [id, c] : store.landscape().all()) {
        if (id.hex().rfind(prefix, 0) != 0)
            continue;
        throwIf(found.has_value(), Errc::AmbiguousPrefix,
                "prefix '" + prefix + "' matches several ids");
        found = id;
    }
    throwIf(!found, Errc::NotFound, "no id matches prefix '" + prefix + "'");
    return *found;
}

Authorship cliAuthorship(const Session& s) { return Authorship{{s.cfg.authorName}, todayDate()}; }

json idsToJson(const std::vector<LandmarkId>& ids) {
    json out = json::array();
    for (const auto& id : ids)
        out.push_back(id.hex());
    return out;
}

std::string describe(const TerritoryStore& store, const LandmarkId& id) {
    const Contribution* c = store.find(id);
    if (!c)
        return id.hex() + "  (absent)";
    std::string label = c->label.substr(0, 60);
    return id.hex() + "  " + std::string(typeName(c->ctype)) + "  " + label;
}

void emitIdList(const TerritoryStore& store, const std::vector<LandmarkId>& ids) {
    if (gJson) {
        std::cout << json{{"ids", idsToJson(ids)}}.dump() << "\n";
        return;
    }
    for (const auto& id : ids)
        std::cout << describe(store, id) << "\n";
    if (ids.empty())
        std::cout << "(none)\n";
}

json topicsFile(const fs::path& dir) {
    std::ifstream in(dir / "topics.json");
    if (!in.good())
        return json::object();
    json j = json::parse(in, nullptr, false);
    return j.is_object() ? j : json::object();
}

void saveTopicsFile(const fs::path& dir, const json& topics) {
    std::ofstream out(dir / "topics.json");
    out << topics.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mmm — a peer territory of typed, linked contributions"};
    app.require_subcommand(1);
    app.add_option("-t,--territory", gTerritory, "territory directory")
        ->envname("MMM_TERRITORY");
    app.add_option("--author", gAuthorOverride, "author name override");
    app.add_flag("--json", gJson, "machine-readable output, one object per line");

    // --- init ------------------------------------------------------------------
    auto* cInit = app.add_subcommand("init", "create a territory");
    std::string initAuthor = "anonymous";
    std::int64_t initLimbo = kLimboDefaultMillis;
    cInit->add_option("--author", initAuthor, "author name");
    cInit->add_option("--limbo", initLimbo, "limbo duration (ms)");
    cInit->callback([&] {
        if (gTerritory.empty()) {
            std::cerr << "error: no territory given (use --territory or MMM_TERRITORY)\n";
            std::exit(1);
        }
        fs::path dir(gTerritory);
        throwIf(fs::exists(dir / "config.json"), Errc::InvariantViolation,
                "territory already initialised: " + dir.string());
        fs::create_directories(dir);
        TerritoryConfig cfg;
        cfg.authorName = gAuthorOverride.empty() ? initAuthor : gAuthorOverride;
        cfg.limboDuration = initLimbo;
        saveConfig(dir, cfg);
        emit(json{{"author", cfg.authorName}, {"territory", dir.string()}},
             "initialised " + dir.string());
    });

    // --- add node / add edge ---------------------------------------------------------
    auto* cAdd = app.add_subcommand("add", "add a contribution");
    cAdd->require_subcommand(1);

    auto* cNode = cAdd->add_subcommand("node", "add a vertex");
    std::string nodeType, nodeLabel;
    std::vector<std::string> nodeTags;
    cNode->add_option("--type", nodeType, "vertex type")->required();
    cNode->add_option("--label", nodeLabel, "label text")->required();
    cNode->add_option("--tag", nodeTags, "tag (@...)");
    cNode->callback([&] {
        Session s = openSession();
        std::int64_t now = nowMillis();
        LandmarkId id = s.store.newId(now);
        s.store.append(makeVertex(id, nodeLabel, typeFromName(nodeType),
                                  {nodeTags.begin(), nodeTags.end()}, cliAuthorship(s), now));
        emit(json{{"id", id.hex()}}, id.hex());
    });

    auto* cEdge = cAdd->add_subcommand("edge", "add an edge");
    std::string edgeType, edgeFrom, edgeTo, edgeLabel, fwdLabel, bwdLabel;
    std::vector<std::string> edgeTags;
    cEdge->add_option("--type", edgeType, "edge type")->required();
    cEdge->add_option("--from", edgeFrom, "source id prefix")->required();
    cEdge->add_option("--to", edgeTo, "target id prefix")->required();
    cEdge->add_option("--label", edgeLabel, "label text");
    cEdge->add_option("--fwd-label", fwdLabel, "forward label (bidirectional types)");
    cEdge->add_option("--bwd-label", bwdLabel, "backward label (bidirectional types)");
    cEdge->add_option("--tag", edgeTags, "tag (@...)");
    cEdge->callback([&] {
        Session s = openSession();
        std::int64_t now = nowMillis();
        ConcreteType t = typeFromName(edgeType);
        throwIf(kindOf(t) != Kind::BidirectionalEdge && (!fwdLabel.empty() || !bwdLabel.empty()),
                Errc::KindMismatch, "directional labels need a bidirectional edge type");
        LandmarkId from = resolveId(s.store, edgeFrom);
        LandmarkId to = resolveId(s.store, edgeTo);
        LandmarkId id = s.store.newId(now);
        std::set<std::string> tags(edgeTags.begin(), edgeTags.end());
        Contribution c =
            kindOf(t) == Kind::BidirectionalEdge
                ? makeBidirEdge(id, t, from, to, edgeLabel, fwdLabel, bwdLabel, tags, {}, {},
                                cliAuthorship(s), now)
                : makeEdge(id, t, from, to, edgeLabel, tags, cliAuthorship(s), now);
        s.store.append(c);
        emit(json{{"id", id.hex()}}, id.hex());
    });

    // --- pens ---------------------------------------------------------------------
    auto* cPen = app.add_subcommand("pen", "pens (containers)");
    cPen->require_subcommand(1);

    auto* cPenNew = cPen->add_subcommand("new", "create an empty pen");
    std::string penType, penLabel;
    cPenNew->add_option("--type", penType, "pen type")->required();
    cPenNew->add_option("--label", penLabel, "label text");
    cPenNew->callback([&] {
        Session s = openSession();
        std::int64_t now = nowMillis();
        LandmarkId id = s.store.newId(now);
        s.store.append(makePen(id, typeFromName(penType), penLabel, {}, {}, cliAuthorship(s),
                               now));
        emit(json{{"id", id.hex()}}, id.hex());
    });

    auto* cPenAdd = cPen->add_subcommand("add", "pen a member into a pen");
    std::string penMember, penTarget;
    cPenAdd->add_option("member", penMember, "member id prefix")->required();
    cPenAdd->add_option("pen", penTarget, "pen id prefix")->required();
    cPenAdd->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        LandmarkId edge =
            acts.mutablePenAdd(resolveId(s.store, penMember), resolveId(s.store, penTarget));
        emit(json{{"edgeId", edge.hex()}}, edge.hex());
    });

    // --- annotate / redflag / obsolete ------------------------------------------------
    auto* cAnnotate = app.add_subcommand("annotate", "apply an annotation pattern");
    std::string annPattern, annTarget, annLabel, annType;
    std::vector<std::string> annTags, annEdgeTags;
    cAnnotate->add_option("--pattern", annPattern, "pattern name")->required();
    cAnnotate->add_option("--target", annTarget, "target id prefix")->required();
    cAnnotate->add_option("--label", annLabel, "new node label")->required();
    cAnnotate->add_option("--type", annType, "override the pattern's node type");
    cAnnotate->add_option("--tag", annTags, "tag for the new node");
    cAnnotate->add_option("--edge-tag", annEdgeTags, "tag for the connecting edge");
    cAnnotate->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        AnnotationRequest req;
        req.targetId = resolveId(s.store, annTarget);
        req.pattern = annPattern;
        req.newContent.label = annLabel;
        if (!annType.empty())
            req.newContent.type = typeFromName(annType);
        req.newContent.tags = {annTags.begin(), annTags.end()};
        req.edgeTags = {annEdgeTags.begin(), annEdgeTags.end()};
        auto ids = acts.annotate(req);
        emit(json{{"ids", idsToJson(ids)}}, ids.front().hex() + " " + ids.back().hex());
    });

    auto* cRedflag = app.add_subcommand("redflag", "contest a contribution");
    std::string rfTarget, rfReason;
    cRedflag->add_option("id", rfTarget, "target id prefix")->required();
    cRedflag->add_option("--reason", rfReason, "why it is contested")->required();
    cRedflag->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        LandmarkId edge = acts.redFlag(resolveId(s.store, rfTarget), rfReason);
        emit(json{{"edgeId", edge.hex()}}, edge.hex());
    });

    auto* cObsolete = app.add_subcommand("obsolete", "send into limbo (with incident edges)");
    std::string obsTarget;
    cObsolete->add_option("id", obsTarget, "target id prefix")->required();
    cObsolete->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        auto marked = acts.obsolete(resolveId(s.store, obsTarget));
        emitIdList(s.store, {marked.begin(), marked.end()});
    });

    // --- version / merge ---------------------------------------------------------------
    auto* cVersion = app.add_subcommand("version", "replace with a new version");
    std::string verTarget, verLabel, verType;
    bool verEquivalent = false;
    cVersion->add_option("id", verTarget, "old version id prefix")->required();
    cVersion->add_option("--label", verLabel, "new version label")->required();
    cVersion->add_option("--type", verType, "new version type (same kind)");
    cVersion->add_flag("--equivalent", verEquivalent, "redirect edges automatically");
    cVersion->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        NewContent content{verLabel, {}, {}};
        if (!verType.empty())
            content.type = typeFromName(verType);
        VersionReport rep = acts.versionReplace(resolveId(s.store, verTarget), content,
                                                verEquivalent);
        emit(json{{"needsManualRedirect", idsToJson(rep.needsManualRedirect)},
                  {"newId", rep.newId.hex()}},
             rep.newId.hex());
    });

    auto* cMerge = app.add_subcommand("merge", "merge two contributions");
    std::string mergeA, mergeB, mergeKeep;
    bool mergeRelaxed = false;
    cMerge->add_option("a", mergeA, "first id prefix")->required();
    cMerge->add_option("b", mergeB, "second id prefix")->required();
    cMerge->add_flag("--relaxed", mergeRelaxed, "equivalence link instead of strict merge");
    cMerge->add_option("--keep", mergeKeep, "survivor id prefix (relaxed mode)");
    cMerge->callback([&] {
        Session s = openSession();
        Activities acts(s.store, s.cfg.authorName, todayDate(), nowMillis());
        LandmarkId a = resolveId(s.store, mergeA);
        LandmarkId b = resolveId(s.store, mergeB);
        if (mergeRelaxed) {
            if (mergeKeep.empty()) {
                std::cerr << "error: --relaxed needs --keep\n";
                std::exit(1);
            }
            LandmarkId keep = resolveId(s.store, mergeKeep);
            acts.relaxedMerge(a, b, keep);
            emit(json{{"kept", keep.hex()}}, keep.hex());
        } else {
            LandmarkId survivor = acts.mergeDuplicates(a, b);
            emit(json{{"survivor", survivor.hex()}}, survivor.hex());
        }
    });

    // --- publish -------------------------------------------------------------------------
    auto* cPublish = app.add_subcommand("publish", "make a contribution public (irreversible)");
    std::string pubTarget;
    cPublish->add_option("id", pubTarget, "target id prefix")->required();
    cPublish->callback([&] {
        Session s = openSession();
        LandmarkId id = resolveId(s.store, pubTarget);
        publishContribution(s.store, id);
        emit(json{{"id", id.hex()}, {"status", "public"}}, id.hex() + " is now public");
    });

    // --- query / search / explore ----------------------------------------------------------
    auto* cQuery = app.add_subcommand("query", "selective search (id:/type:/tag:/after:/before:/authors>=)");
    std::string queryText;
    cQuery->add_option("query", queryText, "query string")->required();
    cQuery->callback([&] {
        Session s = openSession();
        Area area = search(s.store.graph(), queryText, SearchMode::Selective);
        emitIdList(s.store, {area.begin(), area.end()});
    });

    auto* cSearch = app.add_subcommand("search", "approximate text search");
    std::string searchText;
    cSearch->add_option("text", searchText, "free text")->required();
    cSearch->callback([&] {
        Session s = openSession();
        Area area = search(s.store.graph(), searchText, SearchMode::Approximate);
        emitIdList(s.store, {area.begin(), area.end()});
    });

    auto* cExplore = app.add_subcommand("explore", "constrained traversal from a landmark");
    std::string expFrom, expDirection = "any";
    int expMaxEdges = 2;
    std::vector<std::string> expExcludeTags, expTypes;
    cExplore->add_option("--from", expFrom, "start id prefix")->required();
    cExplore->add_option("--max-edges", expMaxEdges, "edge crossing budget");
    cExplore->add_option("--exclude-tag", expExcludeTags, "skip edges carrying this tag");
    cExplore->add_option("--type", expTypes, "restrict traversable edge types");
    cExplore->add_option("--direction", expDirection, "any|forwardOnly|backwardOnly");
    cExplore->callback([&] {
        Session s = openSession();
        WayfarerConfig cfg;
        cfg.maxEdges = expMaxEdges;
        cfg.directionPolicy = directionPolicyFromName(expDirection);
        cfg.excludedTags = {expExcludeTags.begin(), expExcludeTags.end()};
        for (const auto& t : expTypes)
            cfg.traversableTypes.insert(typeFromName(t));
        Area area = wayfarerExplore(s.store.graph(), resolveId(s.store, expFrom), cfg);
        emitIdList(s.store, {area.begin(), area.end()});
    });

    // --- metrics ------------------------------------------------------------------------------
    auto* cMetrics = app.add_subcommand("metrics", "landscape metrics for a contribution");
    std::string metTarget, metTo;
    cMetrics->add_option("id", metTarget, "target id prefix")->required();
    cMetrics->add_option("--to", metTo, "second landmark for the distance metric");
    cMetrics->callback([&] {
        Session s = openSession();
        const GraphState& g = s.store.graph();
        LandmarkId id = resolveId(s.store, metTarget);
        Rational mat = maturity(g, id);
        Rational rel = reliability(g, id);
        json out{{"depth", depth(g, id)},
                 {"id", id.hex()},
                 {"maturity", mat.str()},
                 {"redFlags", redFlagCount(g, id)},
                 {"reliability", rel.str()}};
        std::string human = id.hex() + "  depth=" + std::to_string(depth(g, id)) +
                            "  maturity=" + mat.str() + "  reliability=" + rel.str() +
                            "  redFlags=" + std::to_string(redFlagCount(g, id));
        if (!metTo.empty()) {
            auto d = distance(g, id, resolveId(s.store, metTo));
            out["distance"] = d ? json(*d) : json(nullptr);
            human += "  distance=" + (d ? std::to_string(*d) : std::string("unreachable"));
        }
        emit(out, human);
    });

    // --- topics / subscriptions -------------------------------------------------------------------
    auto* cTopic = app.add_subcommand("topic", "named topics");
    cTopic->require_subcommand(1);
    auto* cTopicNew = cTopic->add_subcommand("new", "define a topic");
    std::string topicAnchor, topicName;
    int topicRadius = 1;
    cTopicNew->add_option("--anchor", topicAnchor, "anchor id prefix")->required();
    cTopicNew->add_option("--radius", topicRadius, "extent radius")->required();
    cTopicNew->add_option("--name", topicName, "topic name");
    cTopicNew->callback([&] {
        Session s = openSession();
        LandmarkId anchor = resolveId(s.store, topicAnchor);
        throwIf(topicRadius < 0, Errc::Malformed, "radius must be non-negative");
        std::string name = topicName.empty() ? anchor.hex().substr(0, 8) : topicName;
        json topics = topicsFile(s.dir);
        topics[name] = json{{"anchor", anchor.hex()}, {"radius", topicRadius}};
        saveTopicsFile(s.dir, topics);
        Topic t{anchor, TopicExtent{topicRadius, {}}};
        Area area = topicExtentArea(s.store.graph(), t);
        emit(json{{"anchor", anchor.hex()}, {"extentSize", area.size()}, {"name", name}},
             name + ": anchor " + anchor.hex() + ", extent " + std::to_string(area.size()) +
                 " landmarks");
    });

    auto* cSubscribe = app.add_subcommand("subscribe", "subscribe to a topic served by a peer");
    std::string subTopic, subPeer;
    int subFreq = 1;
    std::int64_t subUntil = 0;
    cSubscribe->add_option("--topic", subTopic, "topic name (see `topic new`)")->required();
    cSubscribe->add_option("--peer", subPeer, "serving peer")->required();
    cSubscribe->add_option("--freq", subFreq, "serve every N ticks");
    cSubscribe->add_option("--until", subUntil, "subscription end")->required();
    cSubscribe->callback([&] {
        Session s = openSession();
        json topics = topicsFile(s.dir);
        throwIf(!topics.contains(subTopic), Errc::NotFound, "no topic named " + subTopic);
        SubscriptionRequest req;
        req.topic.anchorId = LandmarkId::fromHex(topics[subTopic]["anchor"].get<std::string>());
        req.topic.extent.radius = topics[subTopic]["radius"].get<int>();
        req.frequency = subFreq;
        req.until = subUntil;
        req.servingPeer = subPeer;
        WireMessage msg = subscribeOnAnchor(s.store, req, s.cfg.authorName, nowMillis());
        emit(json{{"anchor", req.topic.anchorId.hex()}, {"wire", msg.body}},
             serializeWire(msg));
    });

    // --- sim -----------------------------------------------------------------------------------------
    auto* cSim = app.add_subcommand("sim", "deterministic multi-peer simulation");
    cSim->require_subcommand(1);
    auto* cSimRun = cSim->add_subcommand("run", "run a scenario");
    std::string simScenario, simOut;
    std::uint64_t simSeed = 1;
    cSimRun->add_option("scenario", simScenario, "scenario name")->required();
    cSimRun->add_option("--seed", simSeed, "deterministic seed");
    cSimRun->add_option("--out", simOut, "write the report to a file");
    cSimRun->callback([&] {
        ScenarioOutcome o = runScenario(simScenario, simSeed);
        std::string report = outcomeReport(o);
        if (!simOut.empty()) {
            std::ofstream out(simOut);
            out << report;
            emit(json{{"report", simOut}, {"scenario", simScenario}}, "wrote " + simOut);
        } else {
            std::cout << report;
        }
    });
    auto* cSimList = cSim->add_subcommand("list", "list scenarios");
    cSimList->callback([&] {
        json names = json::array();
        for (const auto& n : listScenarios()) {
            names.push_back(n);
            if (!gJson)
                std::cout << n << "\n";
        }
        if (gJson)
            std::cout << json{{"scenarios", names}}.dump() << "\n";
    });

    // --- time travel / snapshots -----------------------------------------------------------------------
    auto* cTimetravel = app.add_subcommand("timetravel", "reconstruct a past landscape");
    std::uint64_t ttAt = 0;
    cTimetravel->add_option("--at", ttAt, "event sequence number")->required();
    cTimetravel->callback([&] {
        Session s = openSession();
        Landscape past = s.store.replayTo(ttAt);
        emit(json{{"at", ttAt},
                  {"digest", canonicalDigest(past).hex()},
                  {"landmarks", past.size()}},
             "seq " + std::to_string(ttAt) + ": " + std::to_string(past.size()) +
                 " landmarks, digest " + canonicalDigest(past).hex());
    });

    auto* cSnapshot = app.add_subcommand("snapshot", "write a snapshot of the live landscape");
    cSnapshot->callback([&] {
        Session s = openSession();
        Snapshot snap = s.store.takeSnapshot();
        fs::path base = s.dir / ("snapshot-" + std::to_string(snap.atSeq));
        s.store.writeSnapshotFiles(snap, base);
        emit(json{{"atSeq", snap.atSeq}, {"digest", snap.digestHex}, {"file", base.string()}},
             "snapshot at seq " + std::to_string(snap.atSeq) + " -> " + base.string() +
                 ".mmm.json");
    });

    // --- rewards ------------------------------------------------------------------------------------------
    auto* cReward = app.add_subcommand("reward", "mark a contribution as rewarded");
    std::string rwTarget, rwDescriptor;
    cReward->add_option("id", rwTarget, "target id prefix")->required();
    cReward->add_option("--descriptor", rwDescriptor, "reward descriptor")->required();
    cReward->callback([&] {
        Session s = openSession();
        LandmarkId id = resolveId(s.store, rwTarget);
        rewardContribution(s.store, id, rwDescriptor);
        emit(json{{"descriptor", rwDescriptor}, {"id", id.hex()}}, id.hex() + " rewarded");
    });

    auto* cTrickle = app.add_subcommand("trickle", "propagate reward marks one fixpoint pass");
    cTrickle->callback([&] {
        Session s = openSession();
        int n = trickleRewardsOnce(s.store);
        emit(json{{"propagated", n}}, std::to_string(n) + " marks propagated");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        if (gJson)
            std::cerr << json{{"error", e.name()}, {"detail", e.what()}}.dump() << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
