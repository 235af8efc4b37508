// End-to-end tests for the mmm command-line tool, run as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmm/error.hpp"
#include "mmm/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mmm;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratchRoot() {
    fs::path root = fs::temp_directory_path() / "mmm-cli-tests";
    fs::create_directories(root);
    return root;
}

// Runs the CLI binary through the shell so redirection and env prefixes work.
RunResult runRaw(const std::string& commandLine) {
    fs::path root = scratchRoot();
    fs::path outP = root / "last.out", errP = root / "last.err";
    std::string cmd =
        commandLine + " >" + outP.string() + " 2>" + errP.string();
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(outP);
    r.err = slurp(errP);
    return r;
}

const std::string kBin = MMM_CLI_PATH;

RunResult cli(const fs::path& territory, const std::string& args, bool jsonMode = true) {
    std::string cmd = kBin + " --territory " + territory.string();
    if (jsonMode)
        cmd += " --json";
    return runRaw(cmd + " " + args);
}

fs::path freshTerritory(const std::string& name) {
    fs::path dir = scratchRoot() / name;
    fs::remove_all(dir);
    return dir;
}

fs::path initTerritory(const std::string& name, const std::string& author = "tess") {
    fs::path dir = freshTerritory(name);
    RunResult r = cli(dir, "init --author " + author);
    REQUIRE(r.code == 0);
    return dir;
}

// First line of stdout parsed as a JSON object.
json firstJson(const RunResult& r) {
    REQUIRE_FALSE(r.out.empty());
    return json::parse(r.out.substr(0, r.out.find('\n')));
}

std::string errorName(const RunResult& r) {
    REQUIRE(r.code == 2);
    return json::parse(r.err).value("error", std::string{});
}

std::string addNode(const fs::path& dir, const std::string& type, const std::string& label) {
    RunResult r = cli(dir, "add node --type " + type + " --label '" + label + "'");
    REQUIRE(r.code == 0);
    return firstJson(r)["id"].get<std::string>();
}

std::string addEdge(const fs::path& dir, const std::string& type, const std::string& from,
                    const std::string& to) {
    RunResult r = cli(dir, "add edge --type " + type + " --from " + from + " --to " + to);
    REQUIRE(r.code == 0);
    return firstJson(r)["id"].get<std::string>();
}

std::vector<std::string> idList(const RunResult& r) {
    std::vector<std::string> ids;
    for (const auto& v : firstJson(r)["ids"])
        ids.push_back(v.get<std::string>());
    return ids;
}

} // namespace

TEST_CASE("init creates a territory once and respects global flags") {
    fs::path dir = freshTerritory("t-init");

    RunResult first = cli(dir, "init --author alice", /*jsonMode=*/false);
    CHECK(first.code == 0);
    CHECK(first.out.find("initialised") != std::string::npos);
    CHECK(fs::exists(dir / "config.json"));

    RunResult again = cli(dir, "init --author alice");
    CHECK(errorName(again) == "InvariantViolation");

    // No territory anywhere -> usage error on stderr, exit 1.
    RunResult lost = runRaw(kBin + " init");
    CHECK(lost.code == 1);
    CHECK(lost.err.find("territory") != std::string::npos);

    // The territory option may come from the environment instead.
    fs::path envDir = freshTerritory("t-env");
    RunResult env = runRaw("MMM_TERRITORY=" + envDir.string() + " " + kBin + " init");
    CHECK(env.code == 0);
    CHECK(fs::exists(envDir / "config.json"));

    // Commands against a directory that was never initialised fail fast.
    RunResult noDir = cli(freshTerritory("t-ghost"), "query 'type:question'");
    CHECK(noDir.code == 1);
    CHECK(noDir.err.find("does not exist") != std::string::npos);

    // Unknown subcommands and missing required options are parse errors.
    CHECK(runRaw(kBin + " bogus").code == 1);
    CHECK(cli(dir, "add node").code == 1);
}

TEST_CASE("add and query round-trip through the persisted store") {
    fs::path dir = initTerritory("t-roundtrip");

    RunResult tagged = cli(dir, "add node --type question --label 'Why is the sky blue?' "
                                "--tag @sky");
    REQUIRE(tagged.code == 0);
    std::string qid = firstJson(tagged)["id"].get<std::string>();
    CHECK(qid.size() == 32);

    std::string nid = addNode(dir, "narrative", "Rayleigh scattering.");
    std::string eid = addEdge(dir, "answers", nid, qid);

    RunResult byType = cli(dir, "query 'type:question'");
    CHECK(idList(byType) == std::vector<std::string>{qid});
    RunResult byTag = cli(dir, "query 'tag:sky'");
    CHECK(idList(byTag) == std::vector<std::string>{qid});

    // Plain mode prints one description line per hit.
    RunResult plain = cli(dir, "query 'type:question'", /*jsonMode=*/false);
    CHECK(plain.out.find(qid) != std::string::npos);
    CHECK(plain.out.find("question") != std::string::npos);
    CHECK(plain.out.find("Why is the sky blue?") != std::string::npos);

    CHECK(errorName(cli(dir, "query 'type:hunch'")) == "MalformedQuery");
    CHECK(errorName(cli(dir, "add node --type hunch --label x")) == "UnknownType");

    // The store on disk saw all three appends.
    TerritoryStore store = TerritoryStore::open(dir);
    CHECK(store.latestSeq() == 3);
    const Contribution* q = store.find(LandmarkId::fromHex(qid));
    REQUIRE(q != nullptr);
    CHECK(q->label == "Why is the sky blue?");
    CHECK(q->tags.count("@sky") == 1);
    const Contribution* e = store.find(LandmarkId::fromHex(eid));
    REQUIRE(e != nullptr);
    auto eps = e->endpoints();
    REQUIRE(eps.size() == 2);
    CHECK(eps[0].hex() == nid);
    CHECK(eps[1].hex() == qid);

    // Approximate search finds by shared words.
    RunResult approx = cli(dir, "search 'blue sky'");
    auto hits = idList(approx);
    CHECK(std::find(hits.begin(), hits.end(), qid) != hits.end());
}

TEST_CASE("id prefixes resolve uniquely, ambiguity and bad hex are rejected") {
    fs::path dir = freshTerritory("t-prefix");
    fs::create_directories(dir);
    {
        TerritoryStore store = TerritoryStore::open(dir);
        Authorship by{{"seed"}, "2026-03-01"};
        store.append(makeVertex(LandmarkId::fromHex("aaaaaaaa000000000000000000000001"),
                                "first twin", ConcreteType::Narrative, {}, by, 10));
        store.append(makeVertex(LandmarkId::fromHex("aaaaaaaa000000000000000000000002"),
                                "second twin", ConcreteType::Narrative, {}, by, 10));
        store.append(makeVertex(LandmarkId::fromHex("bbbbbbbb000000000000000000000001"),
                                "loner", ConcreteType::Question, {}, by, 10));
    }

    CHECK(errorName(cli(dir, "metrics aaaaaaaa")) == "AmbiguousPrefix");
    CHECK(errorName(cli(dir, "metrics aaaa")) == "Malformed");        // shorter than 8
    CHECK(errorName(cli(dir, "metrics AAAAAAAA")) == "Malformed");    // not lowercase hex
    CHECK(errorName(cli(dir, "metrics cccccccc")) == "NotFound");

    RunResult unique = cli(dir, "metrics bbbbbbbb");
    CHECK(unique.code == 0);
    CHECK(firstJson(unique)["id"] == "bbbbbbbb000000000000000000000001");

    // A full 32-character id needs no lookup, so edges may dangle toward
    // landmarks that have not arrived yet.
    std::string far = "cccccccc000000000000000000000009";
    RunResult dangling = cli(dir, "add edge --type relatesTo --from bbbbbbbb --to " + far);
    CHECK(dangling.code == 0);
    {
        TerritoryStore store = TerritoryStore::open(dir);
        CHECK(store.graph().dangling.count(LandmarkId::fromHex(far)) == 1);
    }

    // The all-zero prefix names the pit, which refuses a red flag on itself.
    CHECK(errorName(cli(dir, "redflag 00000000 --reason 'no'")) == "SelfEndpoint");
}

TEST_CASE("edge kinds are validated at the command line") {
    fs::path dir = initTerritory("t-edges");
    std::string a = addNode(dir, "narrative", "first");
    std::string b = addNode(dir, "narrative", "second");

    RunResult bad = cli(dir, "add edge --type answers --from " + a + " --to " + b +
                                 " --fwd-label onward");
    CHECK(errorName(bad) == "KindMismatch");

    RunResult bidir = cli(dir, "add edge --type differsFrom --from " + a + " --to " + b +
                                   " --fwd-label 'more cautious' --bwd-label 'bolder'");
    CHECK(bidir.code == 0);

    RunResult loop = cli(dir, "add edge --type relatesTo --from " + a + " --to " + a);
    CHECK(errorName(loop) == "SelfEndpoint");
}

TEST_CASE("landscape activities drive the store from the command line") {
    fs::path dir = initTerritory("t-acts");
    std::string n = addNode(dir, "narrative", "Bees navigate by polarised light.");

    RunResult ann = cli(dir, "annotate --pattern question --target " + n +
                                 " --label 'How was this measured?'");
    REQUIRE(ann.code == 0);
    auto created = idList(ann);
    REQUIRE(created.size() == 2);

    RunResult defAnn = cli(dir, "annotate --pattern define --target " + n +
                                    " --label 'polarised light'");
    REQUIRE(defAnn.code == 0);
    CHECK(idList(defAnn).size() == 3); // node, pen, edge

    CHECK(errorName(cli(dir, "annotate --pattern sparkle --target " + n + " --label x")) ==
          "PatternArityError");

    RunResult flag = cli(dir, "redflag " + n + " --reason 'needs a citation'");
    REQUIRE(flag.code == 0);
    RunResult met = cli(dir, "metrics " + n);
    CHECK(firstJson(met)["redFlags"] == 1);

    // Obsoleting the narrative pulls in its incident edges.
    RunResult obs = cli(dir, "obsolete " + n);
    REQUIRE(obs.code == 0);
    auto marked = idList(obs);
    CHECK(marked.size() == 4); // n + questions-edge + pertains-edge + flag edge
    CHECK(std::find(marked.begin(), marked.end(), n) != marked.end());
    {
        TerritoryStore store = TerritoryStore::open(dir);
        CHECK(store.graph().obsoleteSet.count(LandmarkId::fromHex(n)) == 1);
    }
}

TEST_CASE("versioning and merging from the command line") {
    fs::path dir = initTerritory("t-version");
    std::string old = addNode(dir, "narrative", "Early phrasing.");
    std::string q = addNode(dir, "question", "What is the phrasing?");
    addEdge(dir, "answers", old, q);

    RunResult ver = cli(dir, "version " + old + " --label 'Careful phrasing.' --equivalent");
    REQUIRE(ver.code == 0);
    json verj = firstJson(ver);
    std::string newId = verj["newId"].get<std::string>();
    CHECK(verj["needsManualRedirect"].empty());
    {
        TerritoryStore store = TerritoryStore::open(dir);
        const Contribution* fresh = store.find(LandmarkId::fromHex(newId));
        REQUIRE(fresh != nullptr);
        CHECK(fresh->label == "Careful phrasing.");
        CHECK(store.graph().obsoleteSet.count(LandmarkId::fromHex(old)) == 1);
    }

    std::string a = addNode(dir, "narrative", "Twin statement.");
    std::string b = addNode(dir, "narrative", "Twin statement.");
    RunResult merged = cli(dir, "merge " + a + " " + b);
    REQUIRE(merged.code == 0);
    CHECK(firstJson(merged)["survivor"] == std::max(a, b));

    RunResult noKeep = cli(dir, "merge " + q + " " + newId + " --relaxed");
    CHECK(noKeep.code == 1);
    CHECK(noKeep.err.find("--keep") != std::string::npos);

    std::string c = addNode(dir, "narrative", "Cousin statement.");
    RunResult relaxed =
        cli(dir, "merge " + newId + " " + c + " --relaxed --keep " + newId);
    REQUIRE(relaxed.code == 0);
    CHECK(firstJson(relaxed)["kept"] == newId);
}

TEST_CASE("publishing and rewards from the command line") {
    fs::path dir = initTerritory("t-publish");
    std::string root = addNode(dir, "narrative", "Original observation.");
    std::string mid = addNode(dir, "narrative", "Builds on the original.");
    std::string top = addNode(dir, "narrative", "Builds on the middle.");
    addEdge(dir, "supports", mid, root);
    addEdge(dir, "supports", top, mid);

    RunResult pub = cli(dir, "publish " + root);
    CHECK(pub.code == 0);
    CHECK(errorName(cli(dir, "publish " + root)) == "AlreadyPublic");
    {
        TerritoryStore store = TerritoryStore::open(dir);
        CHECK(store.find(LandmarkId::fromHex(root))->status.isPublic());
    }

    RunResult rew = cli(dir, "reward " + root + " --descriptor bounty");
    CHECK(rew.code == 0);
    RunResult trickle = cli(dir, "trickle");
    CHECK(firstJson(trickle)["propagated"] == 2);
    RunResult again = cli(dir, "trickle");
    CHECK(firstJson(again)["propagated"] == 0);
    {
        TerritoryStore store = TerritoryStore::open(dir);
        const Contribution* m = store.find(LandmarkId::fromHex(mid));
        REQUIRE(m != nullptr);
        bool found = false;
        for (const auto& mark : m->marks)
            if (isRewarded(mark)) {
                CHECK(rewardInfo(mark).distance == 1);
                found = true;
            }
        CHECK(found);
    }
}

TEST_CASE("exploring and metrics from the command line") {
    fs::path dir = initTerritory("t-explore");
    std::string q = addNode(dir, "question", "Where do eels spawn?");
    std::string n = addNode(dir, "narrative", "In the Sargasso Sea.");
    std::string ans = addEdge(dir, "answers", n, q);
    std::string lone = addNode(dir, "data", "Unrelated reading list.");

    RunResult area = cli(dir, "explore --from " + q + " --max-edges 1");
    auto ids = idList(area);
    CHECK(ids.size() == 3);
    for (const auto& want : {q, n, ans})
        CHECK(std::find(ids.begin(), ids.end(), want) != ids.end());
    CHECK(std::find(ids.begin(), ids.end(), lone) == ids.end());

    // Forward-only from the question cannot walk the answers edge backwards.
    RunResult fwd = cli(dir, "explore --from " + q + " --max-edges 2 --direction forwardOnly");
    CHECK(idList(fwd) == std::vector<std::string>{q});
    CHECK(errorName(cli(dir, "explore --from " + q + " --direction sideways")) == "Malformed");

    RunResult met = cli(dir, "metrics " + q + " --to " + n);
    json mj = firstJson(met);
    CHECK(mj["distance"] == 1);
    CHECK(mj["depth"] == 1);
    CHECK(mj["maturity"] == "1"); // one incident edge, nothing beyond it
    CHECK(mj["redFlags"] == 0);

    RunResult far = cli(dir, "metrics " + q + " --to " + lone);
    CHECK(firstJson(far)["distance"].is_null());
}

TEST_CASE("topics and subscriptions from the command line") {
    fs::path dir = initTerritory("t-topics");
    std::string anchor = addNode(dir, "question", "How do passive houses stay warm?");
    std::string reply = addNode(dir, "narrative", "Thick insulation keeps heat in.");
    addEdge(dir, "answers", reply, anchor);

    RunResult topic = cli(dir, "topic new --anchor " + anchor + " --radius 1 --name heat");
    REQUIRE(topic.code == 0);
    json tj = firstJson(topic);
    CHECK(tj["name"] == "heat");
    CHECK(tj["extentSize"] == 3);
    CHECK(fs::exists(dir / "topics.json"));

    RunResult sub = cli(dir, "subscribe --topic heat --peer bob --freq 2 "
                             "--until 99999999999999");
    REQUIRE(sub.code == 0);
    CHECK(firstJson(sub)["anchor"] == anchor);
    {
        TerritoryStore store = TerritoryStore::open(dir);
        const Contribution* a = store.find(LandmarkId::fromHex(anchor));
        REQUIRE(a != nullptr);
        const Mark* m = findMark(a->marks, "subscribedTo");
        REQUIRE(m != nullptr);
        CHECK(m->params["server"] == "bob");
        CHECK(m->params["frequency"] == 2);
    }

    CHECK(errorName(cli(dir, "subscribe --topic nope --peer bob --until 99999999999999")) ==
          "NotFound");
    CHECK(errorName(cli(dir, "subscribe --topic heat --peer bob --until 5")) == "Expired");
}

TEST_CASE("time travel and snapshots from the command line") {
    fs::path dir = initTerritory("t-time");
    addNode(dir, "narrative", "first");
    addNode(dir, "narrative", "second");
    addNode(dir, "narrative", "third");

    RunResult past = cli(dir, "timetravel --at 2");
    CHECK(firstJson(past)["landmarks"] == 2);
    RunResult dawn = cli(dir, "timetravel --at 0");
    CHECK(firstJson(dawn)["landmarks"] == 0);
    CHECK(errorName(cli(dir, "timetravel --at 9")) == "SeqOutOfRange");

    RunResult snap = cli(dir, "snapshot");
    REQUIRE(snap.code == 0);
    json sj = firstJson(snap);
    CHECK(sj["atSeq"] == 3);
    CHECK(fs::exists(dir / "snapshot-3.mmm.json"));
    CHECK(fs::exists(dir / "snapshot-3.meta.json"));
    CHECK(sj["digest"].get<std::string>().size() == 64);
}

TEST_CASE("one writer at a time per territory") {
    fs::path dir = initTerritory("t-lock");
    addNode(dir, "narrative", "present");

    std::ofstream(dir / ".lock") << "held\n";
    CHECK(errorName(cli(dir, "query 'type:narrative'")) == "TerritoryLocked");
    fs::remove(dir / ".lock");

    RunResult freed = cli(dir, "query 'type:narrative'");
    CHECK(freed.code == 0);
    CHECK(idList(freed).size() == 1);
    // The lock vanishes with the session: a follow-up command still works.
    CHECK(cli(dir, "query 'type:narrative'").code == 0);
}

TEST_CASE("author overrides reach the recorded authorship") {
    fs::path dir = initTerritory("t-author", "alice");
    RunResult r = runRaw(kBin + " --territory " + dir.string() +
                         " --json --author carol add node --type narrative --label 'mine'");
    REQUIRE(r.code == 0);
    std::string id = firstJson(r)["id"].get<std::string>();
    TerritoryStore store = TerritoryStore::open(dir);
    const Contribution* c = store.find(LandmarkId::fromHex(id));
    REQUIRE(c != nullptr);
    REQUIRE(c->authorships.size() == 1);
    CHECK(c->authorships.begin()->authors == std::set<std::string>{"carol"});
}

TEST_CASE("simulation runs are reproducible from the command line") {
    RunResult list = runRaw(kBin + " sim list");
    CHECK(list.code == 0);
    CHECK(list.out == "disjoint-topics\nflood-public\nlimbo-filter\nno-peers\nreward-chain\n");
    RunResult listJson = runRaw(kBin + " --json sim list");
    CHECK(firstJson(listJson)["scenarios"].size() == 5);

    RunResult r1 = runRaw(kBin + " sim run no-peers --seed 9");
    RunResult r2 = runRaw(kBin + " sim run no-peers --seed 9");
    CHECK(r1.code == 0);
    CHECK(r1.out == r2.out);
    json report = json::parse(r1.out);
    CHECK(report["scenario"] == "no-peers");
    CHECK(report["rounds"] == 10);

    fs::path outFile = scratchRoot() / "flood.json";
    fs::remove(outFile);
    RunResult toFile = runRaw(kBin + " sim run flood-public --seed 3 --out " + outFile.string());
    CHECK(toFile.code == 0);
    RunResult direct = runRaw(kBin + " sim run flood-public --seed 3");
    CHECK(slurp(outFile) == direct.out);

    RunResult unknown = runRaw(kBin + " --json sim run warp-speed");
    CHECK(errorName(unknown) == "UnknownScenario");
}
