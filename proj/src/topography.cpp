#include "mmm/topography.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include "mmm/error.hpp"

using nlohmann::json;

namespace mmm {

// --- rationals -----------------------------------------------------------

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    throwIf(den == 0, Errc::Malformed, "zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    if (num == 0) {
        den = 1;
        return;
    }
    auto g = std::gcd(num < 0 ? -num : num, den);
    num /= g;
    den /= g;
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

bool Rational::operator<(const Rational& o) const { return num * o.den < o.num * den; }

std::string Rational::str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

// --- filter rules ------------------------------------------------------------

const char* filterActionName(FilterRule::Action a) {
    switch (a) {
    case FilterRule::Action::Reject: return "reject";
    case FilterRule::Action::Hide: return "hide";
    case FilterRule::Action::Dim: return "dim";
    case FilterRule::Action::Highlight: return "highlight";
    }
    return "hide";
}

FilterRule::Action filterActionFromName(const std::string& name) {
    if (name == "reject") return FilterRule::Action::Reject;
    if (name == "hide") return FilterRule::Action::Hide;
    if (name == "dim") return FilterRule::Action::Dim;
    if (name == "highlight") return FilterRule::Action::Highlight;
    throw Error(Errc::Malformed, "unknown filter action '" + name + "'");
}

FilterRule filterRuleFromJson(const json& j) {
    throwIf(!j.is_object(), Errc::Malformed, "filter rule must be an object");
    FilterRule r;
    auto intField = [&](const char* key, int fallback) {
        auto it = j.find(key);
        if (it == j.end())
            return fallback;
        throwIf(!it->is_number_integer() || it->get<int>() < 0, Errc::Malformed,
                std::string("filter threshold '") + key + "' must be a non-negative integer");
        return it->get<int>();
    };
    r.minQuestions = intField("minQuestions", 0);
    r.minNuances = intField("minNuances", 0);
    r.minDistinctUsers = intField("minDistinctUsers", 0);
    r.minAnnotationDepth = intField("minAnnotationDepth", 0);
    if (auto it = j.find("action"); it != j.end()) {
        throwIf(!it->is_string(), Errc::Malformed, "filter action must be a string");
        r.action = filterActionFromName(it->get<std::string>());
    }
    return r;
}

// --- shared helpers --------------------------------------------------------

namespace {

void requireExists(const GraphState& g, const LandmarkId& id) {
    throwIf(!g.landscape.contains(id), Errc::NotFound, "no landmark " + id.hex());
}

// Undirected incidence neighbours: the edges at x, plus x's endpoints when x
// is itself an edge. Pen payload contents create no adjacency.
std::vector<LandmarkId> incidenceNeighbors(const GraphState& g, const LandmarkId& x) {
    std::vector<LandmarkId> out(g.edgesAt(x).begin(), g.edgesAt(x).end());
    if (const Contribution* c = g.landscape.find(x))
        if (c->isEdge())
            for (const auto& ep : c->endpoints())
                out.push_back(ep);
    return out;
}

// Directed arcs contributed by unidirectional edges with both ends present.
struct ArcGraph {
    std::map<LandmarkId, std::set<LandmarkId>> fwd, rev;
};

ArcGraph buildArcs(const GraphState& g) {
    ArcGraph a;
    for (const auto& [id, c] : g.landscape.all()) {
        if (c.kind() != Kind::UnidirectionalEdge)
            continue;
        const auto& u = std::get<UnidirEdgePayload>(c.payload);
        if (!g.landscape.contains(u.from) || !g.landscape.contains(u.to))
            continue;
        a.fwd[u.from].insert(u.to);
        a.rev[u.to].insert(u.from);
    }
    return a;
}

// Tarjan strongly-connected components over the arc graph.
struct SccResult {
    std::map<LandmarkId, int> comp;
    int count = 0;
};

SccResult tarjan(const ArcGraph& arcs, const std::set<LandmarkId>& vertices) {
    SccResult res;
    std::map<LandmarkId, int> index, low;
    std::vector<LandmarkId> stack;
    std::set<LandmarkId> onStack;
    int nextIndex = 0;

    struct Frame {
        LandmarkId v;
        std::vector<LandmarkId> succ;
        std::size_t next = 0;
    };

    for (const auto& root : vertices) {
        if (index.count(root))
            continue;
        std::vector<Frame> frames;
        auto push = [&](const LandmarkId& v) {
            index[v] = low[v] = nextIndex++;
            stack.push_back(v);
            onStack.insert(v);
            Frame f;
            f.v = v;
            if (auto it = arcs.fwd.find(v); it != arcs.fwd.end())
                f.succ.assign(it->second.begin(), it->second.end());
            frames.push_back(std::move(f));
        };
        push(root);
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < f.succ.size()) {
                LandmarkId w = f.succ[f.next++];
                if (!vertices.count(w))
                    continue;
                if (!index.count(w)) {
                    push(w);
                } else if (onStack.count(w)) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
            } else {
                if (low[f.v] == index[f.v]) {
                    for (;;) {
                        LandmarkId w = stack.back();
                        stack.pop_back();
                        onStack.erase(w);
                        res.comp[w] = res.count;
                        if (w == f.v)
                            break;
                    }
                    res.count++;
                }
                LandmarkId finished = f.v;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().v] = std::min(low[frames.back().v], low[finished]);
            }
        }
    }
    return res;
}

} // namespace

// --- distance -----------------------------------------------------------------

std::optional<int> distance(const GraphState& g, const LandmarkId& a, const LandmarkId& b) {
    requireExists(g, a);
    requireExists(g, b);
    if (a == b)
        return 0;
    std::map<LandmarkId, int> hops{{a, 0}};
    std::deque<LandmarkId> queue{a};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        for (const auto& n : incidenceNeighbors(g, x)) {
            if (hops.count(n))
                continue;
            hops[n] = hops[x] + 1;
            if (n == b)
                return (hops[n] + 1) / 2;
            queue.push_back(n);
        }
    }
    return std::nullopt;
}

// --- depth ------------------------------------------------------------------

int depth(const GraphState& g, const LandmarkId& c) {
    requireExists(g, c);
    ArcGraph arcs = buildArcs(g);
    std::set<LandmarkId> vertices{c};
    for (const auto& [v, outs] : arcs.fwd) {
        vertices.insert(v);
        vertices.insert(outs.begin(), outs.end());
    }
    SccResult scc = tarjan(arcs, vertices);

    // Condensation predecessors.
    std::map<int, std::set<int>> pred;
    for (const auto& [to, froms] : arcs.rev)
        for (const auto& from : froms) {
            int ct = scc.comp.at(to), cf = scc.comp.at(from);
            if (ct != cf)
                pred[ct].insert(cf);
        }

    std::map<int, int> memo;
    std::function<int(int)> longest = [&](int comp) -> int {
        if (auto it = memo.find(comp); it != memo.end())
            return it->second;
        int best = 0;
        if (auto it = pred.find(comp); it != pred.end())
            for (int p : it->second)
                best = std::max(best, 1 + longest(p));
        memo[comp] = best;
        return best;
    };
    return longest(scc.comp.at(c));
}

// --- maturity / reliability ----------------------------------------------------

Rational maturity(const GraphState& g, const LandmarkId& c) {
    requireExists(g, c);
    std::set<LandmarkId> seen;
    std::set<LandmarkId> frontier{c};
    Rational total;
    std::int64_t weightDen = 1;
    for (int level = 0; level <= 2; ++level) {
        std::set<LandmarkId> next;
        for (const auto& x : frontier)
            for (const auto& e : g.edgesAt(x))
                if (e != c && seen.insert(e).second)
                    next.insert(e);
        total = total + Rational(static_cast<std::int64_t>(next.size()), weightDen);
        weightDen *= 2;
        frontier = std::move(next);
    }
    return total;
}

Rational reliability(const GraphState& g, const LandmarkId& c) {
    requireExists(g, c);
    std::int64_t supports = 0, nuances = 0;
    for (const auto& eid : g.edgesAt(c)) {
        const Contribution* e = g.landscape.find(eid);
        if (!e)
            continue;
        if (const auto* u = std::get_if<UnidirEdgePayload>(&e->payload); u && u->to == c) {
            if (e->ctype == ConcreteType::Supports)
                supports++;
            else if (e->ctype == ConcreteType::Nuances)
                nuances++;
        }
    }
    std::int64_t d = std::min<std::int64_t>(depth(g, c), 5);
    return maturity(g, c) * Rational(1 + supports, 1 + supports + nuances) * Rational(1 + d);
}

// --- proximity ----------------------------------------------------------------

namespace {

// Landmarks reachable from a through equates edges only; the pit never
// relays (a red flag asserts absurdity, not equivalence).
bool equatesConnected(const GraphState& g, const LandmarkId& a, const LandmarkId& b) {
    std::set<LandmarkId> seen{a};
    std::deque<LandmarkId> queue{a};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        for (const auto& eid : g.edgesAt(x)) {
            const Contribution* e = g.landscape.find(eid);
            if (!e || e->ctype != ConcreteType::Equates)
                continue;
            for (const auto& ep : e->endpoints()) {
                if (ep == b)
                    return true;
                if (!ep.isPit() && seen.insert(ep).second)
                    queue.push_back(ep);
            }
        }
    }
    return false;
}

// The questions answered by c, keyed by question id, with the union of the
// answer edges' tag sets.
std::map<LandmarkId, std::set<std::string>> answeredQuestions(const GraphState& g,
                                                              const LandmarkId& c) {
    std::map<LandmarkId, std::set<std::string>> out;
    for (const auto& eid : g.edgesAt(c)) {
        const Contribution* e = g.landscape.find(eid);
        if (!e || e->ctype != ConcreteType::Answers)
            continue;
        const auto& u = std::get<UnidirEdgePayload>(e->payload);
        if (u.from == c)
            out[u.to].insert(e->tags.begin(), e->tags.end());
    }
    return out;
}

std::set<LandmarkId> pertainsExistenceLinks(const GraphState& g, const LandmarkId& c) {
    std::set<LandmarkId> out;
    for (const auto& eid : g.edgesAt(c)) {
        const Contribution* e = g.landscape.find(eid);
        if (!e || e->ctype != ConcreteType::Pertains)
            continue;
        for (const auto& ep : e->endpoints()) {
            const Contribution* other = g.landscape.find(ep);
            if (ep != c && other && other->ctype == ConcreteType::Existence)
                out.insert(ep);
        }
    }
    return out;
}

bool connectedUndirected(const GraphState& g, const LandmarkId& a, const LandmarkId& b) {
    std::set<LandmarkId> seen{a};
    std::deque<LandmarkId> queue{a};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        for (const auto& n : incidenceNeighbors(g, x)) {
            if (n == b)
                return true;
            if (seen.insert(n).second)
                queue.push_back(n);
        }
    }
    return false;
}

} // namespace

int proximity(const GraphState& g, const LandmarkId& a, const LandmarkId& b) {
    requireExists(g, a);
    requireExists(g, b);
    if (a == b)
        return 5;
    if (equatesConnected(g, a, b))
        return 5;
    auto qa = answeredQuestions(g, a);
    auto qb = answeredQuestions(g, b);
    bool sameQuestion = false;
    for (const auto& [q, tagsA] : qa) {
        auto it = qb.find(q);
        if (it == qb.end())
            continue;
        sameQuestion = true;
        for (const auto& t : {std::string("@yes"), std::string("@no")})
            if (tagsA.count(t) && it->second.count(t))
                return 4;
    }
    if (sameQuestion)
        return 3;
    auto pa = pertainsExistenceLinks(g, a);
    auto pb = pertainsExistenceLinks(g, b);
    std::vector<LandmarkId> common;
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(common));
    if (!common.empty())
        return 2;
    if (connectedUndirected(g, a, b))
        return 1;
    return 0;
}

int redFlagCount(const GraphState& g, const LandmarkId& c) {
    requireExists(g, c);
    int count = 0;
    for (const auto& eid : g.edgesAt(c)) {
        const Contribution* e = g.landscape.find(eid);
        if (!e || e->ctype != ConcreteType::Equates)
            continue;
        auto eps = e->endpoints();
        bool hasC = std::find(eps.begin(), eps.end(), c) != eps.end();
        bool hasPit =
            std::any_of(eps.begin(), eps.end(), [](const LandmarkId& x) { return x.isPit(); });
        if (hasC && hasPit)
            count++;
    }
    return count;
}

// --- aggregation -----------------------------------------------------------------

std::vector<AggregateGroup> aggregate(const GraphState& g, const LandmarkId& target,
                                      std::optional<ConcreteType> edgeType,
                                      std::optional<std::string> tag) {
    requireExists(g, target);
    std::map<std::pair<ConcreteType, std::string>, std::set<LandmarkId>> buckets;
    for (const auto& eid : g.edgesAt(target)) {
        const Contribution* e = g.landscape.find(eid);
        if (!e)
            continue;
        if (edgeType && e->ctype != *edgeType)
            continue;
        std::set<std::string> tags = e->tags;
        if (const auto* bi = std::get_if<BidirEdgePayload>(&e->payload)) {
            tags.insert(bi->tagsFwd.begin(), bi->tagsFwd.end());
            tags.insert(bi->tagsBwd.begin(), bi->tagsBwd.end());
        }
        if (tags.empty())
            tags.insert("");
        std::set<LandmarkId> far;
        for (const auto& ep : e->endpoints())
            if (ep != target)
                far.insert(ep);
        if (far.empty())
            far.insert(target); // self-loop annotation
        for (const auto& t : tags) {
            if (tag && t != *tag)
                continue;
            buckets[{e->ctype, t}].insert(far.begin(), far.end());
        }
    }
    std::vector<AggregateGroup> groups;
    for (const auto& [key, members] : buckets) {
        AggregateGroup grp;
        grp.edgeType = key.first;
        grp.tag = key.second;
        grp.members.assign(members.begin(), members.end());
        groups.push_back(std::move(grp));
    }
    std::sort(groups.begin(), groups.end(), [](const AggregateGroup& x, const AggregateGroup& y) {
        if (x.members.front() != y.members.front())
            return x.members.front() < y.members.front();
        if (x.edgeType != y.edgeType)
            return std::string(typeName(x.edgeType)) < std::string(typeName(y.edgeType));
        return x.tag < y.tag;
    });
    return groups;
}

// --- filtering / collapse -----------------------------------------------------------

std::map<LandmarkId, FilterRule::Action> applyFilter(const GraphState& g, const FilterRule& rule,
                                                     const Area& area) {
    std::map<LandmarkId, FilterRule::Action> out;
    for (const auto& id : area) {
        if (!g.landscape.contains(id))
            continue;
        int questions = 0, nuances = 0;
        std::set<std::string> users;
        for (const auto& eid : g.edgesAt(id)) {
            const Contribution* e = g.landscape.find(eid);
            if (!e)
                continue;
            const auto* u = std::get_if<UnidirEdgePayload>(&e->payload);
            if (!u || u->to != id)
                continue;
            if (e->ctype == ConcreteType::Questions || e->ctype == ConcreteType::Nuances) {
                (e->ctype == ConcreteType::Questions ? questions : nuances)++;
                for (const auto& a : e->authorships)
                    users.insert(a.authors.begin(), a.authors.end());
            }
        }
        bool fails = questions < rule.minQuestions || nuances < rule.minNuances ||
                     static_cast<int>(users.size()) < rule.minDistinctUsers ||
                     depth(g, id) < rule.minAnnotationDepth;
        if (fails)
            out[id] = rule.action;
    }
    return out;
}

std::set<LandmarkId> collapseInto(const GraphState& g, const LandmarkId& c) {
    requireExists(g, c);
    ArcGraph arcs = buildArcs(g);
    std::set<LandmarkId> hidden;
    std::deque<LandmarkId> queue{c};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        auto it = arcs.rev.find(x);
        if (it == arcs.rev.end())
            continue;
        for (const auto& p : it->second)
            if (p != c && hidden.insert(p).second)
                queue.push_back(p);
    }
    return hidden;
}

} // namespace mmm
