#include "mmm/explorer.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include "mmm/error.hpp"

namespace mmm {

const char* directionPolicyName(DirectionPolicy p) {
    switch (p) {
    case DirectionPolicy::Any: return "any";
    case DirectionPolicy::ForwardOnly: return "forwardOnly";
    case DirectionPolicy::BackwardOnly: return "backwardOnly";
    }
    return "any";
}

DirectionPolicy directionPolicyFromName(const std::string& name) {
    if (name == "any") return DirectionPolicy::Any;
    if (name == "forwardOnly") return DirectionPolicy::ForwardOnly;
    if (name == "backwardOnly") return DirectionPolicy::BackwardOnly;
    throw Error(Errc::Malformed, "unknown direction policy '" + name + "'");
}

namespace {

void requireExists(const GraphState& g, const LandmarkId& id) {
    throwIf(!g.landscape.contains(id), Errc::NotFound, "no landmark " + id.hex());
}

std::set<std::string> allEdgeTags(const Contribution& e) {
    std::set<std::string> tags = e.tags;
    if (const auto* bi = std::get_if<BidirEdgePayload>(&e.payload)) {
        tags.insert(bi->tagsFwd.begin(), bi->tagsFwd.end());
        tags.insert(bi->tagsBwd.begin(), bi->tagsBwd.end());
    }
    return tags;
}

bool traversable(const Contribution& e, const WayfarerConfig& cfg) {
    if (!e.isEdge())
        return false;
    if (!cfg.traversableTypes.empty() && !cfg.traversableTypes.count(e.ctype))
        return false;
    if (!cfg.excludedTags.empty())
        for (const auto& t : allEdgeTags(e))
            if (cfg.excludedTags.count(t))
                return false;
    return true;
}

} // namespace

std::map<LandmarkId, int> wayfarerDistances(const GraphState& g, const LandmarkId& start,
                                            const WayfarerConfig& cfg) {
    requireExists(g, start);
    std::map<LandmarkId, int> dist{{start, 0}};
    std::deque<LandmarkId> queue{start};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        if (dist[x] >= cfg.maxEdges)
            continue;
        std::set<LandmarkId> targets;
        for (const auto& eid : g.edgesAt(x)) {
            const Contribution* e = g.landscape.find(eid);
            if (!e || !traversable(*e, cfg))
                continue;
            if (const auto* u = std::get_if<UnidirEdgePayload>(&e->payload)) {
                if (cfg.directionPolicy == DirectionPolicy::ForwardOnly && u->from != x)
                    continue;
                if (cfg.directionPolicy == DirectionPolicy::BackwardOnly && u->to != x)
                    continue;
            }
            targets.insert(eid); // a crossed edge joins the area itself
            for (const auto& ep : e->endpoints())
                if (ep != x && g.landscape.contains(ep))
                    targets.insert(ep);
        }
        // Standing on an edge-landmark (reached through one of its own
        // annotations), either endpoint is one crossing away.
        if (const Contribution* xc = g.landscape.find(x); xc && xc->isEdge() &&
                                                          traversable(*xc, cfg))
            for (const auto& ep : xc->endpoints())
                if (g.landscape.contains(ep))
                    targets.insert(ep);
        for (const auto& t : targets)
            if (!dist.count(t)) {
                dist[t] = dist[x] + 1;
                queue.push_back(t);
            }
    }
    return dist;
}

Area wayfarerExplore(const GraphState& g, const LandmarkId& start, const WayfarerConfig& cfg) {
    Area area;
    for (const auto& [id, hops] : wayfarerDistances(g, start, cfg))
        area.insert(id);
    return area;
}

bool findable(const GraphState& g, const LandmarkId& from, const LandmarkId& to) {
    requireExists(g, from);
    requireExists(g, to);
    if (from == to)
        return true;
    std::set<LandmarkId> seen{from};
    std::deque<LandmarkId> queue{from};
    auto neighbors = [&](const LandmarkId& x) {
        std::vector<LandmarkId> out(g.edgesAt(x).begin(), g.edgesAt(x).end());
        if (const Contribution* c = g.landscape.find(x))
            if (c->isEdge())
                for (const auto& ep : c->endpoints())
                    out.push_back(ep);
        return out;
    };
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        for (const auto& n : neighbors(x)) {
            if (n == to)
                return true;
            if (seen.insert(n).second)
                queue.push_back(n);
        }
    }
    return false;
}

// --- topics ------------------------------------------------------------------

Area topicExtentArea(const GraphState& g, const Topic& topic) {
    WayfarerConfig cfg = topic.extent.config;
    cfg.maxEdges = topic.extent.radius;
    return wayfarerExplore(g, topic.anchorId, cfg);
}

Topic inheritedTopic(const GraphState& g, const Topic& topic, const LandmarkId& c) {
    requireExists(g, c);
    WayfarerConfig cfg = topic.extent.config;
    cfg.maxEdges = topic.extent.radius;
    auto dist = wayfarerDistances(g, topic.anchorId, cfg);
    auto it = dist.find(c);
    throwIf(it == dist.end(), Errc::NotInExtent,
            c.hex() + " is outside the topic extent");
    return Topic{c, TopicExtent{topic.extent.radius - it->second, topic.extent.config}};
}

// --- consistency -----------------------------------------------------------------

namespace {

// BFS over equates/differsFrom edges where at most `diffBudget` differsFrom
// edges may be used and the target requires exactly diffBudget of them.
// Returns the crossed-edge id sequence, or nullopt. The pit never relays.
std::optional<std::vector<LandmarkId>> equatesPath(const GraphState& g, const LandmarkId& from,
                                                   const LandmarkId& to, int diffBudget,
                                                   const std::set<std::string>& ignoredTags) {
    using State = std::pair<LandmarkId, int>;
    std::map<State, std::pair<State, LandmarkId>> parent; // state -> (prev, via edge)
    std::set<State> seen{{from, 0}};
    std::deque<State> queue{{from, 0}};
    while (!queue.empty()) {
        auto [x, used] = queue.front();
        queue.pop_front();
        for (const auto& eid : g.edgesAt(x)) {
            const Contribution* e = g.landscape.find(eid);
            if (!e)
                continue;
            bool diff = e->ctype == ConcreteType::DiffersFrom;
            if (e->ctype != ConcreteType::Equates && !diff)
                continue;
            if (!ignoredTags.empty()) {
                auto tags = allEdgeTags(*e);
                if (std::any_of(tags.begin(), tags.end(),
                                [&](const std::string& t) { return ignoredTags.count(t) > 0; }))
                    continue;
            }
            int nextUsed = used + (diff ? 1 : 0);
            if (nextUsed > diffBudget)
                continue;
            for (const auto& ep : e->endpoints()) {
                if (ep == x)
                    continue;
                State ns{ep, nextUsed};
                if (!seen.insert(ns).second)
                    continue;
                parent[ns] = {{x, used}, eid};
                if (ep == to && nextUsed == diffBudget) {
                    std::vector<LandmarkId> path;
                    State cur = ns;
                    while (!(cur.first == from && cur.second == 0)) {
                        auto& [prev, via] = parent.at(cur);
                        path.push_back(via);
                        cur = prev;
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (!ep.isPit())
                    queue.push_back(ns);
            }
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<ConsistencyWitness> checkConsistency(const GraphState& g, const Area& area,
                                                 const std::set<std::string>& ignoredTags) {
    std::vector<LandmarkId> nodes;
    for (const auto& id : area) {
        const Contribution* c = g.landscape.find(id);
        if (c && c->ctype == ConcreteType::Existence)
            nodes.push_back(id);
    }
    std::vector<ConsistencyWitness> witnesses;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            auto eq = equatesPath(g, nodes[i], nodes[j], 0, ignoredTags);
            if (!eq)
                continue;
            auto diff = equatesPath(g, nodes[i], nodes[j], 1, ignoredTags);
            if (!diff)
                continue;
            witnesses.push_back({nodes[i], nodes[j], std::move(*eq), std::move(*diff)});
        }
    return witnesses;
}

// --- lexical similarity ----------------------------------------------------------

std::set<std::string> labelTokens(const std::string& text) {
    std::set<std::string> tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch)) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            tokens.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty())
        tokens.insert(cur);
    return tokens;
}

namespace {

Rational jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() || b.empty())
        return Rational(0);
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    auto unionSize = a.size() + b.size() - common.size();
    return Rational(static_cast<std::int64_t>(common.size()),
                    static_cast<std::int64_t>(unionSize));
}

std::vector<SimilarityHit> similarToTokens(const GraphState& g,
                                           const std::set<std::string>& tokens,
                                           const Rational& threshold,
                                           const LandmarkId* exclude) {
    std::vector<SimilarityHit> hits;
    for (const auto& [id, c] : g.landscape.all()) {
        if (exclude && id == *exclude)
            continue;
        Rational score = jaccard(tokens, labelTokens(c.label));
        if (!(score < threshold))
            hits.push_back({id, score});
    }
    std::sort(hits.begin(), hits.end(), [](const SimilarityHit& x, const SimilarityHit& y) {
        if (x.score == y.score)
            return x.id < y.id;
        return y.score < x.score;
    });
    return hits;
}

} // namespace

std::vector<SimilarityHit> parachutistSimilar(const GraphState& g, const LandmarkId& c,
                                              const Rational& threshold) {
    requireExists(g, c);
    const Contribution* self = g.landscape.find(c);
    std::set<std::string> tokens = self ? labelTokens(self->label) : std::set<std::string>{};
    return similarToTokens(g, tokens, threshold, &c);
}

// --- search ----------------------------------------------------------------------

namespace {

std::int64_t parseQueryInt(const std::string& text, const std::string& clause) {
    try {
        std::size_t used = 0;
        std::int64_t value = std::stoll(text, &used);
        throwIf(used != text.size() || text.empty(), Errc::MalformedQuery,
                "bad number in clause '" + clause + "'");
        return value;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(Errc::MalformedQuery, "bad number in clause '" + clause + "'");
    }
}

struct SelectiveQuery {
    std::optional<std::string> idPrefix;
    std::optional<ConcreteType> type;
    std::optional<std::string> tag;
    std::optional<std::int64_t> after;  // timestamp strictly greater
    std::optional<std::int64_t> before; // timestamp strictly smaller
    std::optional<int> minAuthors;      // distinct author names
};

SelectiveQuery parseSelective(const std::string& query) {
    SelectiveQuery q;
    std::size_t pos = 0;
    while (pos < query.size()) {
        while (pos < query.size() && std::isspace(static_cast<unsigned char>(query[pos])))
            pos++;
        std::size_t end = pos;
        while (end < query.size() && !std::isspace(static_cast<unsigned char>(query[end])))
            end++;
        if (end == pos)
            break;
        std::string clause = query.substr(pos, end - pos);
        pos = end;
        if (clause.rfind("id:", 0) == 0) {
            std::string v = clause.substr(3);
            throwIf(v.empty() || v.size() > 32 ||
                        v.find_first_not_of("0123456789abcdef") != std::string::npos,
                    Errc::MalformedQuery, "bad id clause '" + clause + "'");
            q.idPrefix = v;
        } else if (clause.rfind("type:", 0) == 0) {
            try {
                q.type = typeFromName(clause.substr(5));
            } catch (const Error&) {
                throw Error(Errc::MalformedQuery, "unknown type in clause '" + clause + "'");
            }
        } else if (clause.rfind("tag:", 0) == 0) {
            std::string v = clause.substr(4);
            throwIf(v.empty(), Errc::MalformedQuery, "empty tag clause");
            if (v[0] != '@')
                v = "@" + v;
            q.tag = v;
        } else if (clause.rfind("after:", 0) == 0) {
            q.after = parseQueryInt(clause.substr(6), clause);
        } else if (clause.rfind("before:", 0) == 0) {
            q.before = parseQueryInt(clause.substr(7), clause);
        } else if (clause.rfind("authors>=", 0) == 0) {
            q.minAuthors = static_cast<int>(parseQueryInt(clause.substr(9), clause));
        } else {
            throw Error(Errc::MalformedQuery, "unknown clause '" + clause + "'");
        }
    }
    return q;
}

int distinctAuthors(const Contribution& c) {
    std::set<std::string> names;
    for (const auto& a : c.authorships)
        names.insert(a.authors.begin(), a.authors.end());
    return static_cast<int>(names.size());
}

} // namespace

Area search(const GraphState& g, const std::string& query, SearchMode mode,
            const ApproxSearchConfig& approx) {
    Area out;
    if (mode == SearchMode::Selective) {
        SelectiveQuery q = parseSelective(query);
        for (const auto& [id, c] : g.landscape.all()) {
            if (q.idPrefix && id.hex().rfind(*q.idPrefix, 0) != 0)
                continue;
            if (q.type && c.ctype != *q.type)
                continue;
            if (q.tag && !c.tags.count(*q.tag) && !allEdgeTags(c).count(*q.tag))
                continue;
            if (q.after && !(c.timestamp > *q.after))
                continue;
            if (q.before && !(c.timestamp < *q.before))
                continue;
            if (q.minAuthors && distinctAuthors(c) < *q.minAuthors)
                continue;
            out.insert(id);
        }
        return out;
    }
    auto seeds = similarToTokens(g, labelTokens(query), approx.tau, nullptr);
    WayfarerConfig cfg;
    cfg.maxEdges = approx.radius;
    for (const auto& hit : seeds)
        for (const auto& [id, hops] : wayfarerDistances(g, hit.id, cfg))
            out.insert(id);
    return out;
}

// --- suggestions -------------------------------------------------------------------

namespace {

std::string displayLabel(const GraphState& g, const LandmarkId& id) {
    const Contribution* c = g.landscape.find(id);
    if (c && !c->label.empty())
        return c->label;
    return id.hex().substr(0, 8);
}

} // namespace

Proposal gluebotSuggest(const GraphState& g, const LandmarkId& a, const LandmarkId& b) {
    requireExists(g, a);
    requireExists(g, b);
    return Proposal{"How does " + displayLabel(g, a) + " relate to " + displayLabel(g, b) + "?",
                    a, b};
}

std::vector<LandmarkId> applyProposal(TerritoryStore& store, const Proposal& p,
                                      const std::string& author, const std::string& date,
                                      std::int64_t now) {
    throwIf(!store.find(p.a), Errc::TargetNotFound, "no landmark " + p.a.hex());
    throwIf(!store.find(p.b), Errc::TargetNotFound, "no landmark " + p.b.hex());
    Authorship by{{author}, date};
    LandmarkId qid = store.newId(now);
    Contribution question =
        makeVertex(qid, p.questionLabel, ConcreteType::Question, {}, {by}, now);
    Contribution toA = makeEdge(store.newId(now), ConcreteType::Pertains, qid, p.a, "", {}, {by},
                                now);
    Contribution toB = makeEdge(store.newId(now), ConcreteType::Pertains, qid, p.b, "", {}, {by},
                                now);
    store.append(question);
    store.append(toA);
    store.append(toB);
    return {question.id, toA.id, toB.id};
}

std::vector<PlanterSuggestion> planterSuggest(const GraphState& g, const std::string& draftLabel,
                                              ConcreteType draftType, const Rational& tau) {
    std::vector<PlanterSuggestion> out;
    std::set<LandmarkId> taken;

    ContentKey key = makeContentKey(draftLabel, typeName(draftType));
    if (auto it = g.byContentKey.find(key); it != g.byContentKey.end())
        for (const auto& id : it->second)
            if (taken.insert(id).second)
                out.push_back({id, ConcreteType::Equates, "duplicate", Rational(1)});

    std::set<std::string> draft = labelTokens(draftLabel);
    std::vector<PlanterSuggestion> rest;
    for (const auto& hit : similarToTokens(g, draft, tau, nullptr))
        if (!taken.count(hit.id)) {
            taken.insert(hit.id);
            rest.push_back({hit.id, ConcreteType::RelatesTo, "similar", hit.score});
        }
    for (const auto& [id, c] : g.landscape.all()) {
        if (taken.count(id) || c.ctype != ConcreteType::Existence)
            continue;
        std::set<std::string> tokens = labelTokens(c.label);
        if (tokens.empty() ||
            !std::includes(draft.begin(), draft.end(), tokens.begin(), tokens.end()))
            continue;
        taken.insert(id);
        rest.push_back({id, ConcreteType::Pertains, "pertains",
                        jaccard(draft, tokens)});
    }
    std::sort(rest.begin(), rest.end(), [](const PlanterSuggestion& x, const PlanterSuggestion& y) {
        if (x.score == y.score)
            return x.id < y.id;
        return y.score < x.score;
    });
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

} // namespace mmm
