// Reference implementations the tests trust, written independently of the
// library: plain scans instead of stored indices, Kosaraju instead of Tarjan,
// exhaustive candidate searches instead of algebraic joins.
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mmm/explorer.hpp"
#include "mmm/landscape.hpp"
#include "mmm/topography.hpp"

namespace oracle {

using mmm::Contribution;
using mmm::Landscape;
using mmm::LandmarkId;

// --- undirected incidence ----------------------------------------------------
// Adjacency rebuilt from a full scan: every edge is adjacent to each declared
// endpoint, present or not. No store index is consulted.

inline std::map<LandmarkId, std::set<LandmarkId>> incidenceAdj(const Landscape& l) {
    std::map<LandmarkId, std::set<LandmarkId>> adj;
    for (const auto& [id, c] : l.all()) {
        if (!c.isEdge())
            continue;
        for (const auto& ep : c.endpoints()) {
            adj[id].insert(ep);
            adj[ep].insert(id);
        }
    }
    return adj;
}

inline std::map<LandmarkId, int> bfsHops(const std::map<LandmarkId, std::set<LandmarkId>>& adj,
                                         const LandmarkId& start) {
    std::map<LandmarkId, int> hops{{start, 0}};
    std::deque<LandmarkId> queue{start};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        auto it = adj.find(x);
        if (it == adj.end())
            continue;
        for (const auto& n : it->second)
            if (!hops.count(n)) {
                hops[n] = hops[x] + 1;
                queue.push_back(n);
            }
    }
    return hops;
}

// Edge-crossing distance: half the incidence hops, rounded up (each crossing
// is two incidence hops except a final landing on the edge itself).
inline std::optional<int> refDistance(const Landscape& l, const LandmarkId& a,
                                      const LandmarkId& b) {
    if (a == b)
        return 0;
    auto hops = bfsHops(incidenceAdj(l), a);
    auto it = hops.find(b);
    if (it == hops.end())
        return std::nullopt;
    return (it->second + 1) / 2;
}

// --- directed arcs and depth ----------------------------------------------------

inline std::map<LandmarkId, std::set<LandmarkId>> arcAdj(const Landscape& l, bool reverse) {
    std::map<LandmarkId, std::set<LandmarkId>> adj;
    for (const auto& [id, c] : l.all()) {
        if (c.kind() != mmm::Kind::UnidirectionalEdge)
            continue;
        const auto& u = std::get<mmm::UnidirEdgePayload>(c.payload);
        if (!l.contains(u.from) || !l.contains(u.to))
            continue;
        if (reverse)
            adj[u.to].insert(u.from);
        else
            adj[u.from].insert(u.to);
    }
    return adj;
}

// Kosaraju strongly-connected components over the present-endpoint arcs.
inline std::map<LandmarkId, int> kosaraju(const Landscape& l) {
    auto fwd = arcAdj(l, false);
    auto rev = arcAdj(l, true);
    std::set<LandmarkId> vertices;
    for (const auto& [v, outs] : fwd) {
        vertices.insert(v);
        vertices.insert(outs.begin(), outs.end());
    }
    for (const auto& [id, c] : l.all())
        vertices.insert(id);

    std::vector<LandmarkId> order;
    std::set<LandmarkId> seen;
    for (const auto& root : vertices) {
        if (seen.count(root))
            continue;
        // Iterative post-order.
        std::vector<std::pair<LandmarkId, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [v, expanded] = stack.back();
            stack.pop_back();
            if (expanded) {
                order.push_back(v);
                continue;
            }
            if (!seen.insert(v).second)
                continue;
            stack.push_back({v, true});
            if (auto it = fwd.find(v); it != fwd.end())
                for (const auto& w : it->second)
                    if (!seen.count(w))
                        stack.push_back({w, false});
        }
    }

    std::map<LandmarkId, int> comp;
    int count = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (comp.count(*it))
            continue;
        std::deque<LandmarkId> queue{*it};
        comp[*it] = count;
        while (!queue.empty()) {
            LandmarkId x = queue.front();
            queue.pop_front();
            if (auto rit = rev.find(x); rit != rev.end())
                for (const auto& w : rit->second)
                    if (!comp.count(w)) {
                        comp[w] = count;
                        queue.push_back(w);
                    }
        }
        count++;
    }
    return comp;
}

// Longest path into c's component on the condensation.
inline int refDepth(const Landscape& l, const LandmarkId& c) {
    auto comp = kosaraju(l);
    auto rev = arcAdj(l, true);
    std::map<int, std::set<int>> pred;
    for (const auto& [to, froms] : rev)
        for (const auto& from : froms)
            if (comp.at(to) != comp.at(from))
                pred[comp.at(to)].insert(comp.at(from));
    std::map<int, int> memo;
    // The condensation is acyclic, so plain recursion terminates.
    std::function<int(int)> longest = [&](int k) -> int {
        if (auto it = memo.find(k); it != memo.end())
            return it->second;
        int best = 0;
        if (auto it = pred.find(k); it != pred.end())
            for (int p : it->second)
                best = std::max(best, 1 + longest(p));
        memo[k] = best;
        return best;
    };
    if (!comp.count(c))
        return 0;
    return longest(comp.at(c));
}

// --- maturity ----------------------------------------------------------------
// Level sets of annotation edges: level 0 edges touch c, level k edges touch
// a level k-1 edge. Each edge is counted once at its first level with weight
// 0.5^level, levels 0..2.

inline mmm::Rational refMaturity(const Landscape& l, const LandmarkId& c) {
    std::map<LandmarkId, std::set<LandmarkId>> touchedBy; // landmark -> incident edges
    for (const auto& [id, e] : l.all())
        if (e.isEdge())
            for (const auto& ep : e.endpoints())
                touchedBy[ep].insert(id);
    std::set<LandmarkId> counted;
    std::set<LandmarkId> frontier{c};
    mmm::Rational total;
    std::int64_t den = 1;
    for (int level = 0; level <= 2; ++level) {
        std::set<LandmarkId> next;
        for (const auto& x : frontier)
            if (auto it = touchedBy.find(x); it != touchedBy.end())
                for (const auto& e : it->second)
                    if (e != c && counted.insert(e).second)
                        next.insert(e);
        total = total + mmm::Rational(static_cast<std::int64_t>(next.size()), den);
        den *= 2;
        frontier = next;
    }
    return total;
}

// --- wayfarer traversal ---------------------------------------------------------
// Re-derived from the crossing rule: a traversable edge incident on x leads,
// for one crossing, to the edge itself and to each existing far endpoint;
// standing on a traversable edge, each existing endpoint is one crossing
// away; direction policies gate full crossings of unidirectional edges only.

inline bool refTraversable(const Contribution& e, const mmm::WayfarerConfig& cfg) {
    if (!e.isEdge())
        return false;
    if (!cfg.traversableTypes.empty() && !cfg.traversableTypes.count(e.ctype))
        return false;
    std::set<std::string> tags = e.tags;
    if (const auto* bi = std::get_if<mmm::BidirEdgePayload>(&e.payload)) {
        tags.insert(bi->tagsFwd.begin(), bi->tagsFwd.end());
        tags.insert(bi->tagsBwd.begin(), bi->tagsBwd.end());
    }
    for (const auto& t : tags)
        if (cfg.excludedTags.count(t))
            return false;
    return true;
}

inline std::map<LandmarkId, int> refWayfarer(const Landscape& l, const LandmarkId& start,
                                             const mmm::WayfarerConfig& cfg) {
    std::map<LandmarkId, std::set<LandmarkId>> touchedBy;
    for (const auto& [id, e] : l.all())
        if (e.isEdge())
            for (const auto& ep : e.endpoints())
                touchedBy[ep].insert(id);

    std::map<LandmarkId, int> dist{{start, 0}};
    std::deque<LandmarkId> queue{start};
    while (!queue.empty()) {
        LandmarkId x = queue.front();
        queue.pop_front();
        if (dist[x] >= cfg.maxEdges)
            continue;
        std::set<LandmarkId> reach;
        if (auto it = touchedBy.find(x); it != touchedBy.end())
            for (const auto& eid : it->second) {
                const Contribution* e = l.find(eid);
                if (!e || !refTraversable(*e, cfg))
                    continue;
                if (const auto* u = std::get_if<mmm::UnidirEdgePayload>(&e->payload)) {
                    if (cfg.directionPolicy == mmm::DirectionPolicy::ForwardOnly && u->from != x)
                        continue;
                    if (cfg.directionPolicy == mmm::DirectionPolicy::BackwardOnly && u->to != x)
                        continue;
                }
                reach.insert(eid);
                for (const auto& ep : e->endpoints())
                    if (ep != x && l.contains(ep))
                        reach.insert(ep);
            }
        if (const Contribution* xc = l.find(x); xc && xc->isEdge() && refTraversable(*xc, cfg))
            for (const auto& ep : xc->endpoints())
                if (l.contains(ep))
                    reach.insert(ep);
        for (const auto& t : reach)
            if (!dist.count(t)) {
                dist[t] = dist[x] + 1;
                queue.push_back(t);
            }
    }
    return dist;
}

// --- brute-force least upper bounds ------------------------------------------------

// The minimum of the pool members dominating both inputs, or nullopt when
// either no dominator or no unique minimum exists.
inline std::optional<Contribution> bruteLub(const Contribution& a, const Contribution& b,
                                            const std::vector<Contribution>& pool,
                                            const mmm::ContractResolver& resolver) {
    std::vector<const Contribution*> ubs;
    for (const auto& k : pool)
        if (mmm::contributionLeq(a, k, resolver) && mmm::contributionLeq(b, k, resolver))
            ubs.push_back(&k);
    for (const Contribution* m : ubs) {
        bool least = true;
        for (const Contribution* u : ubs)
            if (!mmm::contributionLeq(*m, *u, resolver)) {
                least = false;
                break;
            }
        if (least)
            return *m;
    }
    return std::nullopt;
}

// --- naive closure -------------------------------------------------------------
// Fixpoint of "pull in every edge incident on the set", starting from {root}.

inline std::set<LandmarkId> refClosure(const Landscape& l, const LandmarkId& root) {
    std::set<LandmarkId> out{root};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& [id, c] : l.all()) {
            if (out.count(id) || !c.isEdge())
                continue;
            for (const auto& ep : c.endpoints())
                if (out.count(ep)) {
                    out.insert(id);
                    grew = true;
                    break;
                }
        }
    }
    return out;
}

} // namespace oracle
