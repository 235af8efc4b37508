// Exploration, search, topics, consistency checking, and suggestion helpers.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmm/store.hpp"
#include "mmm/topography.hpp"

namespace mmm {

// --- wayfarer traversal ----------------------------------------------------

enum class DirectionPolicy { Any, ForwardOnly, BackwardOnly };

const char* directionPolicyName(DirectionPolicy p);
DirectionPolicy directionPolicyFromName(const std::string& name);

struct WayfarerConfig {
    int maxEdges = 0;
    std::set<ConcreteType> traversableTypes; // empty = every edge type
    std::set<std::string> excludedTags;      // edges carrying one are opaque
    DirectionPolicy directionPolicy = DirectionPolicy::Any;
};

// Landmarks reachable from start by crossing at most maxEdges traversable
// edges; crossed edges join the area themselves. Deterministic.
Area wayfarerExplore(const GraphState& g, const LandmarkId& start, const WayfarerConfig& cfg);

// Same traversal, keyed by the number of edge crossings needed.
std::map<LandmarkId, int> wayfarerDistances(const GraphState& g, const LandmarkId& start,
                                            const WayfarerConfig& cfg);

// True iff an unconstrained undirected path joins the two landmarks.
bool findable(const GraphState& g, const LandmarkId& from, const LandmarkId& to);

// --- topics ------------------------------------------------------------------

struct TopicExtent {
    int radius = 0;
    WayfarerConfig config;
};

struct Topic {
    LandmarkId anchorId;
    TopicExtent extent;
};

Area topicExtentArea(const GraphState& g, const Topic& topic);

// Topic centred on c with the radius shrunk by c's distance from the anchor.
Topic inheritedTopic(const GraphState& g, const Topic& topic, const LandmarkId& c);

// --- consistency -----------------------------------------------------------------

struct ConsistencyWitness {
    LandmarkId a;
    LandmarkId b;
    std::vector<LandmarkId> pathEq;   // equates edge ids joining a to b
    std::vector<LandmarkId> pathDiff; // equates edge ids with exactly one differsFrom
};

// Pairs of existence nodes in the area joined both by an equates-only path
// and by an equates path containing exactly one differsFrom edge. Edges
// carrying an ignored tag take part in neither path.
std::vector<ConsistencyWitness> checkConsistency(const GraphState& g, const Area& area,
                                                 const std::set<std::string>& ignoredTags = {});

// --- lexical similarity ----------------------------------------------------------

struct SimilarityHit {
    LandmarkId id;
    Rational score; // token-set Jaccard in [0,1]
};

std::set<std::string> labelTokens(const std::string& text);

// Landmarks whose label-token Jaccard against c's label reaches the
// threshold, best first, ties by id. c itself is never a candidate.
std::vector<SimilarityHit> parachutistSimilar(const GraphState& g, const LandmarkId& c,
                                              const Rational& threshold);

// --- search ----------------------------------------------------------------------

enum class SearchMode { Selective, Approximate };

struct ApproxSearchConfig {
    Rational tau{3, 10};
    int radius = 2;
};

// Selective mode: space-separated conjunction of `id:`, `type:`, `tag:`,
// `after:`, `before:`, and `authors>=` clauses. Approximate mode: label
// similarity seeds expanded by a short unconstrained traversal.
Area search(const GraphState& g, const std::string& query, SearchMode mode,
            const ApproxSearchConfig& approx = {});

// --- suggestions -------------------------------------------------------------------

// An uncommitted gluebot proposal: a bridging question plus one pertains
// edge to each target, created only when the proposal is applied.
struct Proposal {
    std::string questionLabel;
    LandmarkId a;
    LandmarkId b;
};

Proposal gluebotSuggest(const GraphState& g, const LandmarkId& a, const LandmarkId& b);

// Commits a proposal: returns {question id, pertains-to-a id, pertains-to-b id}.
std::vector<LandmarkId> applyProposal(TerritoryStore& store, const Proposal& p,
                                      const std::string& author, const std::string& date,
                                      std::int64_t now = 0);

struct PlanterSuggestion {
    LandmarkId id;
    ConcreteType suggestedEdge;
    std::string reason; // "duplicate" | "similar" | "pertains"
    Rational score;
};

// Landing spots for a draft contribution: exact content duplicates, lexical
// neighbours, and existence nodes whose labels the draft subsumes.
std::vector<PlanterSuggestion> planterSuggest(const GraphState& g, const std::string& draftLabel,
                                              ConcreteType draftType,
                                              const Rational& tau = Rational(3, 10));

} // namespace mmm
