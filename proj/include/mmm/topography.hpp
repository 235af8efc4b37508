// Read-only landscape measurements: distance, annotation depth, maturity,
// reliability, epistemic proximity, red-flag counts, aggregation, filtering
// and collapse. All functions work on an immutable graph snapshot.
#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "mmm/store.hpp"

namespace mmm {

// Exact rational arithmetic for the decaying annotation weights.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1);

    Rational operator+(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    bool operator<(const Rational& o) const;

    double toDouble() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;
};

struct FilterRule {
    enum class Action { Reject, Hide, Dim, Highlight };

    int minQuestions = 0;      // x: challenged at least x times
    int minNuances = 0;        // y: nuanced at least y times
    int minDistinctUsers = 0;  // z: by at least z different users
    int minAnnotationDepth = 0;// d: annotation depth underneath
    Action action = Action::Hide;
};

const char* filterActionName(FilterRule::Action a);
FilterRule::Action filterActionFromName(const std::string& name); // throws Malformed
FilterRule filterRuleFromJson(const nlohmann::json& j);           // throws Malformed

// Number of edges crossed on the shortest undirected path (pens reachable
// through pennedIn edges only; landing on an edge-landmark counts as
// crossing it). nullopt when disconnected. Throws NotFound.
std::optional<int> distance(const GraphState& g, const LandmarkId& a, const LandmarkId& b);

// Longest directed path into c over the arcs of unidirectional edges,
// measured on the condensation of strongly-connected components.
int depth(const GraphState& g, const LandmarkId& c);

// Sum over nearby edges of 0.5^level, level 0 = incident on c, up to level 2.
Rational maturity(const GraphState& g, const LandmarkId& c);

// maturity x (1+supports)/(1+supports+nuances) x (1+min(depth,5)), counting
// supports/nuances edges pointing at c.
Rational reliability(const GraphState& g, const LandmarkId& c);

// 5 equates-linked ... 1 merely connected, 0 disconnected.
int proximity(const GraphState& g, const LandmarkId& a, const LandmarkId& b);

// Equates edges joining c with the pit.
int redFlagCount(const GraphState& g, const LandmarkId& c);

struct AggregateGroup {
    ConcreteType edgeType = ConcreteType::Relate;
    std::string tag; // empty = the untagged group
    std::vector<LandmarkId> members; // far endpoints, sorted
};

// Annotations on target grouped by (edge type, tag); multi-tagged edges land
// in several groups; groups ordered by their smallest member id.
std::vector<AggregateGroup> aggregate(const GraphState& g, const LandmarkId& target,
                                      std::optional<ConcreteType> edgeType = std::nullopt,
                                      std::optional<std::string> tag = std::nullopt);

// The rule's action for every area member failing any threshold.
std::map<LandmarkId, FilterRule::Action> applyFilter(const GraphState& g, const FilterRule& rule,
                                                     const Area& area);

// Everything on a directed path into c (c excluded): the ids a zoomed-out
// view hides underneath c.
std::set<LandmarkId> collapseInto(const GraphState& g, const LandmarkId& c);

} // namespace mmm
