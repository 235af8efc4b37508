// High-level landscape editing on top of a territory store: annotation
// patterns, red-flagging, recursive obsolescence, versioning, strict and
// relaxed merging, and mutable-pen membership.
#pragma once

#include <optional>
#include <vector>

#include "mmm/store.hpp"

namespace mmm {

// Content of a to-be-created node; the pattern supplies a default type.
struct NewContent {
    std::string label;
    std::optional<ConcreteType> type;
    std::set<std::string> tags;
};

struct AnnotationRequest {
    LandmarkId targetId;
    std::string pattern; // question, answer, pinpoint, define, nuance, support,
                         // instantiate, characterise, reformulate, reference
    NewContent newContent;
    std::set<std::string> edgeTags;
};

struct VersionReport {
    LandmarkId newId;
    // Incident edges of the old version left for the user to redirect
    // (non-equivalent replacement performs no automatic redirection).
    std::vector<LandmarkId> needsManualRedirect;
};

// Everything reachable from `id` by repeatedly pulling in edges incident on
// already-collected landmarks (edge-on-edge chains cascade; nodes never pull
// in neighbouring nodes). Includes `id` itself.
std::set<LandmarkId> obsoleteClosure(const GraphState& g, const LandmarkId& id);

class Activities {
public:
    Activities(TerritoryStore& store, std::string author, std::string date,
               std::int64_t now = 0)
        : store_(store), author_(std::move(author)), date_(std::move(date)), now_(now) {}

    void setNow(std::int64_t now) { now_ = now; }

    // Creates the pattern's node(s) and edge(s); returns the new ids
    // (node first, connecting edge last).
    std::vector<LandmarkId> annotate(const AnnotationRequest& req);

    // One new equates edge target <-> pit carrying the reason as its label;
    // the target itself is untouched.
    LandmarkId redFlag(const LandmarkId& target, const std::string& reason);

    // Marks id and, recursively, every incident edge as obsolete with a limbo
    // deadline of now + limboDuration. Returns the ids newly marked.
    std::set<LandmarkId> obsolete(const LandmarkId& id);

    // Replacement under a fresh identifier. Equivalent replacements copy and
    // redirect every incident edge of the old version and extend its pens;
    // non-equivalent ones link old and new with a relate edge and report the
    // edges needing manual redirection. The old version is obsoleted.
    VersionReport versionReplace(const LandmarkId& oldId, const NewContent& content,
                                 bool equivalent);

    // Strict duplicate merge: smaller id merged into larger, survivor updated
    // to the join, loser obsoleted, incident edges copied and redirected,
    // pens extended. Returns the survivor id.
    LandmarkId mergeDuplicates(const LandmarkId& a, const LandmarkId& b);

    // Epistemic-equivalence link between distinct contributions: adds one
    // equates edge labeled "merged" and obsoletes the non-keeper. Neither
    // contribution's attributes change.
    void relaxedMerge(const LandmarkId& a, const LandmarkId& b, const LandmarkId& keep);

    LandmarkId mutablePenAdd(const LandmarkId& member, const LandmarkId& pen);
    void mutablePenRemove(const LandmarkId& member, const LandmarkId& pen);

private:
    Authorship authorship() const { return Authorship{{author_}, date_}; }
    LandmarkId freshId() { return store_.newId(now_); }
    void markObsolete(const LandmarkId& id, std::set<LandmarkId>& marked);
    // Copies every edge of `closure` (except `root`), redirecting endpoints
    // through `copyMap`; extends pens that contain redirected originals.
    void copyAndRedirect(const std::set<LandmarkId>& closure, const LandmarkId& root,
                         std::map<LandmarkId, LandmarkId>& copyMap, bool skipSelfLoops);
    void extendPensOf(const LandmarkId& original, const LandmarkId& replacement);

    TerritoryStore& store_;
    std::string author_;
    std::string date_;
    std::int64_t now_ = 0;
};

} // namespace mmm
