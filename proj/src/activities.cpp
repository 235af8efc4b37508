#include "mmm/activities.hpp"

#include <algorithm>

#include "mmm/error.hpp"

namespace mmm {

std::set<LandmarkId> obsoleteClosure(const GraphState& g, const LandmarkId& id) {
    std::set<LandmarkId> closure{id};
    std::vector<LandmarkId> queue{id};
    while (!queue.empty()) {
        LandmarkId x = queue.back();
        queue.pop_back();
        for (const auto& e : g.edgesAt(x))
            if (closure.insert(e).second)
                queue.push_back(e);
    }
    return closure;
}

namespace {

struct PatternShape {
    ConcreteType nodeType;
    ConcreteType edgeType;
    bool definePen = false;
    bool tagReference = false;
};

std::optional<PatternShape> shapeOf(const std::string& pattern) {
    if (pattern == "question")
        return PatternShape{ConcreteType::Question, ConcreteType::Questions};
    if (pattern == "answer")
        return PatternShape{ConcreteType::Narrative, ConcreteType::Answers};
    if (pattern == "pinpoint")
        return PatternShape{ConcreteType::Existence, ConcreteType::Pertains};
    if (pattern == "define")
        return PatternShape{ConcreteType::Existence, ConcreteType::Pertains, true};
    if (pattern == "nuance")
        return PatternShape{ConcreteType::Narrative, ConcreteType::Nuances};
    if (pattern == "support")
        return PatternShape{ConcreteType::Narrative, ConcreteType::Supports};
    if (pattern == "instantiate")
        return PatternShape{ConcreteType::Existence, ConcreteType::Instantiates};
    if (pattern == "characterise")
        return PatternShape{ConcreteType::Existence, ConcreteType::Pertains};
    if (pattern == "reformulate")
        return PatternShape{ConcreteType::Narrative, ConcreteType::Equates};
    if (pattern == "reference")
        return PatternShape{ConcreteType::Narrative, ConcreteType::Supports, false, true};
    return std::nullopt;
}

} // namespace

std::vector<LandmarkId> Activities::annotate(const AnnotationRequest& req) {
    auto shape = shapeOf(req.pattern);
    throwIf(!shape, Errc::PatternArityError, "unknown annotation pattern '" + req.pattern + "'");
    throwIf(req.newContent.label.empty(), Errc::PatternArityError,
            "pattern '" + req.pattern + "' needs a non-empty label");
    const Contribution* target = store_.find(req.targetId);
    throwIf(target == nullptr, Errc::TargetNotFound, "no target " + req.targetId.hex());
    if (target->isEdge())
        throwIf(store_.edgeDepth(req.targetId) + 1 > kEdgeDepthCap, Errc::DepthCapExceeded,
                "annotating this edge would exceed the nesting cap");

    ConcreteType nodeType = shape->nodeType;
    if (req.pattern == "reformulate" && target->isVertex())
        nodeType = target->ctype;
    if (req.newContent.type)
        nodeType = *req.newContent.type;

    std::vector<LandmarkId> created;
    Contribution node = makeVertex(freshId(), req.newContent.label, nodeType,
                                   req.newContent.tags, authorship(), now_);

    std::set<std::string> edgeTags = req.edgeTags;
    if (shape->tagReference)
        edgeTags.insert("@reference");

    std::optional<Contribution> pen;
    LandmarkId edgeFrom = node.id;
    if (shape->definePen) {
        pen = makePen(freshId(), ConcreteType::Definition, "", {node.id}, {}, authorship(),
                      now_);
        edgeFrom = pen->id;
    }

    Contribution edge =
        kindOf(shape->edgeType) == Kind::BidirectionalEdge
            ? makeBidirEdge(freshId(), shape->edgeType, edgeFrom, req.targetId, "", "", "",
                            edgeTags, {}, {}, authorship(), now_)
            : makeEdge(freshId(), shape->edgeType, edgeFrom, req.targetId, "", edgeTags,
                       authorship(), now_);

    store_.append(node);
    created.push_back(node.id);
    if (pen) {
        store_.append(*pen);
        created.push_back(pen->id);
    }
    store_.append(edge);
    created.push_back(edge.id);
    return created;
}

LandmarkId Activities::redFlag(const LandmarkId& target, const std::string& reason) {
    throwIf(target.isPit(), Errc::SelfEndpoint, "the pit cannot be flagged against itself");
    throwIf(store_.find(target) == nullptr, Errc::TargetNotFound, "no target " + target.hex());
    Contribution flag = makeBidirEdge(freshId(), ConcreteType::Equates, target, LandmarkId::pit(),
                                      reason, "", "", {}, {}, {}, authorship(), now_);
    store_.append(flag);
    return flag.id;
}

void Activities::markObsolete(const LandmarkId& id, std::set<LandmarkId>& marked) {
    const Contribution* c = store_.find(id);
    if (!c || c->isObsolete())
        return;
    std::int64_t deadline = now_ + store_.config().limboDuration;
    store_.mutate(id, [&](Contribution& x) { edit::setMark(x, makeObsolete(deadline)); });
    marked.insert(id);
}

std::set<LandmarkId> Activities::obsolete(const LandmarkId& id) {
    throwIf(store_.find(id) == nullptr, Errc::NotFound, "no contribution " + id.hex());
    std::set<LandmarkId> marked;
    for (const auto& member : obsoleteClosure(store_.graph(), id))
        markObsolete(member, marked);
    return marked;
}

void Activities::copyAndRedirect(const std::set<LandmarkId>& closure, const LandmarkId& root,
                                 std::map<LandmarkId, LandmarkId>& copyMap, bool skipSelfLoops) {
    std::set<LandmarkId> skipped;
    auto resolved = [&](const LandmarkId& ep) {
        return closure.count(ep) == 0 || copyMap.count(ep) > 0;
    };
    auto mapped = [&](const LandmarkId& ep) {
        auto it = copyMap.find(ep);
        return it == copyMap.end() ? ep : it->second;
    };
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& eid : closure) {
            if (eid == root || copyMap.count(eid) || skipped.count(eid))
                continue;
            const Contribution* e = store_.find(eid);
            if (!e || !e->isEdge()) { // the root aside, closures hold only edges
                skipped.insert(eid);
                continue;
            }
            auto eps = e->endpoints();
            if (std::any_of(eps.begin(), eps.end(),
                            [&](const LandmarkId& ep) { return skipped.count(ep) > 0; })) {
                skipped.insert(eid);
                progress = true;
                continue;
            }
            if (!std::all_of(eps.begin(), eps.end(), resolved))
                continue;
            Contribution copy = *e;
            copy.id = freshId();
            copy.status = Status::local();
            copy.marks.clear();
            copy.timestamp = now_;
            if (auto* ad = std::get_if<AdirEdgePayload>(&copy.payload)) {
                auto a = mapped(ad->a), b = mapped(ad->b);
                if (skipSelfLoops && a == b) {
                    skipped.insert(eid);
                    progress = true;
                    continue;
                }
                ad->a = std::min(a, b);
                ad->b = std::max(a, b);
            } else if (auto* uni = std::get_if<UnidirEdgePayload>(&copy.payload)) {
                auto f = mapped(uni->from), t = mapped(uni->to);
                if (skipSelfLoops && f == t) {
                    skipped.insert(eid);
                    progress = true;
                    continue;
                }
                uni->from = f;
                uni->to = t;
            } else if (auto* bi = std::get_if<BidirEdgePayload>(&copy.payload)) {
                auto f = mapped(bi->from), t = mapped(bi->to);
                if (skipSelfLoops && f == t) {
                    skipped.insert(eid);
                    progress = true;
                    continue;
                }
                bi->from = f;
                bi->to = t;
            }
            copy.authorships.insert(authorship());
            store_.append(copy);
            copyMap[eid] = copy.id;
            progress = true;
        }
    }
}

void Activities::extendPensOf(const LandmarkId& original, const LandmarkId& replacement) {
    // Only payload-held membership needs explicit new pennedIn edges; pennedIn
    // edges of the original are themselves copied and redirected.
    for (const auto& pid : store_.graph().pensOf(original)) {
        const Contribution* p = store_.find(pid);
        if (!p || !p->isPen() || p->pen()->contents.count(original) == 0)
            continue;
        bool already = p->pen()->contents.count(replacement) > 0;
        for (const auto& eid : store_.graph().edgesAt(replacement)) {
            const Contribution* e = store_.find(eid);
            if (e && e->ctype == ConcreteType::PennedIn) {
                const auto& u = std::get<UnidirEdgePayload>(e->payload);
                already = already || (u.from == replacement && u.to == pid);
            }
        }
        if (already)
            continue;
        store_.append(makeEdge(freshId(), ConcreteType::PennedIn, replacement, pid, "", {},
                               authorship(), now_));
    }
}

VersionReport Activities::versionReplace(const LandmarkId& oldId, const NewContent& content,
                                         bool equivalent) {
    const Contribution& old = store_.get(oldId);
    auto closure = obsoleteClosure(store_.graph(), oldId);

    Contribution fresh = old;
    fresh.id = freshId();
    fresh.label = content.label;
    if (content.type) {
        throwIf(kindOf(*content.type) != old.kind(), Errc::KindMismatch,
                "replacement must keep the contribution kind");
        fresh.ctype = *content.type;
    }
    if (!content.tags.empty())
        fresh.tags = content.tags;
    fresh.authorships = {authorship()};
    fresh.status = Status::local();
    fresh.marks.clear();
    fresh.timestamp = now_;
    validateContribution(fresh);

    Contribution marker =
        equivalent ? makeBidirEdge(freshId(), ConcreteType::Equates, oldId, fresh.id, "", "", "",
                                   {"@version"}, {}, {}, authorship(), now_)
                   : makeEdge(freshId(), ConcreteType::Relate, oldId, fresh.id, "", {"@version"},
                              authorship(), now_);

    store_.append(fresh);
    store_.append(marker);

    VersionReport report;
    report.newId = fresh.id;
    if (equivalent) {
        std::map<LandmarkId, LandmarkId> copyMap{{oldId, fresh.id}};
        copyAndRedirect(closure, oldId, copyMap, /*skipSelfLoops=*/false);
        extendPensOf(oldId, fresh.id);
        for (const auto& [orig, copy] : copyMap)
            if (orig != oldId)
                extendPensOf(orig, copy);
    } else {
        for (const auto& member : closure)
            if (member != oldId)
                report.needsManualRedirect.push_back(member);
    }

    std::set<LandmarkId> marked;
    for (const auto& member : closure)
        markObsolete(member, marked);
    return report;
}

LandmarkId Activities::mergeDuplicates(const LandmarkId& aId, const LandmarkId& bId) {
    if (aId == bId) {
        store_.get(aId);
        return aId;
    }
    const Contribution& a = store_.get(aId);
    const Contribution& b = store_.get(bId);
    throwIf(!mergeable(a, b), Errc::MergeMismatch,
            "contributions differ in label or type; only duplicates merge");

    const LandmarkId loser = std::min(aId, bId);
    const LandmarkId survivor = std::max(aId, bId);
    auto closure = obsoleteClosure(store_.graph(), loser);

    Contribution merged = mergeContribution(
        store_.get(survivor), store_.get(loser), store_.resolver(),
        [&](const ShareContract& sc) { store_.registerContract(sc); });

    Contribution marker =
        makeBidirEdge(freshId(), ConcreteType::Equates, loser, survivor, "merged", "", "",
                      {}, {"@replaced-by"}, {"@replaces"}, authorship(), now_);
    store_.append(marker);
    if (!(merged == store_.get(survivor)))
        store_.mutate(survivor, [&](Contribution& c) { c = merged; });

    std::map<LandmarkId, LandmarkId> copyMap{{loser, survivor}};
    copyAndRedirect(closure, loser, copyMap, /*skipSelfLoops=*/true);
    extendPensOf(loser, survivor);
    for (const auto& [orig, copy] : copyMap)
        if (orig != loser)
            extendPensOf(orig, copy);

    std::set<LandmarkId> marked;
    for (const auto& member : closure)
        markObsolete(member, marked);
    return survivor;
}

void Activities::relaxedMerge(const LandmarkId& a, const LandmarkId& b, const LandmarkId& keep) {
    throwIf(a == b, Errc::NotDistinct, "relaxed merge needs two distinct contributions");
    throwIf(keep != a && keep != b, Errc::NotFound, "keeper must be one of the merged pair");
    store_.get(a);
    store_.get(b);
    const LandmarkId other = keep == a ? b : a;
    store_.append(makeBidirEdge(freshId(), ConcreteType::Equates, other, keep, "merged", "", "",
                                {}, {}, {}, authorship(), now_));
    obsolete(other);
}

LandmarkId Activities::mutablePenAdd(const LandmarkId& member, const LandmarkId& pen) {
    throwIf(store_.find(member) == nullptr, Errc::NotFound, "no member " + member.hex());
    const Contribution* p = store_.find(pen);
    throwIf(p == nullptr, Errc::NotFound, "no pen " + pen.hex());
    throwIf(!p->isPen(), Errc::PennedInTargetNotPen, pen.hex() + " is not a pen");
    throwIf(p->pen()->contents.count(member) > 0, Errc::NotDistinct,
            "already a payload member of this pen");
    for (const auto& eid : store_.graph().edgesAt(member)) {
        const Contribution* e = store_.find(eid);
        if (!e || e->ctype != ConcreteType::PennedIn || e->isObsolete())
            continue;
        const auto& u = std::get<UnidirEdgePayload>(e->payload);
        throwIf(u.from == member && u.to == pen, Errc::NotDistinct,
                "duplicate pennedIn membership");
    }
    Contribution edge =
        makeEdge(freshId(), ConcreteType::PennedIn, member, pen, "", {}, authorship(), now_);
    store_.append(edge);
    return edge.id;
}

void Activities::mutablePenRemove(const LandmarkId& member, const LandmarkId& pen) {
    for (const auto& eid : store_.graph().edgesAt(member)) {
        const Contribution* e = store_.find(eid);
        if (!e || e->ctype != ConcreteType::PennedIn || e->isObsolete())
            continue;
        const auto& u = std::get<UnidirEdgePayload>(e->payload);
        if (u.from == member && u.to == pen) {
            obsolete(eid);
            return;
        }
    }
    throw Error(Errc::NotFound, "no removable pennedIn membership for " + member.hex());
}

} // namespace mmm
