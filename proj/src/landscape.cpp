#include "mmm/landscape.hpp"

#include "mmm/error.hpp"

namespace mmm {

void Landscape::add(const Contribution& c, const ContractResolver& resolver) {
    auto it = byId_.find(c.id);
    if (it == byId_.end()) {
        byId_.emplace(c.id, c);
        return;
    }
    throwIf(!mergeable(it->second, c), Errc::DuplicateIdConflict,
            "homologues with different label or type: " + c.id.hex());
    it->second = mergeContribution(it->second, c, resolver);
}

bool landscapeLeq(const Landscape& l, const Landscape& lp, const ContractResolver& resolver) {
    for (const auto& [id, c] : l.all()) {
        const Contribution* hom = lp.find(id);
        if (!hom || !contributionLeq(c, *hom, resolver))
            return false;
    }
    return true;
}

Landscape landscapeJoin(const Landscape& l, const Landscape& lp, const ContractResolver& resolver) {
    Landscape out = l;
    for (const auto& [id, c] : lp.all())
        out.add(c, resolver);
    return out;
}

} // namespace mmm
