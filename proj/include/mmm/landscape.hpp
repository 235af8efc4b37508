// A landscape: a set of contributions keyed by id, plus the implicit pit.
// Joining two landscapes unions them and merges homologues.
#pragma once

#include <map>

#include "mmm/contribution.hpp"

namespace mmm {

// A set of landmark ids naming a sub-landscape.
using Area = std::set<LandmarkId>;

class Landscape {
public:
    using Map = std::map<LandmarkId, Contribution>;

    bool contains(const LandmarkId& id) const { return id.isPit() || byId_.count(id) > 0; }
    const Contribution* find(const LandmarkId& id) const {
        auto it = byId_.find(id);
        return it == byId_.end() ? nullptr : &it->second;
    }
    std::size_t size() const { return byId_.size(); } // excluding the pit
    bool empty() const { return byId_.empty(); }

    // Insert or homologue-merge. Same id with unmergeable content is a
    // corruption signal.  Throws DuplicateIdConflict.
    void add(const Contribution& c, const ContractResolver& resolver = nullContractResolver());

    // Insert or replace wholesale, no merging (replay/restore path).
    void put(Contribution c) { byId_[c.id] = std::move(c); }

    void erase(const LandmarkId& id) { byId_.erase(id); }

    const Map& all() const { return byId_; } // iteration is id-sorted

private:
    Map byId_;
};

// L ⊑ L': every contribution of L has a homologue in L' that dominates it
// under ⪯.
bool landscapeLeq(const Landscape& l, const Landscape& lp,
                  const ContractResolver& resolver = nullContractResolver());

// m*: union with homologue-wise merge; the least upper bound under ⊑.
Landscape landscapeJoin(const Landscape& l, const Landscape& lp,
                        const ContractResolver& resolver = nullContractResolver());

} // namespace mmm
