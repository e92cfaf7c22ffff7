#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qpredec/dem.hpp"
#include "qpredec/gf2.hpp"

namespace qpredec {

enum class PrimitiveClass : uint8_t {
    TimeLike,
    BulkSpaceLike,
    EdgeSpaceLike,
    SpacetimeLike,
    HookLike,
    Unclassified,
};

inline const char* class_name(PrimitiveClass c) {
    switch (c) {
        case PrimitiveClass::TimeLike: return "TimeLike";
        case PrimitiveClass::BulkSpaceLike: return "BulkSpaceLike";
        case PrimitiveClass::EdgeSpaceLike: return "EdgeSpaceLike";
        case PrimitiveClass::SpacetimeLike: return "SpacetimeLike";
        case PrimitiveClass::HookLike: return "HookLike";
        case PrimitiveClass::Unclassified: return "Unclassified";
    }
    return "?";
}

inline std::optional<PrimitiveClass> class_from_name(const std::string& s) {
    for (PrimitiveClass c :
         {PrimitiveClass::TimeLike, PrimitiveClass::BulkSpaceLike, PrimitiveClass::EdgeSpaceLike,
          PrimitiveClass::SpacetimeLike, PrimitiveClass::HookLike, PrimitiveClass::Unclassified})
        if (s == class_name(c)) return c;
    return std::nullopt;
}

// One predecoding unit: when every detector in `syndrome_set` is active,
// clear them and flip the observables in `observable_set`.
struct Primitive {
    std::vector<uint32_t> syndrome_set;    // S, sorted detector indices
    std::vector<uint32_t> observable_set;  // O, sorted observable indices
    double probability = 0.0;
    PrimitiveClass cls = PrimitiveClass::Unclassified;
    uint32_t canonical_round = 0;
    std::vector<uint32_t> source_ids;  // mechanism provenance (normalized model order)
    // Set once the round-offset prune canonicalized this primitive; such a
    // primitive may be re-instantiated at any valid round offset at run time.
    bool round_canonical = false;
    // Spans more than two distinct rounds, exceeding the two-round window.
    bool exceeds_two_round_window = false;
};

struct PrimitiveSet {
    std::vector<Primitive> primitives;
    std::string dem_ref;  // content hash of the source model
    std::vector<PrimitiveClass> class_priorities;
    bool round_prune_skipped = false;

    // flow accounting for build reports
    uint32_t generated_count = 0;
    uint32_t round_pruned = 0;
    uint32_t composite_pruned = 0;
    uint32_t composite_skipped = 0;    // targets skipped by the search bounds
    uint32_t composite_ambiguous = 0;  // covers found with conflicting observables
    uint32_t flagged_wide = 0;         // primitives spanning > 2 rounds
};

// --------------------------------------------------------------------------
// Detector decomposition into (spatial id, round) from coordinate metadata.
// The spatial id interns the coordinate prefix (everything but the final
// time coordinate); for built phenomenological models it equals the check id.
// --------------------------------------------------------------------------
class RoundLayout {
  public:
    RoundLayout() = default;

    explicit RoundLayout(const DetectorErrorModel& dem) {
        if (!dem.has_full_round_metadata()) return;
        spatial_.resize(dem.num_detectors);
        round_.resize(dem.num_detectors);
        std::map<std::vector<double>, uint32_t> intern;
        for (const auto& d : dem.detectors) {
            std::vector<double> prefix(d.coords->begin(), d.coords->end() - 1);
            auto [it, inserted] = intern.try_emplace(prefix, static_cast<uint32_t>(intern.size()));
            spatial_[d.index] = it->second;
            round_[d.index] = *d.round;
            num_rounds_ = std::max(num_rounds_, *d.round + 1);
            if (!index_of_.emplace(std::make_pair(it->second, *d.round), d.index).second)
                return;  // two detectors collide on (spatial, round): no usable layout
        }
        available_ = true;
    }

    bool available() const { return available_; }
    uint32_t spatial(uint32_t det) const { return spatial_[det]; }
    uint32_t round(uint32_t det) const { return round_[det]; }
    uint32_t num_rounds() const { return num_rounds_; }

    std::optional<uint32_t> detector_at(uint32_t spatial, uint32_t round) const {
        auto it = index_of_.find({spatial, round});
        if (it == index_of_.end()) return std::nullopt;
        return it->second;
    }

    uint32_t span_of(const std::vector<uint32_t>& dets) const {
        std::set<uint32_t> rounds;
        for (uint32_t d : dets) rounds.insert(round_[d]);
        return static_cast<uint32_t>(rounds.size());
    }

  private:
    bool available_ = false;
    std::vector<uint32_t> spatial_;
    std::vector<uint32_t> round_;
    uint32_t num_rounds_ = 0;
    std::map<std::pair<uint32_t, uint32_t>, uint32_t> index_of_;
};

namespace detail {

inline void sort_canonical(std::vector<Primitive>& ps) {
    std::sort(ps.begin(), ps.end(), [](const Primitive& a, const Primitive& b) {
        if (a.syndrome_set != b.syndrome_set) return a.syndrome_set < b.syndrome_set;
        return a.observable_set < b.observable_set;
    });
}

}  // namespace detail

// Exactly one primitive per mechanism; classes start out Unclassified.
inline PrimitiveSet generate_primitives(const DetectorErrorModel& dem) {
    PrimitiveSet set;
    set.dem_ref = dem_content_hash(dem);
    RoundLayout layout(dem);
    set.primitives.reserve(dem.mechanisms.size());
    for (uint32_t i = 0; i < dem.mechanisms.size(); ++i) {
        const auto& m = dem.mechanisms[i];
        Primitive p;
        p.syndrome_set = m.detectors;
        p.observable_set = m.observables;
        p.probability = m.probability;
        p.source_ids = {i};
        if (layout.available() && !m.detectors.empty()) {
            uint32_t lo = layout.round(m.detectors[0]);
            for (uint32_t d : m.detectors) lo = std::min(lo, layout.round(d));
            p.canonical_round = lo;
        }
        set.primitives.push_back(std::move(p));
    }
    set.generated_count = static_cast<uint32_t>(set.primitives.size());
    return set;
}

// Collapses primitives that are round-shifted copies of one another: same
// (spatial id, relative round) multiset for S and same O. The representative
// keeps the earliest copy's indices, canonical_round 0 and the maximum
// probability over the copies. Primitives spanning more than two rounds are
// kept as-is and flagged.
inline PrimitiveSet prune_round_offsets(const PrimitiveSet& in, const DetectorErrorModel& dem) {
    RoundLayout layout(dem);
    if (!layout.available()) {
        PrimitiveSet out = in;
        out.round_prune_skipped = true;
        return out;
    }
    PrimitiveSet out = in;
    out.primitives.clear();
    out.round_prune_skipped = false;

    using Pattern = std::vector<std::pair<uint32_t, uint32_t>>;  // (spatial, relative round)
    std::map<std::pair<Pattern, std::vector<uint32_t>>, Primitive> groups;

    for (const auto& p : in.primitives) {
        uint32_t base = layout.round(p.syndrome_set[0]);
        std::set<uint32_t> rounds;
        for (uint32_t d : p.syndrome_set) {
            base = std::min(base, layout.round(d));
            rounds.insert(layout.round(d));
        }
        if (rounds.size() > 2) {
            Primitive kept = p;
            kept.exceeds_two_round_window = true;
            out.primitives.push_back(std::move(kept));
            ++out.flagged_wide;
            continue;
        }
        Pattern pat;
        for (uint32_t d : p.syndrome_set) pat.emplace_back(layout.spatial(d), layout.round(d) - base);
        std::sort(pat.begin(), pat.end());
        auto key = std::make_pair(std::move(pat), p.observable_set);
        auto it = groups.find(key);
        if (it == groups.end()) {
            Primitive rep = p;
            rep.canonical_round = 0;
            rep.round_canonical = true;
            groups.emplace(std::move(key), std::move(rep));
        } else {
            Primitive& rep = it->second;
            uint32_t rep_base = layout.round(rep.syndrome_set[0]);
            for (uint32_t d : rep.syndrome_set) rep_base = std::min(rep_base, layout.round(d));
            if (base < rep_base) {
                auto sources = rep.source_ids;
                double prob = rep.probability;
                rep = p;
                rep.canonical_round = 0;
                rep.round_canonical = true;
                rep.probability = std::max(prob, p.probability);
                rep.source_ids.insert(rep.source_ids.end(), sources.begin(), sources.end());
            } else {
                rep.probability = std::max(rep.probability, p.probability);
                rep.source_ids.insert(rep.source_ids.end(), p.source_ids.begin(),
                                      p.source_ids.end());
            }
            ++out.round_pruned;
        }
    }
    for (auto& [key, rep] : groups) {
        std::sort(rep.source_ids.begin(), rep.source_ids.end());
        out.primitives.push_back(std::move(rep));
    }
    detail::sort_canonical(out.primitives);
    return out;
}

namespace detail {

// Enumerates disjoint exact covers of `target` by candidate primitives
// (each a proper subset of target.S), up to `max_parts` parts. Returns
// true when at least one cover exists; sets `all_match`/`any_match`
// according to whether the covers' observable XORs equal target.O.
inline bool enumerate_covers(const Primitive& target, const std::vector<const Primitive*>& cands,
                             uint32_t num_detectors, uint32_t num_observables, int max_parts,
                             bool& any_match, bool& any_mismatch) {
    any_match = any_mismatch = false;
    BitVec target_s = bitvec_from(num_detectors, {target.syndrome_set.begin(),
                                                  target.syndrome_set.end()});
    BitVec target_o = bitvec_from(num_observables, {target.observable_set.begin(),
                                                    target.observable_set.end()});
    size_t n = cands.size();
    std::vector<BitVec> s(n), o(n);
    for (size_t i = 0; i < n; ++i) {
        s[i] = bitvec_from(num_detectors,
                           {cands[i]->syndrome_set.begin(), cands[i]->syndrome_set.end()});
        o[i] = bitvec_from(num_observables,
                           {cands[i]->observable_set.begin(), cands[i]->observable_set.end()});
    }
    bool found = false;
    auto consider = [&](const BitVec& cover_s, const BitVec& cover_o) {
        if (!(cover_s == target_s)) return;
        found = true;
        if (cover_o == target_o)
            any_match = true;
        else
            any_mismatch = true;
    };
    std::vector<size_t> pick;
    BitVec acc_s(num_detectors), acc_o(num_observables);
    // depth-first over index-increasing combinations with disjointness pruning
    auto rec = [&](auto&& self, size_t start, const BitVec& cs, const BitVec& co,
                   int depth) -> void {
        if (depth == max_parts) return;
        for (size_t i = start; i < n; ++i) {
            if (cs.intersects(s[i])) continue;
            BitVec ns = cs;
            ns ^= s[i];
            if (!target_s.contains(ns)) continue;
            BitVec no = co;
            no ^= o[i];
            consider(ns, no);
            self(self, i + 1, ns, no, depth + 1);
        }
    };
    rec(rec, 0, acc_s, acc_o, 0);
    return found;
}

}  // namespace detail

struct CompositePruneOptions {
    int max_cover_parts = 3;
    size_t max_candidates = 64;
};

// Removes primitives whose condition equals a disjoint union of smaller
// retained primitives. A target is removed only when covers exist and every
// discovered cover flips the same observables as the target; a target with
// conflicting covers is kept, since firing the wrong combination at run time
// would silently flip observables by a logical operator. Single pass,
// smallest condition first; decisions for equal-sized targets all use the
// set as it stood before that size group.
inline PrimitiveSet prune_composites(const PrimitiveSet& in, uint32_t num_detectors,
                                     uint32_t num_observables,
                                     const CompositePruneOptions& opt = {}) {
    PrimitiveSet out = in;
    std::vector<Primitive> ps = in.primitives;
    detail::sort_canonical(ps);
    std::stable_sort(ps.begin(), ps.end(), [](const Primitive& a, const Primitive& b) {
        return a.syndrome_set.size() < b.syndrome_set.size();
    });

    std::vector<bool> removed(ps.size(), false);
    size_t group_begin = 0;
    while (group_begin < ps.size()) {
        size_t group_end = group_begin;
        size_t sz = ps[group_begin].syndrome_set.size();
        while (group_end < ps.size() && ps[group_end].syndrome_set.size() == sz) ++group_end;

        std::vector<bool> removed_now(ps.size(), false);
        for (size_t t = group_begin; t < group_end; ++t) {
            const Primitive& target = ps[t];
            if (target.syndrome_set.size() < 2) continue;
            BitVec target_s =
                bitvec_from(num_detectors, {target.syndrome_set.begin(), target.syndrome_set.end()});
            std::vector<const Primitive*> cands;
            bool skip = false;
            for (size_t c = 0; c < group_begin; ++c) {  // strictly smaller sizes only
                if (removed[c]) continue;
                const Primitive& cand = ps[c];
                BitVec cs = bitvec_from(num_detectors,
                                        {cand.syndrome_set.begin(), cand.syndrome_set.end()});
                if (!target_s.contains(cs)) continue;
                cands.push_back(&cand);
                if (cands.size() > opt.max_candidates) {
                    skip = true;
                    break;
                }
            }
            if (skip) {
                ++out.composite_skipped;
                continue;
            }
            if (cands.empty()) continue;
            bool any_match = false, any_mismatch = false;
            detail::enumerate_covers(target, cands, num_detectors, num_observables,
                                     opt.max_cover_parts, any_match, any_mismatch);
            if (any_match && !any_mismatch) {
                removed_now[t] = true;
            } else if (any_match && any_mismatch) {
                ++out.composite_ambiguous;
            }
        }
        for (size_t t = group_begin; t < group_end; ++t)
            if (removed_now[t]) {
                removed[t] = true;
                ++out.composite_pruned;
            }
        group_begin = group_end;
    }

    out.primitives.clear();
    for (size_t i = 0; i < ps.size(); ++i)
        if (!removed[i]) out.primitives.push_back(ps[i]);
    detail::sort_canonical(out.primitives);
    return out;
}

// Optional provenance sidecar: mechanism index -> "measurement"|"data"|"hook".
using FaultSidecar = std::map<uint32_t, std::string>;

inline PrimitiveSet classify(const PrimitiveSet& in, const DetectorErrorModel& dem,
                             const FaultSidecar* sidecar = nullptr) {
    PrimitiveSet out = in;
    RoundLayout layout(dem);
    if (!layout.available()) {
        for (auto& p : out.primitives) p.cls = PrimitiveClass::Unclassified;
        return out;
    }
    for (auto& p : out.primitives) {
        const auto& S = p.syndrome_set;
        std::set<uint32_t> rounds, spatials;
        for (uint32_t d : S) {
            rounds.insert(layout.round(d));
            spatials.insert(layout.spatial(d));
        }
        bool sidecar_hook = false;
        if (sidecar) {
            for (uint32_t src : p.source_ids) {
                auto it = sidecar->find(src);
                if (it != sidecar->end() && it->second == "hook") sidecar_hook = true;
            }
        }
        if (S.size() == 1) {
            p.cls = PrimitiveClass::EdgeSpaceLike;
        } else if (S.size() == 2 && spatials.size() == 1 && rounds.size() == 2 &&
                   *rounds.rbegin() - *rounds.begin() == 1) {
            p.cls = PrimitiveClass::TimeLike;
        } else if (rounds.size() == 1) {
            p.cls = PrimitiveClass::BulkSpaceLike;
        } else if (sidecar ? (sidecar_hook && spatials.size() >= 2)
                           : (S.size() >= 3 && spatials.size() >= 3)) {
            p.cls = PrimitiveClass::HookLike;
        } else {
            p.cls = PrimitiveClass::SpacetimeLike;
        }
    }
    return out;
}

// Classes ordered by descending average per-primitive probability;
// EdgeSpaceLike always last; ties broken by class name.
inline std::vector<PrimitiveClass> rank_classes(const PrimitiveSet& set) {
    std::map<PrimitiveClass, std::pair<double, uint32_t>> acc;  // sum, count
    for (const auto& p : set.primitives) {
        auto& a = acc[p.cls];
        a.first += p.probability;
        a.second += 1;
    }
    std::vector<PrimitiveClass> order;
    for (auto& [cls, a] : acc) order.push_back(cls);
    auto avg = [&](PrimitiveClass c) { return acc[c].first / acc[c].second; };
    std::sort(order.begin(), order.end(), [&](PrimitiveClass a, PrimitiveClass b) {
        bool ea = a == PrimitiveClass::EdgeSpaceLike;
        bool eb = b == PrimitiveClass::EdgeSpaceLike;
        if (ea != eb) return eb;  // EdgeSpaceLike sorts last
        if (avg(a) != avg(b)) return avg(a) > avg(b);
        return std::string(class_name(a)) < class_name(b);
    });
    return order;
}

}  // namespace qpredec
