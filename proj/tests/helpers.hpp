#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qpredec/dem.hpp"
#include "qpredec/primitives.hpp"

namespace test_helpers {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string fixture_path(const std::string& name) {
    return std::string(QPREDEC_FIXTURE_DIR) + "/" + name;
}

inline qpredec::CssCodeSpec rep3_code() {
    return qpredec::parse_code_spec(read_file(fixture_path("rep3.json")));
}

inline qpredec::CssCodeSpec steane_code() {
    return qpredec::parse_code_spec(read_file(fixture_path("steane.json")));
}

// ---------------------------------------------------------------------------
// Independent oracles. These deliberately use naive data structures and no
// search bounds so they can check the production implementations.
// ---------------------------------------------------------------------------

// Exhaustive composite pruner: same smallest-first pass discipline, but the
// cover search enumerates every disjoint cover of any cardinality.
inline qpredec::PrimitiveSet oracle_composite_prune(const qpredec::PrimitiveSet& in) {
    using qpredec::Primitive;
    std::vector<Primitive> ps = in.primitives;
    std::sort(ps.begin(), ps.end(), [](const Primitive& a, const Primitive& b) {
        if (a.syndrome_set.size() != b.syndrome_set.size())
            return a.syndrome_set.size() < b.syndrome_set.size();
        if (a.syndrome_set != b.syndrome_set) return a.syndrome_set < b.syndrome_set;
        return a.observable_set < b.observable_set;
    });
    std::vector<bool> removed(ps.size(), false);

    auto is_subset = [](const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    size_t begin = 0;
    while (begin < ps.size()) {
        size_t end = begin;
        size_t sz = ps[begin].syndrome_set.size();
        while (end < ps.size() && ps[end].syndrome_set.size() == sz) ++end;
        std::vector<bool> removed_now(ps.size(), false);
        for (size_t t = begin; t < end; ++t) {
            if (ps[t].syndrome_set.size() < 2) continue;
            std::vector<size_t> cands;
            for (size_t c = 0; c < begin; ++c)
                if (!removed[c] && ps[c].syndrome_set.size() < ps[t].syndrome_set.size() &&
                    is_subset(ps[c].syndrome_set, ps[t].syndrome_set))
                    cands.push_back(c);
            bool any_match = false, any_mismatch = false;
            // recursive enumeration of all disjoint exact covers
            std::set<uint32_t> target_s(ps[t].syndrome_set.begin(), ps[t].syndrome_set.end());
            std::set<uint32_t> target_o(ps[t].observable_set.begin(), ps[t].observable_set.end());
            auto rec = [&](auto&& self, size_t start, std::set<uint32_t> s,
                           std::set<uint32_t> o) -> void {
                if (s == target_s) {
                    (o == target_o ? any_match : any_mismatch) = true;
                    return;
                }
                for (size_t i = start; i < cands.size(); ++i) {
                    const Primitive& cand = ps[cands[i]];
                    bool disjoint = true;
                    for (uint32_t x : cand.syndrome_set)
                        if (s.count(x)) disjoint = false;
                    if (!disjoint) continue;
                    std::set<uint32_t> ns = s;
                    for (uint32_t x : cand.syndrome_set) ns.insert(x);
                    bool inside = true;
                    for (uint32_t x : ns)
                        if (!target_s.count(x)) inside = false;
                    if (!inside) continue;
                    std::set<uint32_t> no = o;
                    for (uint32_t x : cand.observable_set) {
                        if (no.count(x))
                            no.erase(x);
                        else
                            no.insert(x);
                    }
                    self(self, i + 1, std::move(ns), std::move(no));
                }
            };
            rec(rec, 0, {}, {});
            if (any_match && !any_mismatch) removed_now[t] = true;
        }
        for (size_t t = begin; t < end; ++t) removed[t] = removed_now[t];
        begin = end;
    }
    qpredec::PrimitiveSet out = in;
    out.primitives.clear();
    for (size_t i = 0; i < ps.size(); ++i)
        if (!removed[i]) out.primitives.push_back(ps[i]);
    std::sort(out.primitives.begin(), out.primitives.end(),
              [](const Primitive& a, const Primitive& b) {
                  if (a.syndrome_set != b.syndrome_set) return a.syndrome_set < b.syndrome_set;
                  return a.observable_set < b.observable_set;
              });
    return out;
}

// Exhaustive chromatic number of a small graph (adjacency list on 0..n-1).
inline uint32_t oracle_chromatic_number(const std::vector<std::vector<uint32_t>>& adj) {
    size_t n = adj.size();
    if (n == 0) return 0;
    for (uint32_t k = 1;; ++k) {
        std::vector<uint32_t> color(n, UINT32_MAX);
        auto rec = [&](auto&& self, size_t v, uint32_t used) -> bool {
            if (v == n) return true;
            uint32_t limit = std::min<uint32_t>(k - 1, used);
            for (uint32_t c = 0; c <= limit; ++c) {
                bool ok = true;
                for (uint32_t u : adj[v])
                    if (color[u] == c) ok = false;
                if (!ok) continue;
                color[v] = c;
                if (self(self, v + 1, std::max(used, c + 1))) return true;
                color[v] = UINT32_MAX;
            }
            return false;
        };
        if (rec(rec, 0, 0)) return k;
    }
}

}  // namespace test_helpers
