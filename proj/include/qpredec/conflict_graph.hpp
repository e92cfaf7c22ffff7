#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "qpredec/gf2.hpp"
#include "qpredec/primitives.hpp"

namespace qpredec {

// Undirected graph over the primitives of one class; an edge joins two
// primitives whose syndrome sets intersect (a read-modify-write hazard on
// the shared syndrome bits).
struct ConflictGraph {
    std::vector<uint32_t> nodes;             // primitive ids, ascending
    std::vector<std::vector<uint32_t>> adj;  // local-index adjacency lists
    std::vector<std::vector<uint32_t>> cliques;  // local indices, each sorted
    uint32_t omega_lb = 0;  // size of the largest discovered clique
    size_t num_edges = 0;

    size_t size() const { return nodes.size(); }
};

namespace detail {

// Bounded Bron-Kerbosch maximal clique enumeration with pivoting.
class CliqueEnumerator {
  public:
    CliqueEnumerator(const std::vector<BitVec>& nbr, size_t cap)
        : nbr_(nbr), cap_(cap), n_(nbr.size()) {}

    std::vector<std::vector<uint32_t>> run() {
        BitVec p(n_), x(n_);
        for (size_t i = 0; i < n_; ++i) p.set(i);
        std::vector<uint32_t> r;
        expand(r, p, x);
        return std::move(found_);
    }

  private:
    void expand(std::vector<uint32_t>& r, BitVec p, BitVec x) {
        if (found_.size() >= cap_) return;
        if (p.none() && x.none()) {
            if (r.size() >= 2) found_.push_back(r);
            return;
        }
        // pivot with most neighbors in p
        size_t pivot = SIZE_MAX, best = 0;
        for (size_t u : p.set_bits()) {
            BitVec t = p;
            t &= nbr_[u];
            size_t c = t.popcount();
            if (pivot == SIZE_MAX || c > best) pivot = u, best = c;
        }
        for (size_t u : x.set_bits()) {
            BitVec t = p;
            t &= nbr_[u];
            size_t c = t.popcount();
            if (pivot == SIZE_MAX || c > best) pivot = u, best = c;
        }
        BitVec ext = p;
        if (pivot != SIZE_MAX) ext.and_not(nbr_[pivot]);
        for (size_t v : ext.set_bits()) {
            if (found_.size() >= cap_) return;
            BitVec np = p, nx = x;
            np &= nbr_[v];
            nx &= nbr_[v];
            r.push_back(static_cast<uint32_t>(v));
            expand(r, np, nx);
            r.pop_back();
            p.reset(v);
            x.set(v);
        }
    }

    const std::vector<BitVec>& nbr_;
    size_t cap_;
    size_t n_;
    std::vector<std::vector<uint32_t>> found_;
};

}  // namespace detail

inline constexpr size_t kMaxEnumeratedCliques = 10000;

// `member_ids` selects the primitives (of one class) from `set`.
inline ConflictGraph build_conflict_graph(const PrimitiveSet& set,
                                          const std::vector<uint32_t>& member_ids,
                                          uint32_t num_detectors) {
    ConflictGraph g;
    g.nodes = member_ids;
    std::sort(g.nodes.begin(), g.nodes.end());
    size_t n = g.nodes.size();
    g.adj.resize(n);
    if (n == 0) return g;

    std::vector<BitVec> masks(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& s = set.primitives[g.nodes[i]].syndrome_set;
        masks[i] = bitvec_from(num_detectors, {s.begin(), s.end()});
    }
    std::vector<BitVec> nbr(n, BitVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (masks[i].intersects(masks[j])) {
                g.adj[i].push_back(static_cast<uint32_t>(j));
                g.adj[j].push_back(static_cast<uint32_t>(i));
                nbr[i].set(j);
                nbr[j].set(i);
                ++g.num_edges;
            }

    std::set<std::vector<uint32_t>> uniq;
    // every group of primitives sharing one detector is a clique
    for (uint32_t d = 0; d < num_detectors; ++d) {
        std::vector<uint32_t> group;
        for (size_t i = 0; i < n; ++i)
            if (masks[i].test(d)) group.push_back(static_cast<uint32_t>(i));
        if (group.size() >= 2) uniq.insert(std::move(group));
    }
    detail::CliqueEnumerator enumerator(nbr, kMaxEnumeratedCliques);
    for (auto& c : enumerator.run()) {
        std::sort(c.begin(), c.end());
        uniq.insert(std::move(c));
    }
    g.omega_lb = 1;
    for (const auto& c : uniq) {
        g.omega_lb = std::max(g.omega_lb, static_cast<uint32_t>(c.size()));
        g.cliques.push_back(c);
    }
    return g;
}

}  // namespace qpredec
