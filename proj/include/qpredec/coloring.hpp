#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <deque>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpredec/conflict_graph.hpp"
#include "qpredec/rng.hpp"

namespace qpredec {

// A pipeline-stage assignment: node -> 0-based color index.
struct Coloring {
    std::vector<uint32_t> assignment;
    uint32_t num_colors = 0;
    std::string method;
};

// Independent properness check: every edge bi-chromatic, color indices
// contiguous from zero. Deliberately ignorant of how the coloring was found.
inline bool validate_coloring(const ConflictGraph& g, const Coloring& c) {
    if (c.assignment.size() != g.size()) return false;
    std::vector<bool> used(c.num_colors, false);
    for (size_t v = 0; v < g.size(); ++v) {
        if (c.assignment[v] >= c.num_colors) return false;
        used[c.assignment[v]] = true;
        for (uint32_t u : g.adj[v])
            if (c.assignment[u] == c.assignment[v]) return false;
    }
    for (bool b : used)
        if (!b) return false;
    return true;
}

inline const std::vector<std::string>& greedy_heuristics() {
    static const std::vector<std::string> names = {
        "largest-first",  "smallest-last",        "dsatur",
        "random-sequential", "connected-sequential", "independent-set"};
    return names;
}

namespace detail {

inline Coloring greedy_in_order(const ConflictGraph& g, const std::vector<uint32_t>& order,
                                const std::string& method) {
    Coloring c;
    c.method = method;
    c.assignment.assign(g.size(), UINT32_MAX);
    uint32_t max_color = 0;
    for (uint32_t v : order) {
        std::vector<bool> taken(g.size() + 1, false);
        for (uint32_t u : g.adj[v])
            if (c.assignment[u] != UINT32_MAX) taken[c.assignment[u]] = true;
        uint32_t col = 0;
        while (taken[col]) ++col;
        c.assignment[v] = col;
        max_color = std::max(max_color, col);
    }
    c.num_colors = g.size() == 0 ? 0 : max_color + 1;
    return c;
}

inline std::vector<uint32_t> identity_order(size_t n) {
    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    return order;
}

inline Coloring color_largest_first(const ConflictGraph& g) {
    auto order = identity_order(g.size());
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return g.adj[a].size() > g.adj[b].size(); });
    return greedy_in_order(g, order, "largest-first");
}

inline Coloring color_smallest_last(const ConflictGraph& g) {
    size_t n = g.size();
    std::vector<size_t> deg(n);
    std::vector<bool> gone(n, false);
    for (size_t v = 0; v < n; ++v) deg[v] = g.adj[v].size();
    std::vector<uint32_t> order;  // removal order; colored in reverse
    for (size_t step = 0; step < n; ++step) {
        size_t best = SIZE_MAX;
        for (size_t v = 0; v < n; ++v)
            if (!gone[v] && (best == SIZE_MAX || deg[v] < deg[best])) best = v;
        gone[best] = true;
        order.push_back(static_cast<uint32_t>(best));
        for (uint32_t u : g.adj[best])
            if (!gone[u]) --deg[u];
    }
    std::reverse(order.begin(), order.end());
    return greedy_in_order(g, order, "smallest-last");
}

inline Coloring color_dsatur(const ConflictGraph& g) {
    size_t n = g.size();
    Coloring c;
    c.method = "dsatur";
    c.assignment.assign(n, UINT32_MAX);
    std::vector<std::set<uint32_t>> nbr_colors(n);
    uint32_t max_color = 0;
    for (size_t step = 0; step < n; ++step) {
        size_t best = SIZE_MAX;
        for (size_t v = 0; v < n; ++v) {
            if (c.assignment[v] != UINT32_MAX) continue;
            if (best == SIZE_MAX) {
                best = v;
                continue;
            }
            auto key = [&](size_t w) {
                return std::make_pair(nbr_colors[w].size(), g.adj[w].size());
            };
            if (key(v) > key(best)) best = v;
        }
        uint32_t col = 0;
        while (nbr_colors[best].count(col)) ++col;
        c.assignment[best] = col;
        max_color = std::max(max_color, col);
        for (uint32_t u : g.adj[best]) nbr_colors[u].insert(col);
    }
    c.num_colors = n == 0 ? 0 : max_color + 1;
    return c;
}

inline Coloring color_random_sequential(const ConflictGraph& g, uint64_t seed) {
    auto order = identity_order(g.size());
    SplitMix64 rng(mix_seed(seed, 0x9e3779b9));
    shuffle(order, rng);
    return greedy_in_order(g, order, "random-sequential");
}

inline Coloring color_connected_sequential(const ConflictGraph& g) {
    size_t n = g.size();
    std::vector<bool> seen(n, false);
    std::vector<uint32_t> order;
    for (size_t s = 0; s < n; ++s) {
        if (seen[s]) continue;
        std::deque<uint32_t> q{static_cast<uint32_t>(s)};
        seen[s] = true;
        while (!q.empty()) {
            uint32_t v = q.front();
            q.pop_front();
            order.push_back(v);
            for (uint32_t u : g.adj[v])
                if (!seen[u]) {
                    seen[u] = true;
                    q.push_back(u);
                }
        }
    }
    return greedy_in_order(g, order, "connected-sequential");
}

inline Coloring color_independent_set(const ConflictGraph& g) {
    size_t n = g.size();
    Coloring c;
    c.method = "independent-set";
    c.assignment.assign(n, UINT32_MAX);
    std::vector<bool> colored(n, false);
    uint32_t color = 0;
    size_t remaining = n;
    while (remaining > 0) {
        // greedily grow a maximal independent set among uncolored nodes,
        // preferring low residual degree
        std::vector<size_t> deg(n, 0);
        for (size_t v = 0; v < n; ++v) {
            if (colored[v]) continue;
            for (uint32_t u : g.adj[v])
                if (!colored[u]) ++deg[v];
        }
        auto order = identity_order(n);
        std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
            return deg[a] < deg[b];
        });
        std::vector<bool> blocked(n, false);
        for (uint32_t v : order) {
            if (colored[v] || blocked[v]) continue;
            c.assignment[v] = color;
            colored[v] = true;
            --remaining;
            for (uint32_t u : g.adj[v]) blocked[u] = true;
        }
        ++color;
    }
    c.num_colors = n == 0 ? 0 : color;
    return c;
}

}  // namespace detail

inline Coloring greedy_color(const ConflictGraph& g, const std::string& heuristic,
                             uint64_t seed = 1) {
    if (heuristic == "largest-first") return detail::color_largest_first(g);
    if (heuristic == "smallest-last") return detail::color_smallest_last(g);
    if (heuristic == "dsatur") return detail::color_dsatur(g);
    if (heuristic == "random-sequential") return detail::color_random_sequential(g, seed);
    if (heuristic == "connected-sequential") return detail::color_connected_sequential(g);
    if (heuristic == "independent-set") return detail::color_independent_set(g);
    throw std::invalid_argument("unknown coloring heuristic: " + heuristic);
}

enum class ExactStatus { Found, Exhausted, Timeout };

struct ExactResult {
    ExactStatus status = ExactStatus::Timeout;
    std::optional<Coloring> coloring;
};

namespace detail {

// Backtracking k-coloring search: saturation-ordered node selection, clique
// all-different propagation, one maximum clique pre-colored for symmetry
// breaking, and colors introduced in first-use order.
class ExactColorSearch {
  public:
    ExactColorSearch(const ConflictGraph& g, uint32_t k,
                     std::chrono::steady_clock::time_point deadline)
        : g_(g), k_(k), deadline_(deadline) {}

    ExactResult run() {
        size_t n = g_.size();
        color_.assign(n, UINT32_MAX);
        domain_.assign(n, k_ >= 64 ? ~uint64_t{0} : ((uint64_t{1} << k_) - 1));
        max_used_ = -1;

        // pre-color a maximum discovered clique (smallest such, for determinism)
        const std::vector<uint32_t>* pre = nullptr;
        for (const auto& c : g_.cliques)
            if (c.size() == g_.omega_lb && (!pre || c < *pre)) pre = &c;
        if (pre) {
            uint32_t next = 0;
            for (uint32_t v : *pre) {
                if (!assign(v, next)) return {ExactStatus::Exhausted, std::nullopt};
                ++next;
            }
        }
        bool ok = solve();
        if (timed_out_) return {ExactStatus::Timeout, std::nullopt};
        if (!ok) return {ExactStatus::Exhausted, std::nullopt};
        Coloring col;
        col.assignment = color_;
        col.num_colors = static_cast<uint32_t>(max_used_ + 1);
        col.method = "exact";
        return {ExactStatus::Found, std::move(col)};
    }

  private:
    struct Change {
        uint32_t node;
        uint64_t old_domain;
    };

    bool assign(uint32_t v, uint32_t c) {
        color_[v] = c;
        trail_.push_back({v | 0x80000000u, domain_[v]});
        domain_[v] = uint64_t{1} << c;
        if (static_cast<int64_t>(c) > max_used_) {
            trail_.push_back({0xFFFFFFFFu, static_cast<uint64_t>(max_used_)});
            max_used_ = c;
        }
        for (uint32_t u : g_.adj[v]) {
            if (color_[u] != UINT32_MAX) {
                if (color_[u] == c) return false;
                continue;
            }
            uint64_t bit = uint64_t{1} << c;
            if (domain_[u] & bit) {
                trail_.push_back({u, domain_[u]});
                domain_[u] &= ~bit;
                if (domain_[u] == 0) return false;
            }
        }
        return true;
    }

    // unit propagation over singleton domains plus clique pigeonhole pruning
    bool propagate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t v = 0; v < g_.size(); ++v) {
                if (color_[v] != UINT32_MAX) continue;
                if (domain_[v] == 0) return false;
                if ((domain_[v] & (domain_[v] - 1)) == 0) {
                    uint32_t c = static_cast<uint32_t>(std::countr_zero(domain_[v]));
                    if (!assign(v, c)) return false;
                    changed = true;
                }
            }
            for (const auto& clique : g_.cliques) {
                uint64_t avail = 0;
                uint32_t uncolored = 0;
                for (uint32_t v : clique) {
                    if (color_[v] == UINT32_MAX) {
                        ++uncolored;
                        avail |= domain_[v];
                    }
                }
                if (uncolored > static_cast<uint32_t>(std::popcount(avail))) return false;
            }
        }
        return true;
    }

    bool solve() {
        if (++steps_ % 256 == 0 && std::chrono::steady_clock::now() > deadline_) {
            timed_out_ = true;
            return false;
        }
        size_t mark = trail_.size();
        int64_t saved_max = max_used_;
        if (!propagate()) {
            rewind(mark, saved_max);
            return false;
        }

        // select uncolored node: max saturation, then max degree, then min id
        size_t pick = SIZE_MAX;
        size_t pick_sat = 0;
        for (size_t v = 0; v < g_.size(); ++v) {
            if (color_[v] != UINT32_MAX) continue;
            size_t sat = k_ - static_cast<size_t>(std::popcount(domain_[v]));
            if (pick == SIZE_MAX || sat > pick_sat ||
                (sat == pick_sat && g_.adj[v].size() > g_.adj[pick].size())) {
                pick = v;
                pick_sat = sat;
            }
        }
        if (pick == SIZE_MAX) return true;  // everything colored

        uint64_t allowed = domain_[pick];
        uint32_t cap = static_cast<uint32_t>(std::min<int64_t>(k_ - 1, max_used_ + 1));
        for (uint32_t c = 0; c <= cap; ++c) {
            if (!(allowed & (uint64_t{1} << c))) continue;
            size_t inner = trail_.size();
            int64_t inner_max = max_used_;
            if (assign(pick, c) && solve()) return true;
            if (timed_out_) {
                rewind(mark, saved_max);
                return false;
            }
            rewind(inner, inner_max);
        }
        rewind(mark, saved_max);
        return false;
    }

    void rewind(size_t mark, int64_t saved_max) {
        while (trail_.size() > mark) {
            auto [node, old] = trail_.back();
            trail_.pop_back();
            if (node == 0xFFFFFFFFu) {
                max_used_ = static_cast<int64_t>(old);
            } else if (node & 0x80000000u) {
                uint32_t v = node & 0x7FFFFFFFu;
                color_[v] = UINT32_MAX;
                domain_[v] = old;
            } else {
                domain_[node] = old;
            }
        }
        max_used_ = saved_max;
    }

    const ConflictGraph& g_;
    uint32_t k_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<uint32_t> color_;
    std::vector<uint64_t> domain_;
    std::vector<Change> trail_;
    int64_t max_used_ = -1;
    uint64_t steps_ = 0;
    bool timed_out_ = false;
};

}  // namespace detail

// Searches for a proper coloring with at most k colors. Returns Found with a
// coloring, Exhausted when provably none exists with k colors, or Timeout.
inline ExactResult exact_color(const ConflictGraph& g, uint32_t k, double timeout_seconds) {
    if (k < g.omega_lb) throw std::invalid_argument("k below the clique lower bound");
    if (k > 64) throw std::invalid_argument("exact search supports at most 64 colors");
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_seconds));
    if (g.size() == 0) {
        Coloring c;
        c.num_colors = 0;
        c.method = "exact";
        return {ExactStatus::Found, std::move(c)};
    }
    detail::ExactColorSearch search(g, k, deadline);
    return search.run();
}

// Exact search escalating k from the clique bound while the budget lasts,
// falling back to the best greedy heuristic otherwise.
inline Coloring hybrid_color(const ConflictGraph& g, double timeout_seconds,
                             uint64_t seed = 1) {
    Coloring best_greedy;
    bool have = false;
    for (const auto& h : greedy_heuristics()) {
        Coloring c = greedy_color(g, h, seed);
        if (!have || c.num_colors < best_greedy.num_colors) {
            best_greedy = std::move(c);
            have = true;
        }
    }
    if (g.size() == 0) {
        best_greedy.method = "exact";
        return best_greedy;
    }
    auto deadline =
        std::chrono::steady_clock::now() +
        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(timeout_seconds));
    uint32_t k = g.omega_lb;
    while (k <= best_greedy.num_colors && k <= 64 &&
           std::chrono::steady_clock::now() < deadline) {
        double remaining =
            std::chrono::duration<double>(deadline - std::chrono::steady_clock::now()).count();
        ExactResult res = exact_color(g, k, remaining);
        if (res.status == ExactStatus::Found) return *res.coloring;
        if (res.status == ExactStatus::Timeout) break;
        ++k;  // exhausted: chi > k
    }
    best_greedy.method = "hybrid-fallback";
    return best_greedy;
}

}  // namespace qpredec
