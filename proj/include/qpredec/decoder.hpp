#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qpredec/dem.hpp"
#include "qpredec/gf2.hpp"

namespace qpredec {

inline constexpr double kLlrClamp = 30.0;

// Tanner graph of a model: check nodes are detectors, variable nodes are
// mechanisms, priors are log((1-p)/p) clamped to +/-30.
struct TannerGraph {
    uint32_t num_checks = 0;
    uint32_t num_vars = 0;
    uint32_t num_observables = 0;
    std::vector<std::vector<uint32_t>> check_vars;
    std::vector<std::vector<uint32_t>> var_checks;
    std::vector<double> prior_llr;
    std::vector<BitVec> var_observables;  // observable stamp per mechanism

    static TannerGraph from_dem(const DetectorErrorModel& dem) {
        TannerGraph g;
        g.num_checks = dem.num_detectors;
        g.num_vars = static_cast<uint32_t>(dem.mechanisms.size());
        g.num_observables = dem.num_observables;
        g.check_vars.resize(g.num_checks);
        g.var_checks.resize(g.num_vars);
        g.prior_llr.resize(g.num_vars);
        g.var_observables.reserve(g.num_vars);
        for (uint32_t v = 0; v < g.num_vars; ++v) {
            const auto& m = dem.mechanisms[v];
            double llr = std::log((1.0 - m.probability) / m.probability);
            g.prior_llr[v] = std::clamp(llr, -kLlrClamp, kLlrClamp);
            for (uint32_t c : m.detectors) {
                g.check_vars[c].push_back(v);
                g.var_checks[v].push_back(c);
            }
            g.var_observables.push_back(
                bitvec_from(dem.num_observables, {m.observables.begin(), m.observables.end()}));
        }
        return g;
    }

    BitVec syndrome_of(const BitVec& assignment) const {
        BitVec s(num_checks);
        for (uint32_t c = 0; c < num_checks; ++c) {
            int parity = 0;
            for (uint32_t v : check_vars[c]) parity ^= assignment.test(v);
            if (parity) s.set(c);
        }
        return s;
    }

    BitVec observable_flips_of(const BitVec& assignment) const {
        BitVec o(num_observables);
        for (uint32_t v = 0; v < num_vars; ++v)
            if (assignment.test(v)) o ^= var_observables[v];
        return o;
    }
};

struct BpResult {
    bool converged = false;
    uint32_t iterations_used = 0;
    BitVec hard_decision;
    std::vector<double> marginals;  // posterior LLR per variable
};

struct Correction {
    BitVec mechanisms_flagged;
    BitVec observable_flips;
    bool valid = false;
};

// Min-sum belief propagation: flooding schedule, scaling factor 0.9, LLR
// clamp +/-30, ties (LLR exactly 0) decode to 0. Deterministic.
inline BpResult bp_decode(const TannerGraph& g, const BitVec& syndrome, uint32_t max_iters) {
    if (syndrome.size() != g.num_checks)
        throw std::invalid_argument("syndrome length does not match detector count");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
    constexpr double scale = 0.9;

    // messages indexed by (check, slot) aligned with check_vars
    std::vector<std::vector<double>> var_to_check(g.num_checks), check_to_var(g.num_checks);
    for (uint32_t c = 0; c < g.num_checks; ++c) {
        var_to_check[c].resize(g.check_vars[c].size());
        check_to_var[c].resize(g.check_vars[c].size(), 0.0);
        for (size_t i = 0; i < g.check_vars[c].size(); ++i)
            var_to_check[c][i] = g.prior_llr[g.check_vars[c][i]];
    }
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> var_slots(g.num_vars);
    for (uint32_t c = 0; c < g.num_checks; ++c)
        for (size_t i = 0; i < g.check_vars[c].size(); ++i)
            var_slots[g.check_vars[c][i]].push_back({c, static_cast<uint32_t>(i)});

    BpResult res;
    res.hard_decision = BitVec(g.num_vars);
    res.marginals.assign(g.num_vars, 0.0);

    for (uint32_t iter = 1; iter <= max_iters; ++iter) {
        // check-node pass (two-minimum trick)
        for (uint32_t c = 0; c < g.num_checks; ++c) {
            const auto& vars = g.check_vars[c];
            if (vars.empty()) continue;
            int neg = syndrome.test(c) ? 1 : 0;
            double min1 = std::numeric_limits<double>::infinity(), min2 = min1;
            size_t argmin = 0;
            for (size_t i = 0; i < vars.size(); ++i) {
                double m = var_to_check[c][i];
                if (m < 0) ++neg;
                double a = std::fabs(m);
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    argmin = i;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            for (size_t i = 0; i < vars.size(); ++i) {
                double m = var_to_check[c][i];
                int sgn_excl = neg - (m < 0 ? 1 : 0);
                double mag = (i == argmin) ? min2 : min1;
                if (!std::isfinite(mag)) mag = kLlrClamp;  // degree-1 check
                double out = scale * ((sgn_excl % 2) ? -1.0 : 1.0) * mag;
                check_to_var[c][i] = std::clamp(out, -kLlrClamp, kLlrClamp);
            }
        }
        // variable-node pass
        for (uint32_t v = 0; v < g.num_vars; ++v) {
            double total = g.prior_llr[v];
            for (auto [c, i] : var_slots[v]) total += check_to_var[c][i];
            res.marginals[v] = std::clamp(total, -kLlrClamp, kLlrClamp);
            if (total < 0)
                res.hard_decision.set(v);
            else
                res.hard_decision.reset(v);
            for (auto [c, i] : var_slots[v]) {
                double out = total - check_to_var[c][i];
                var_to_check[c][i] = std::clamp(out, -kLlrClamp, kLlrClamp);
            }
        }
        res.iterations_used = iter;
        if (g.syndrome_of(res.hard_decision) == syndrome) {
            res.converged = true;
            return res;
        }
    }
    res.converged = false;
    return res;
}

// OSD order-0: most-likely-error-first column order, Gauss-Jordan over GF(2),
// unique solution supported on the selected information set.
inline Correction osd0_postprocess(const TannerGraph& g, const BitVec& syndrome,
                                   const std::vector<double>& marginals) {
    if (syndrome.size() != g.num_checks || marginals.size() != g.num_vars)
        throw std::invalid_argument("dimension mismatch in osd0_postprocess");

    std::vector<uint32_t> order(g.num_vars);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return marginals[a] < marginals[b]; });

    std::vector<BitVec> rows(g.num_checks, BitVec(g.num_vars));
    std::vector<uint8_t> rhs(g.num_checks, 0);
    for (uint32_t c = 0; c < g.num_checks; ++c) {
        for (uint32_t v : g.check_vars[c]) rows[c].set(v);
        rhs[c] = syndrome.test(c) ? 1 : 0;
    }
    std::vector<uint8_t> row_used(g.num_checks, 0);
    std::vector<std::pair<uint32_t, uint32_t>> pivots;  // (column, row)
    for (uint32_t col : order) {
        uint32_t pivot = UINT32_MAX;
        for (uint32_t r = 0; r < g.num_checks; ++r)
            if (!row_used[r] && rows[r].test(col)) {
                pivot = r;
                break;
            }
        if (pivot == UINT32_MAX) continue;
        row_used[pivot] = 1;
        pivots.emplace_back(col, pivot);
        for (uint32_t r = 0; r < g.num_checks; ++r) {
            if (r == pivot || !rows[r].test(col)) continue;
            rows[r] ^= rows[pivot];
            rhs[r] ^= rhs[pivot];
        }
    }
    Correction corr;
    corr.mechanisms_flagged = BitVec(g.num_vars);
    corr.valid = true;
    for (uint32_t r = 0; r < g.num_checks; ++r)
        if (!row_used[r] && rhs[r]) corr.valid = false;  // syndrome outside column space
    for (auto [col, row] : pivots)
        if (rhs[row]) corr.mechanisms_flagged.set(col);
    corr.observable_flips = g.observable_flips_of(corr.mechanisms_flagged);
    return corr;
}

// BP first; OSD-0 on the final marginals when BP fails to converge.
inline std::pair<Correction, bool> bposd_decode(const TannerGraph& g, const BitVec& syndrome,
                                                uint32_t max_iters) {
    BpResult bp = bp_decode(g, syndrome, max_iters);
    if (bp.converged) {
        Correction corr;
        corr.mechanisms_flagged = bp.hard_decision;
        corr.observable_flips = g.observable_flips_of(bp.hard_decision);
        corr.valid = true;
        return {std::move(corr), false};
    }
    return {osd0_postprocess(g, syndrome, bp.marginals), true};
}

inline constexpr uint32_t kMleMechanismCap = 24;

// Exhaustive maximum-likelihood oracle over all mechanism subsets. Among
// equal-probability optima the lexicographically smallest flagged index set
// wins. Desk-scale only (hard cap on mechanism count).
inline Correction mle_brute_force(const DetectorErrorModel& dem, const BitVec& syndrome) {
    uint32_t n = static_cast<uint32_t>(dem.mechanisms.size());
    if (n > kMleMechanismCap)
        throw std::invalid_argument("mle_brute_force supports at most 24 mechanisms");
    if (syndrome.size() != dem.num_detectors)
        throw std::invalid_argument("syndrome length does not match detector count");

    std::vector<BitVec> det_stamp;
    std::vector<BitVec> obs_stamp;
    std::vector<double> weight(n);  // log(p / (1-p)), added when flagged
    for (uint32_t v = 0; v < n; ++v) {
        const auto& m = dem.mechanisms[v];
        det_stamp.push_back(bitvec_from(dem.num_detectors, {m.detectors.begin(), m.detectors.end()}));
        obs_stamp.push_back(
            bitvec_from(dem.num_observables, {m.observables.begin(), m.observables.end()}));
        weight[v] = std::log(m.probability / (1.0 - m.probability));
    }

    bool found = false;
    double best_logw = 0.0;
    uint64_t best_mask = 0;
    constexpr double tie_eps = 1e-12;
    auto flagged_indices = [](uint64_t mask) {
        std::vector<uint32_t> idx;
        for (uint32_t v = 0; v < 64; ++v)
            if (mask & (uint64_t{1} << v)) idx.push_back(v);
        return idx;
    };
    BitVec acc(dem.num_detectors);
    for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
        acc.clear();
        double logw = 0.0;
        for (uint64_t bits = mask; bits;) {
            uint32_t v = static_cast<uint32_t>(std::countr_zero(bits));
            bits &= bits - 1;
            acc ^= det_stamp[v];
            logw += weight[v];
        }
        if (!(acc == syndrome)) continue;
        if (!found || logw > best_logw + tie_eps) {
            found = true;
            best_logw = logw;
            best_mask = mask;
        } else if (std::fabs(logw - best_logw) <= tie_eps &&
                   flagged_indices(mask) < flagged_indices(best_mask)) {
            best_mask = mask;
        }
    }
    Correction corr;
    corr.mechanisms_flagged = BitVec(n);
    corr.observable_flips = BitVec(dem.num_observables);
    corr.valid = found;
    if (found)
        for (uint32_t v : flagged_indices(best_mask)) {
            corr.mechanisms_flagged.set(v);
            corr.observable_flips ^= obs_stamp[v];
        }
    return corr;
}

}  // namespace qpredec
