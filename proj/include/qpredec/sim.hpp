#pragma once

#include <cmath>
#include <limits>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "qpredec/decoder.hpp"
#include "qpredec/dem.hpp"
#include "qpredec/pipeline.hpp"
#include "qpredec/primitives.hpp"
#include "qpredec/rng.hpp"

namespace qpredec {

struct Shot {
    BitVec fired_mechanisms;
    BitVec syndrome;
    BitVec true_observable_flips;
};

// Per-mechanism stamps cached for fast sampling.
class ShotSampler {
  public:
    explicit ShotSampler(const DetectorErrorModel& dem)
        : num_detectors_(dem.num_detectors), num_observables_(dem.num_observables) {
        for (const auto& m : dem.mechanisms) {
            prob_.push_back(m.probability);
            det_.push_back(bitvec_from(num_detectors_, {m.detectors.begin(), m.detectors.end()}));
            obs_.push_back(
                bitvec_from(num_observables_, {m.observables.begin(), m.observables.end()}));
        }
    }

    Shot sample(uint64_t seed, uint64_t shot_index) const {
        SplitMix64 rng = shot_stream(seed, shot_index);
        Shot s;
        s.fired_mechanisms = BitVec(prob_.size());
        s.syndrome = BitVec(num_detectors_);
        s.true_observable_flips = BitVec(num_observables_);
        for (size_t i = 0; i < prob_.size(); ++i) {
            if (rng.next_double() < prob_[i]) {
                s.fired_mechanisms.set(i);
                s.syndrome ^= det_[i];
                s.true_observable_flips ^= obs_[i];
            }
        }
        return s;
    }

  private:
    uint32_t num_detectors_;
    uint32_t num_observables_;
    std::vector<double> prob_;
    std::vector<BitVec> det_, obs_;
};

inline Shot sample_shot(const DetectorErrorModel& dem, uint64_t seed, uint64_t shot_index) {
    return ShotSampler(dem).sample(seed, shot_index);
}

struct PredecodeOutcome {
    BitVec residual_syndrome;
    BitVec predicted_observable_flips;
    bool fully_resolved = false;
    std::vector<uint32_t> fired_primitive_ids;
    std::vector<uint32_t> per_stage_fire_counts;
};

// Executes the staged predecoder. Round-canonical primitives are applied at
// every round offset where all shifted detectors exist; stage membership is
// shared by all offsets. Within a stage every condition is evaluated against
// the stage-entry syndrome, except that overlapping offsets of the same
// primitive resolve lowest offset first.
class PipelineExecutor {
  public:
    PipelineExecutor(const PrimitiveSet& set, const Pipeline& pipe,
                     const DetectorErrorModel& dem)
        : num_detectors_(dem.num_detectors), num_observables_(dem.num_observables) {
        if (pipe.num_detectors != dem.num_detectors ||
            pipe.num_observables != dem.num_observables)
            throw std::invalid_argument("pipeline and model dimensions disagree");
        RoundLayout layout(dem);
        stages_.resize(pipe.stages.size());
        for (size_t si = 0; si < pipe.stages.size(); ++si) {
            for (uint32_t id : pipe.stages[si].primitive_ids) {
                const Primitive& p = set.primitives[id];
                Group grp;
                grp.primitive_id = id;
                grp.obs = bitvec_from(num_observables_,
                                      {p.observable_set.begin(), p.observable_set.end()});
                if (p.round_canonical && layout.available()) {
                    std::vector<std::pair<uint32_t, uint32_t>> rel;  // (spatial, relative round)
                    uint32_t base = layout.round(p.syndrome_set[0]);
                    for (uint32_t d : p.syndrome_set) base = std::min(base, layout.round(d));
                    for (uint32_t d : p.syndrome_set)
                        rel.emplace_back(layout.spatial(d), layout.round(d) - base);
                    for (uint32_t b = 0; b < layout.num_rounds(); ++b) {
                        BitVec mask(num_detectors_);
                        bool ok = true;
                        for (auto [sp, rr] : rel) {
                            auto det = layout.detector_at(sp, rr + b);
                            if (!det) {
                                ok = false;
                                break;
                            }
                            mask.set(*det);
                        }
                        if (ok) grp.instances.push_back(std::move(mask));
                    }
                } else {
                    grp.instances.push_back(bitvec_from(
                        num_detectors_, {p.syndrome_set.begin(), p.syndrome_set.end()}));
                }
                stages_[si].push_back(std::move(grp));
            }
        }
    }

    PredecodeOutcome run(const BitVec& syndrome) const {
        if (syndrome.size() != num_detectors_)
            throw std::invalid_argument("syndrome length does not match the model");
        PredecodeOutcome out;
        BitVec state = syndrome;
        out.predicted_observable_flips = BitVec(num_observables_);
        out.per_stage_fire_counts.reserve(stages_.size());
        BitVec cleared(num_detectors_), consumed(num_detectors_);
        for (const auto& stage : stages_) {
            cleared.clear();
            uint32_t fires = 0;
            for (const auto& grp : stage) {
                bool track_consumed = grp.instances.size() > 1;
                if (track_consumed) consumed.clear();
                for (const auto& mask : grp.instances) {
                    if (!state.contains(mask)) continue;
                    if (track_consumed && consumed.intersects(mask)) continue;
                    if (track_consumed) consumed |= mask;
                    cleared |= mask;
                    out.predicted_observable_flips ^= grp.obs;
                    out.fired_primitive_ids.push_back(grp.primitive_id);
                    ++fires;
                }
            }
            state.and_not(cleared);
            out.per_stage_fire_counts.push_back(fires);
        }
        out.residual_syndrome = state;
        out.fully_resolved = state.none();
        return out;
    }

  private:
    struct Group {
        uint32_t primitive_id = 0;
        std::vector<BitVec> instances;  // ascending base round
        BitVec obs;
    };
    uint32_t num_detectors_;
    uint32_t num_observables_;
    std::vector<std::vector<Group>> stages_;
};

inline PredecodeOutcome run_predecoder(const PrimitiveSet& set, const Pipeline& pipe,
                                       const DetectorErrorModel& dem, const BitVec& syndrome) {
    return PipelineExecutor(set, pipe, dem).run(syndrome);
}

// 95% Wilson score interval.
inline std::pair<double, double> wilson_interval(uint64_t k, uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    double phat = static_cast<double>(k) / static_cast<double>(n);
    double denom = 1.0 + z * z / static_cast<double>(n);
    double center = (phat + z * z / (2.0 * static_cast<double>(n))) / denom;
    double half = z *
                  std::sqrt(phat * (1.0 - phat) / static_cast<double>(n) +
                            z * z / (4.0 * static_cast<double>(n) * static_cast<double>(n))) /
                  denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct DecoderConfig {
    uint32_t bp_max_iters = 50;
    bool osd_budget_x10 = false;

    uint32_t effective_iters() const { return osd_budget_x10 ? bp_max_iters * 10 : bp_max_iters; }
};

struct ExperimentConfig {
    uint64_t shots = 0;
    uint64_t seed = 0;
    uint32_t threads = 1;
    DecoderConfig decoder;
    std::optional<double> p_label;  // echoed into reports
    uint32_t stages_removed = 0;
};

struct ExperimentReport {
    uint64_t shots = 0;
    uint64_t nonzero_syndrome_shots = 0;
    uint64_t resolved_nonzero = 0;
    double coverage = 1.0;
    double utilization_reduction = std::numeric_limits<double>::infinity();
    uint64_t hier_errors = 0;
    uint64_t l2_errors = 0;
    double ler_hierarchy = 0.0;
    double ler_l2_only = 0.0;
    double ler_hier_ci95 = 0.0;  // Wilson half-widths
    double ler_l2_ci95 = 0.0;
    uint64_t bp_nonconverged = 0;
    uint64_t resolved_among_bp_fail = 0;
    double osd_reduction = std::numeric_limits<double>::quiet_NaN();
    uint64_t seed = 0;
    uint32_t depth = 0;
    uint32_t stages_removed = 0;
    std::optional<double> p_label;
    uint32_t bp_max_iters = 0;
    bool osd_budget_x10 = false;
    std::vector<uint64_t> per_observable_errors;  // hierarchy arm, per bit
};

// Runs the two-arm memory experiment: the hierarchy arm resolves what it can
// with the predecoder and defers the rest, unmodified, to BP+OSD; the
// comparison arm always decodes with BP+OSD. Both arms see identical shots.
inline ExperimentReport run_experiment(const DetectorErrorModel& dem, const PrimitiveSet& set,
                                       const Pipeline& pipe, const ExperimentConfig& cfg) {
    if (cfg.shots == 0) throw std::invalid_argument("shots must be >= 1");
    ShotSampler sampler(dem);
    PipelineExecutor exec(set, pipe, dem);
    TannerGraph tanner = TannerGraph::from_dem(dem);
    const uint32_t iters = cfg.decoder.effective_iters();

    struct Local {
        uint64_t nonzero = 0, resolved = 0, hier_err = 0, l2_err = 0;
        uint64_t bp_fail = 0, resolved_among_fail = 0;
        std::vector<uint64_t> per_obs;
    };
    uint32_t threads = std::max<uint32_t>(1, cfg.threads);
    std::vector<Local> locals(threads);
    for (auto& l : locals) l.per_obs.assign(dem.num_observables, 0);

    auto work = [&](uint32_t tid, uint64_t begin, uint64_t end) {
        Local& l = locals[tid];
        for (uint64_t i = begin; i < end; ++i) {
            Shot shot = sampler.sample(cfg.seed, i);
            if (shot.syndrome.none()) {
                if (shot.true_observable_flips.any()) {
                    ++l.hier_err;
                    ++l.l2_err;
                    for (uint32_t b = 0; b < dem.num_observables; ++b)
                        if (shot.true_observable_flips.test(b)) ++l.per_obs[b];
                }
                continue;
            }
            ++l.nonzero;
            PredecodeOutcome outcome = exec.run(shot.syndrome);
            auto [l2corr, used_osd] = bposd_decode(tanner, shot.syndrome, iters);
            const BitVec& hier_pred = outcome.fully_resolved
                                          ? outcome.predicted_observable_flips
                                          : l2corr.observable_flips;
            if (outcome.fully_resolved) ++l.resolved;
            if (!(hier_pred == shot.true_observable_flips)) {
                ++l.hier_err;
                for (uint32_t b = 0; b < dem.num_observables; ++b)
                    if (hier_pred.test(b) != shot.true_observable_flips.test(b)) ++l.per_obs[b];
            }
            if (!(l2corr.observable_flips == shot.true_observable_flips)) ++l.l2_err;
            if (used_osd) {
                ++l.bp_fail;
                if (outcome.fully_resolved) ++l.resolved_among_fail;
            }
        }
    };

    if (threads == 1) {
        work(0, 0, cfg.shots);
    } else {
        std::vector<std::thread> pool;
        uint64_t per = (cfg.shots + threads - 1) / threads;
        for (uint32_t t = 0; t < threads; ++t) {
            uint64_t b = std::min<uint64_t>(cfg.shots, t * per);
            uint64_t e = std::min<uint64_t>(cfg.shots, b + per);
            pool.emplace_back(work, t, b, e);
        }
        for (auto& th : pool) th.join();
    }

    ExperimentReport r;
    r.shots = cfg.shots;
    r.per_observable_errors.assign(dem.num_observables, 0);
    for (const auto& l : locals) {
        r.nonzero_syndrome_shots += l.nonzero;
        r.resolved_nonzero += l.resolved;
        r.hier_errors += l.hier_err;
        r.l2_errors += l.l2_err;
        r.bp_nonconverged += l.bp_fail;
        r.resolved_among_bp_fail += l.resolved_among_fail;
        for (uint32_t b = 0; b < dem.num_observables; ++b)
            r.per_observable_errors[b] += l.per_obs[b];
    }
    r.coverage = r.nonzero_syndrome_shots == 0
                     ? 1.0
                     : static_cast<double>(r.resolved_nonzero) /
                           static_cast<double>(r.nonzero_syndrome_shots);
    r.utilization_reduction = r.coverage < 1.0 ? 1.0 / (1.0 - r.coverage)
                                               : std::numeric_limits<double>::infinity();
    r.ler_hierarchy = static_cast<double>(r.hier_errors) / static_cast<double>(r.shots);
    r.ler_l2_only = static_cast<double>(r.l2_errors) / static_cast<double>(r.shots);
    auto [hlo, hhi] = wilson_interval(r.hier_errors, r.shots);
    auto [llo, lhi] = wilson_interval(r.l2_errors, r.shots);
    r.ler_hier_ci95 = (hhi - hlo) / 2.0;
    r.ler_l2_ci95 = (lhi - llo) / 2.0;
    if (r.bp_nonconverged > 0)
        r.osd_reduction = static_cast<double>(r.resolved_among_bp_fail) /
                          static_cast<double>(r.bp_nonconverged);
    r.seed = cfg.seed;
    r.depth = pipe.depth;
    r.stages_removed = cfg.stages_removed;
    r.p_label = cfg.p_label;
    r.bp_max_iters = cfg.decoder.bp_max_iters;
    r.osd_budget_x10 = cfg.decoder.osd_budget_x10;
    return r;
}

// --------------------------------------------------------------------------
// Report output. CSV header is part of the interchange contract.
// --------------------------------------------------------------------------

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::string report_csv_header() {
    return "p,shots,coverage,util_reduction,ler_hier,ler_l2,ler_hier_ci95,ler_l2_ci95,"
           "bp_fail,osd_reduction,depth,stages_removed,seed";
}

inline std::string report_csv_row(const ExperimentReport& r) {
    std::ostringstream out;
    out << (r.p_label ? format_real(*r.p_label) : "nan") << ',' << r.shots << ','
        << format_real(r.coverage) << ',' << format_real(r.utilization_reduction) << ','
        << format_real(r.ler_hierarchy) << ',' << format_real(r.ler_l2_only) << ','
        << format_real(r.ler_hier_ci95) << ',' << format_real(r.ler_l2_ci95) << ','
        << r.bp_nonconverged << ',' << format_real(r.osd_reduction) << ',' << r.depth << ','
        << r.stages_removed << ',' << r.seed;
    return out.str();
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& r) {
    nlohmann::ordered_json j;
    if (r.p_label)
        j["p"] = *r.p_label;
    else
        j["p"] = nullptr;
    j["shots"] = r.shots;
    j["nonzero_syndrome_shots"] = r.nonzero_syndrome_shots;
    j["resolved_nonzero"] = r.resolved_nonzero;
    j["coverage"] = r.coverage;
    // coverage denominator: shots with a non-trivial syndrome
    j["util_reduction"] = std::isfinite(r.utilization_reduction)
                              ? nlohmann::ordered_json(r.utilization_reduction)
                              : nlohmann::ordered_json("inf");
    j["ler_hier"] = r.ler_hierarchy;
    j["ler_l2"] = r.ler_l2_only;
    j["ler_hier_ci95"] = r.ler_hier_ci95;
    j["ler_l2_ci95"] = r.ler_l2_ci95;
    j["hier_errors"] = r.hier_errors;
    j["l2_errors"] = r.l2_errors;
    j["bp_fail"] = r.bp_nonconverged;
    j["resolved_among_bp_fail"] = r.resolved_among_bp_fail;
    j["osd_reduction"] = std::isnan(r.osd_reduction)
                             ? nlohmann::ordered_json(nullptr)
                             : nlohmann::ordered_json(r.osd_reduction);
    j["depth"] = r.depth;
    j["stages_removed"] = r.stages_removed;
    j["seed"] = r.seed;
    j["bp_max_iters"] = r.bp_max_iters;
    j["osd_budget_x10"] = r.osd_budget_x10;
    j["per_observable_errors"] = r.per_observable_errors;
    return j;
}

struct SweepPoint {
    std::optional<double> p;  // absent: reuse the base model
    uint32_t stages_removed = 0;
};

// One experiment per grid point. Every point reuses the same base seed, so
// points that share a model also share identical per-shot streams; with a
// common stream, mechanism firings are monotone in p and truncation points
// replay the exact same shots.
template <typename ModelProvider>
std::vector<ExperimentReport> sweep(const std::vector<SweepPoint>& grid,
                                    const ExperimentConfig& base, ModelProvider&& provider) {
    if (grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
    std::vector<ExperimentReport> out;
    for (const auto& point : grid) {
        const auto& prepared = provider(point);  // {dem, set, pipeline}
        const DetectorErrorModel& dem = prepared.dem;
        const PrimitiveSet& set = prepared.set;
        const Pipeline& full = prepared.pipeline;
        if (point.stages_removed >= full.depth && full.depth > 0)
            throw std::invalid_argument("sweep truncation exceeds pipeline depth");
        Pipeline truncated = truncate_pipeline(set, full, point.stages_removed);
        ExperimentConfig cfg = base;
        cfg.stages_removed = point.stages_removed;
        if (point.p) cfg.p_label = point.p;
        out.push_back(run_experiment(dem, set, truncated, cfg));
    }
    return out;
}

inline std::string reports_to_csv(const std::vector<ExperimentReport>& reports) {
    std::ostringstream out;
    out << report_csv_header() << "\n";
    for (const auto& r : reports) out << report_csv_row(r) << "\n";
    return out.str();
}

}  // namespace qpredec
