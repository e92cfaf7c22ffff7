#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpredec/coloring.hpp"
#include "qpredec/conflict_graph.hpp"
#include "qpredec/dem.hpp"
#include "qpredec/pipeline.hpp"
#include "qpredec/primitives.hpp"

namespace qpredec {

struct BuildOptions {
    double timeout_seconds = 60.0;
    uint64_t seed = 1;
    const FaultSidecar* sidecar = nullptr;
    std::string code_name = "model";
    CompositePruneOptions composite;
};

struct BuildResult {
    DetectorErrorModel dem;  // normalized source model
    PrimitiveSet set;        // pruned, classified, ranked
    Pipeline pipeline;
    std::map<PrimitiveClass, ClassColoring> colorings;
};

// merge -> generate -> round prune -> composite prune -> classify -> rank ->
// per-class hybrid coloring -> stage assembly.
inline BuildResult build_pipeline(const DetectorErrorModel& raw, const BuildOptions& opt = {}) {
    BuildResult res;
    res.dem = merge_duplicates(raw);
    if (res.dem.mechanisms.empty())
        throw std::invalid_argument("model contains no error mechanisms");
    PrimitiveSet generated = generate_primitives(res.dem);
    PrimitiveSet rounds_pruned = prune_round_offsets(generated, res.dem);
    PrimitiveSet pruned = prune_composites(rounds_pruned, res.dem.num_detectors,
                                           res.dem.num_observables, opt.composite);
    res.set = classify(pruned, res.dem, opt.sidecar);
    res.set.class_priorities = rank_classes(res.set);

    std::map<PrimitiveClass, std::vector<uint32_t>> members;
    for (uint32_t i = 0; i < res.set.primitives.size(); ++i)
        members[res.set.primitives[i].cls].push_back(i);
    for (auto& [cls, ids] : members) {
        ClassColoring cc;
        cc.member_ids = ids;
        cc.graph = build_conflict_graph(res.set, ids, res.dem.num_detectors);
        cc.coloring = hybrid_color(cc.graph, opt.timeout_seconds, opt.seed);
        res.colorings.emplace(cls, std::move(cc));
    }
    res.pipeline = assemble_pipeline(res.set, res.colorings, res.dem.num_detectors,
                                     res.dem.num_observables);
    res.pipeline.code_name = opt.code_name;
    res.pipeline.rounds = res.dem.rounds;
    return res;
}

inline nlohmann::ordered_json build_report_json(const BuildResult& res) {
    nlohmann::ordered_json j;
    const PrimitiveSet& s = res.set;
    j["mechanisms"] = res.dem.mechanisms.size();
    j["generated"] = s.generated_count;
    j["round_pruned"] = s.round_pruned;
    j["composite_pruned"] = s.composite_pruned;
    j["retained"] = s.primitives.size();
    j["round_prune_skipped"] = s.round_prune_skipped;
    j["composite_skipped"] = s.composite_skipped;
    j["composite_ambiguous"] = s.composite_ambiguous;
    j["flagged_multiround"] = s.flagged_wide;
    nlohmann::ordered_json prio = nlohmann::ordered_json::array();
    for (PrimitiveClass cls : s.class_priorities) prio.push_back(class_name(cls));
    j["class_priorities"] = prio;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& ci : res.pipeline.classes) {
        nlohmann::ordered_json c;
        c["class"] = class_name(ci.cls);
        c["primitives"] = ci.primitive_count;
        c["total_p"] = ci.total_probability;
        c["avg_p"] = ci.avg_probability;
        c["nodes"] = ci.nodes;
        c["edges"] = ci.edges;
        c["omega_lb"] = ci.omega_lb;
        c["colors"] = ci.colors;
        c["method"] = ci.method;
        classes.push_back(std::move(c));
    }
    j["classes"] = classes;
    j["depth"] = res.pipeline.depth;
    j["cost"] = {{"and_gate_inputs", res.pipeline.cost.and_gate_inputs},
                 {"register_bits", res.pipeline.cost.register_bits},
                 {"primitive_count", res.pipeline.cost.primitive_count}};
    return j;
}

}  // namespace qpredec
