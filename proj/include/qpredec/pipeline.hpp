#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "qpredec/coloring.hpp"
#include "qpredec/conflict_graph.hpp"
#include "qpredec/primitives.hpp"

namespace qpredec {

// Abstract hardware proxy: condition inputs, pipeline registers, unit count.
struct CostEstimate {
    uint64_t and_gate_inputs = 0;
    uint64_t register_bits = 0;
    uint64_t primitive_count = 0;

    bool operator==(const CostEstimate&) const = default;
};

struct PipelineStage {
    PrimitiveClass cls = PrimitiveClass::Unclassified;
    std::vector<uint32_t> primitive_ids;  // ascending

    bool operator==(const PipelineStage&) const = default;
};

struct ClassBuildInfo {
    PrimitiveClass cls = PrimitiveClass::Unclassified;
    uint32_t primitive_count = 0;
    double total_probability = 0.0;
    double avg_probability = 0.0;
    size_t nodes = 0;
    size_t edges = 0;
    uint32_t omega_lb = 0;
    uint32_t colors = 0;
    std::string method;
};

struct Pipeline {
    std::vector<PipelineStage> stages;
    uint32_t depth = 0;  // == stages.size()
    CostEstimate cost;
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::optional<uint32_t> rounds;
    std::string code_name;
    std::string dem_ref;
    std::vector<ClassBuildInfo> classes;  // in priority order

    bool operator==(const Pipeline& o) const {
        return stages == o.stages && depth == o.depth && cost == o.cost &&
               num_detectors == o.num_detectors && num_observables == o.num_observables &&
               rounds == o.rounds && code_name == o.code_name && dem_ref == o.dem_ref;
    }
};

inline CostEstimate estimate_cost(const PrimitiveSet& set, const std::vector<PipelineStage>& stages,
                                  uint32_t num_detectors, uint32_t num_observables) {
    CostEstimate cost;
    cost.register_bits =
        static_cast<uint64_t>(stages.size()) * (num_detectors + num_observables);
    for (const auto& st : stages)
        for (uint32_t id : st.primitive_ids) {
            cost.and_gate_inputs += set.primitives[id].syndrome_set.size();
            cost.primitive_count += 1;
        }
    return cost;
}

struct ClassColoring {
    std::vector<uint32_t> member_ids;  // ascending primitive ids (graph node order)
    ConflictGraph graph;
    Coloring coloring;
};

// Stages are the per-class color groups concatenated in class-priority order.
// Within one class, groups are ordered widest condition first (then by total
// probability, then smallest member id) so that a primitive subsuming another
// one's condition gets the first shot at the syndrome.
inline Pipeline assemble_pipeline(const PrimitiveSet& set,
                                  const std::map<PrimitiveClass, ClassColoring>& colorings,
                                  uint32_t num_detectors, uint32_t num_observables) {
    std::map<PrimitiveClass, uint32_t> present;
    for (const auto& p : set.primitives) present[p.cls]++;
    if (present.size() != colorings.size())
        throw std::invalid_argument("colorings do not cover the present classes");
    for (auto& [cls, cnt] : present)
        if (!colorings.count(cls))
            throw std::invalid_argument(std::string("missing coloring for class ") +
                                        class_name(cls));

    Pipeline pipe;
    pipe.num_detectors = num_detectors;
    pipe.num_observables = num_observables;
    pipe.dem_ref = set.dem_ref;

    for (PrimitiveClass cls : set.class_priorities) {
        const ClassColoring& cc = colorings.at(cls);
        if (cc.member_ids.size() != cc.coloring.assignment.size())
            throw std::invalid_argument("coloring size does not match class member count");
        if (static_cast<uint32_t>(present[cls]) != cc.member_ids.size())
            throw std::invalid_argument("class member list is stale");
        std::vector<std::vector<uint32_t>> groups(cc.coloring.num_colors);
        for (size_t i = 0; i < cc.member_ids.size(); ++i)
            groups[cc.coloring.assignment[i]].push_back(cc.member_ids[i]);
        struct GroupKey {
            size_t max_s;
            double total_p;
            uint32_t min_id;
        };
        std::vector<std::pair<GroupKey, size_t>> keyed;
        for (size_t gidx = 0; gidx < groups.size(); ++gidx) {
            auto& g = groups[gidx];
            std::sort(g.begin(), g.end());
            GroupKey key{0, 0.0, g.empty() ? UINT32_MAX : g.front()};
            for (uint32_t id : g) {
                key.max_s = std::max(key.max_s, set.primitives[id].syndrome_set.size());
                key.total_p += set.primitives[id].probability;
            }
            keyed.push_back({key, gidx});
        }
        std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
            if (a.first.max_s != b.first.max_s) return a.first.max_s > b.first.max_s;
            if (a.first.total_p != b.first.total_p) return a.first.total_p > b.first.total_p;
            return a.first.min_id < b.first.min_id;
        });
        ClassBuildInfo info;
        info.cls = cls;
        info.primitive_count = present[cls];
        for (uint32_t id : cc.member_ids) info.total_probability += set.primitives[id].probability;
        info.avg_probability = info.total_probability / info.primitive_count;
        info.nodes = cc.graph.size();
        info.edges = cc.graph.num_edges;
        info.omega_lb = cc.graph.omega_lb;
        info.colors = cc.coloring.num_colors;
        info.method = cc.coloring.method;
        pipe.classes.push_back(std::move(info));
        for (auto& [key, gidx] : keyed) {
            PipelineStage st;
            st.cls = cls;
            st.primitive_ids = std::move(groups[gidx]);
            pipe.stages.push_back(std::move(st));
        }
    }
    pipe.depth = static_cast<uint32_t>(pipe.stages.size());
    pipe.cost = estimate_cost(set, pipe.stages, num_detectors, num_observables);
    return pipe;
}

// Re-checks the pipeline invariants straight from the syndrome sets, without
// trusting the conflict graphs or colorings that produced it.
inline bool validate_pipeline(const PrimitiveSet& set, const Pipeline& pipe) {
    if (pipe.depth != pipe.stages.size()) return false;
    std::vector<bool> seen(set.primitives.size(), false);
    for (const auto& st : pipe.stages) {
        for (size_t i = 0; i < st.primitive_ids.size(); ++i) {
            uint32_t a = st.primitive_ids[i];
            if (a >= set.primitives.size() || seen[a]) return false;
            seen[a] = true;
            if (set.primitives[a].cls != st.cls) return false;
            for (size_t j = i + 1; j < st.primitive_ids.size(); ++j) {
                uint32_t b = st.primitive_ids[j];
                const auto& sa = set.primitives[a].syndrome_set;
                const auto& sb = set.primitives[b].syndrome_set;
                std::vector<uint32_t> inter;
                std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                      std::back_inserter(inter));
                if (!inter.empty()) return false;
            }
        }
    }
    for (bool b : seen)
        if (!b) return false;
    // class blocks must follow the priority order
    std::vector<PrimitiveClass> block_order;
    for (const auto& st : pipe.stages)
        if (block_order.empty() || block_order.back() != st.cls) block_order.push_back(st.cls);
    std::vector<PrimitiveClass> expected;
    for (PrimitiveClass cls : set.class_priorities) expected.push_back(cls);
    return block_order == expected;
}

inline Pipeline truncate_pipeline(const PrimitiveSet& set, const Pipeline& in,
                                  uint32_t stages_to_remove) {
    if (stages_to_remove >= in.depth && !(stages_to_remove == 0 && in.depth == 0))
        throw std::out_of_range("stages_to_remove must lie in [0, depth)");
    Pipeline out = in;
    out.stages.resize(in.stages.size() - stages_to_remove);
    out.depth = static_cast<uint32_t>(out.stages.size());
    out.cost = estimate_cost(set, out.stages, in.num_detectors, in.num_observables);
    return out;
}

// --------------------------------------------------------------------------
// Serialization. The JSON layout is the interchange format for build
// artifacts; the netlist text is a human-readable stage listing.
// --------------------------------------------------------------------------

inline nlohmann::ordered_json pipeline_to_json(const PrimitiveSet& set, const Pipeline& pipe) {
    nlohmann::ordered_json j;
    j["code"] = pipe.code_name;
    j["dem_hash"] = pipe.dem_ref;
    j["num_detectors"] = pipe.num_detectors;
    j["num_observables"] = pipe.num_observables;
    if (pipe.rounds)
        j["rounds"] = *pipe.rounds;
    else
        j["rounds"] = nullptr;
    nlohmann::ordered_json prio = nlohmann::ordered_json::array();
    for (PrimitiveClass cls : set.class_priorities) prio.push_back(class_name(cls));
    j["class_priorities"] = prio;
    nlohmann::ordered_json classes = nlohmann::ordered_json::array();
    for (const auto& ci : pipe.classes) {
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
    j["depth"] = pipe.depth;
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& st : pipe.stages) {
        nlohmann::ordered_json s;
        s["class"] = class_name(st.cls);
        nlohmann::ordered_json prims = nlohmann::ordered_json::array();
        for (uint32_t id : st.primitive_ids) {
            const Primitive& p = set.primitives[id];
            nlohmann::ordered_json pj;
            pj["id"] = id;
            pj["S"] = p.syndrome_set;
            pj["O"] = p.observable_set;
            pj["p"] = p.probability;
            pj["canonical_round"] = p.canonical_round;
            pj["round_canonical"] = p.round_canonical;
            pj["sources"] = p.source_ids;
            prims.push_back(std::move(pj));
        }
        s["primitives"] = prims;
        stages.push_back(std::move(s));
    }
    j["stages"] = stages;
    j["cost"] = {{"and_gate_inputs", pipe.cost.and_gate_inputs},
                 {"register_bits", pipe.cost.register_bits},
                 {"primitive_count", pipe.cost.primitive_count}};
    return j;
}

struct PipelineArtifact {
    PrimitiveSet set;
    Pipeline pipeline;
};

inline PipelineArtifact pipeline_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PipelineArtifact art;
    art.pipeline.code_name = j.at("code").get<std::string>();
    art.pipeline.dem_ref = j.at("dem_hash").get<std::string>();
    art.set.dem_ref = art.pipeline.dem_ref;
    art.pipeline.num_detectors = j.at("num_detectors").get<uint32_t>();
    art.pipeline.num_observables = j.at("num_observables").get<uint32_t>();
    if (!j.at("rounds").is_null()) art.pipeline.rounds = j.at("rounds").get<uint32_t>();
    for (const auto& name : j.at("class_priorities")) {
        auto cls = class_from_name(name.get<std::string>());
        if (!cls) throw std::invalid_argument("unknown class in artifact");
        art.set.class_priorities.push_back(*cls);
    }
    for (const auto& c : j.at("classes")) {
        ClassBuildInfo ci;
        ci.cls = *class_from_name(c.at("class").get<std::string>());
        ci.primitive_count = c.at("primitives").get<uint32_t>();
        ci.total_probability = c.at("total_p").get<double>();
        ci.avg_probability = c.at("avg_p").get<double>();
        ci.nodes = c.at("nodes").get<size_t>();
        ci.edges = c.at("edges").get<size_t>();
        ci.omega_lb = c.at("omega_lb").get<uint32_t>();
        ci.colors = c.at("colors").get<uint32_t>();
        ci.method = c.at("method").get<std::string>();
        art.pipeline.classes.push_back(std::move(ci));
    }
    size_t num_prims = 0;
    for (const auto& s : j.at("stages")) num_prims += s.at("primitives").size();
    art.set.primitives.resize(num_prims);
    std::vector<bool> seen(num_prims, false);
    for (const auto& s : j.at("stages")) {
        PipelineStage st;
        st.cls = *class_from_name(s.at("class").get<std::string>());
        for (const auto& pj : s.at("primitives")) {
            uint32_t id = pj.at("id").get<uint32_t>();
            if (id >= num_prims) throw std::invalid_argument("primitive id out of range");
            if (seen[id]) throw std::invalid_argument("duplicate primitive id in artifact");
            seen[id] = true;
            Primitive p;
            p.syndrome_set = pj.at("S").get<std::vector<uint32_t>>();
            p.observable_set = pj.at("O").get<std::vector<uint32_t>>();
            p.probability = pj.at("p").get<double>();
            p.canonical_round = pj.at("canonical_round").get<uint32_t>();
            p.round_canonical = pj.at("round_canonical").get<bool>();
            p.source_ids = pj.at("sources").get<std::vector<uint32_t>>();
            p.cls = st.cls;
            art.set.primitives[id] = std::move(p);
            st.primitive_ids.push_back(id);
        }
        art.pipeline.stages.push_back(std::move(st));
    }
    art.pipeline.depth = j.at("depth").get<uint32_t>();
    const auto& cost = j.at("cost");
    art.pipeline.cost.and_gate_inputs = cost.at("and_gate_inputs").get<uint64_t>();
    art.pipeline.cost.register_bits = cost.at("register_bits").get<uint64_t>();
    art.pipeline.cost.primitive_count = cost.at("primitive_count").get<uint64_t>();
    if (art.pipeline.depth != art.pipeline.stages.size())
        throw std::invalid_argument("artifact depth disagrees with stage count");
    return art;
}

// STAGE <i> CLASS <name> headers followed by one PRIM line per primitive:
//   PRIM cond=D0&D1 -> clear(D0,D1) flip(L0)
inline std::string emit_netlist_text(const PrimitiveSet& set, const Pipeline& pipe) {
    std::ostringstream out;
    for (size_t i = 0; i < pipe.stages.size(); ++i) {
        const auto& st = pipe.stages[i];
        out << "STAGE " << i << " CLASS " << class_name(st.cls) << "\n";
        for (uint32_t id : st.primitive_ids) {
            const Primitive& p = set.primitives[id];
            out << "PRIM cond=";
            for (size_t k = 0; k < p.syndrome_set.size(); ++k)
                out << (k ? "&" : "") << "D" << p.syndrome_set[k];
            out << " -> clear(";
            for (size_t k = 0; k < p.syndrome_set.size(); ++k)
                out << (k ? "," : "") << "D" << p.syndrome_set[k];
            out << ") flip(";
            for (size_t k = 0; k < p.observable_set.size(); ++k)
                out << (k ? "," : "") << "L" << p.observable_set[k];
            out << ")\n";
        }
    }
    return out.str();
}

inline std::string emit_pipeline(const PrimitiveSet& set, const Pipeline& pipe,
                                 const std::string& format) {
    if (format == "json") return pipeline_to_json(set, pipe).dump(2) + "\n";
    if (format == "netlist-text") return emit_netlist_text(set, pipe);
    throw std::invalid_argument("unknown emit format: " + format);
}

}  // namespace qpredec
