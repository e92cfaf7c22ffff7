// Command-line front end: build predecoder pipelines from detector error
// models, inspect them, and run the two-arm Monte Carlo evaluation.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpredec/build.hpp"
#include "qpredec/dem.hpp"
#include "qpredec/pipeline.hpp"
#include "qpredec/sim.hpp"

namespace {

using namespace qpredec;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string stem_of(const std::string& path) {
    size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

double default_timeout() {
    if (const char* env = std::getenv("QPREDEC_TIMEOUT")) return std::atof(env);
    return 60.0;
}

struct InputFlags {
    std::string dem_path;
    std::string code_path;
    std::string sector = "Z";
    uint32_t rounds = 0;
    double p_data = 0.0;
    double p_meas = 0.0;
    double p_hook = 0.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--dem", dem_path, "detector error model file");
        cmd->add_option("--code", code_path, "CSS code spec (JSON)");
        cmd->add_option("--sector", sector, "X or Z (with --code)")
            ->check(CLI::IsMember({"X", "Z"}));
        cmd->add_option("--rounds", rounds,
                        "measurement rounds (--code input, or round-major --dem layouts)");
        cmd->add_option("--p-data", p_data, "data error probability per round");
        cmd->add_option("--p-meas", p_meas, "measurement error probability");
        cmd->add_option("--p-hook", p_hook, "hook channel probability");
    }

    bool has_code() const { return !code_path.empty(); }

    // scale != 1 rescales every channel, for physical-error-rate sweeps
    DetectorErrorModel load(double scale = 1.0) const {
        if (dem_path.empty() == code_path.empty())
            throw std::runtime_error("specify exactly one input: --dem or --code");
        if (!dem_path.empty()) {
            if (scale != 1.0)
                throw std::runtime_error("p sweeps require a --code input");
            DetectorErrorModel model = parse_dem(read_file(dem_path));
            if (rounds > 0 && !model.has_full_round_metadata()) {
                // round-major layout assumed: detector t*m + c is check c in round t
                if (model.num_detectors % rounds != 0)
                    throw std::runtime_error(
                        "--rounds does not divide the detector count of the model");
                uint32_t m = model.num_detectors / rounds;
                for (auto& d : model.detectors) {
                    d.coords = std::vector<double>{static_cast<double>(d.index % m),
                                                   static_cast<double>(d.index / m)};
                    d.round = d.index / m;
                }
                model.rounds = rounds;
            }
            return model;
        }
        CssCodeSpec code = parse_code_spec(read_file(code_path));
        NoiseConfig noise;
        noise.p_data = p_data * scale;
        noise.p_meas = p_meas * scale;
        noise.p_hook = p_hook * scale;
        noise.rounds = rounds;
        Sector s = sector == "X" ? Sector::X : Sector::Z;
        return build_phenomenological_dem(code, s, noise);
    }

    std::string name() const {
        return has_code() ? stem_of(code_path) : stem_of(dem_path);
    }
};

FaultSidecar load_sidecar(const std::string& path) {
    FaultSidecar sc;
    nlohmann::json j = nlohmann::json::parse(read_file(path));
    for (auto it = j.begin(); it != j.end(); ++it)
        sc[static_cast<uint32_t>(std::stoul(it.key()))] = it.value().get<std::string>();
    return sc;
}

std::vector<double> parse_double_csv(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(std::stod(part));
    return out;
}

std::vector<uint32_t> parse_uint_csv(const std::string& s) {
    std::vector<uint32_t> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(static_cast<uint32_t>(std::stoul(part)));
    return out;
}

struct DecoderFlags {
    uint32_t bp_iters = 0;
    uint32_t distance = 0;
    uint32_t ns_per_iter = 20;
    bool osd_budget_x10 = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--bp-iters", bp_iters, "BP iteration budget");
        cmd->add_option("--distance", distance, "code distance d (iters = d*1000/ns-per-iter)");
        cmd->add_option("--ns-per-iter", ns_per_iter, "BP iteration time in ns (default 20)");
        cmd->add_flag("--osd-budget-x10", osd_budget_x10, "allocate 10x BP iterations");
    }

    DecoderConfig resolve() const {
        DecoderConfig cfg;
        if (bp_iters > 0 && distance > 0)
            throw std::runtime_error("give either --bp-iters or --distance, not both");
        if (bp_iters > 0) {
            cfg.bp_max_iters = bp_iters;
        } else if (distance > 0) {
            if (ns_per_iter == 0) throw std::runtime_error("--ns-per-iter must be positive");
            cfg.bp_max_iters = distance * 1000u / ns_per_iter;
        } else {
            throw std::runtime_error("specify a BP budget: --bp-iters or --distance");
        }
        if (cfg.bp_max_iters < 1) throw std::runtime_error("BP budget resolves to zero iterations");
        cfg.osd_budget_x10 = osd_budget_x10;
        return cfg;
    }
};

int cmd_build(const InputFlags& input, const std::string& out_path, double timeout,
              uint64_t seed, const std::string& sidecar_path) {
    DetectorErrorModel raw = input.load();
    FaultSidecar sidecar;
    BuildOptions opt;
    opt.timeout_seconds = timeout;
    opt.seed = seed;
    opt.code_name = input.name();
    if (!sidecar_path.empty()) {
        sidecar = load_sidecar(sidecar_path);
        opt.sidecar = &sidecar;
    }
    BuildResult res = build_pipeline(raw, opt);
    write_file(out_path, pipeline_to_json(res.set, res.pipeline).dump(2) + "\n");
    write_file(out_path + ".report.json", build_report_json(res).dump(2) + "\n");
    std::cout << "pipeline: " << out_path << "\n";
    std::cout << "depth: " << res.pipeline.depth << "\n";
    for (const auto& ci : res.pipeline.classes)
        std::cout << "  " << class_name(ci.cls) << ": " << ci.primitive_count << " primitives, "
                  << ci.colors << " stages (" << ci.method << ")\n";
    return 0;
}

PipelineArtifact load_artifact_checked(const std::string& pipeline_path, const
                                       DetectorErrorModel& dem, bool force) {
    PipelineArtifact art = pipeline_from_json(read_file(pipeline_path));
    std::string hash = dem_content_hash(dem);
    if (hash != art.pipeline.dem_ref) {
        if (!force)
            throw std::runtime_error("model hash " + hash + " does not match pipeline artifact " +
                                     art.pipeline.dem_ref + " (use --force to override)");
        std::cerr << "warning: model hash mismatch overridden by --force\n";
    }
    return art;
}

int cmd_simulate(const InputFlags& input, const std::string& pipeline_path, uint64_t shots,
                 uint64_t seed, const DecoderFlags& dec, uint32_t truncate, uint32_t threads,
                 bool force, const std::string& out_base) {
    DetectorErrorModel dem = merge_duplicates(input.load());
    PipelineArtifact art = load_artifact_checked(pipeline_path, dem, force);
    ExperimentConfig cfg;
    cfg.shots = shots;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.decoder = dec.resolve();
    cfg.stages_removed = truncate;
    if (input.has_code()) cfg.p_label = input.p_data;
    Pipeline pipe = truncate_pipeline(art.set, art.pipeline, truncate);
    ExperimentReport report = run_experiment(dem, art.set, pipe, cfg);
    write_file(out_base + ".csv", report_csv_header() + "\n" + report_csv_row(report) + "\n");
    write_file(out_base + ".json", report_to_json(report).dump(2) + "\n");
    std::cout << report_csv_header() << "\n" << report_csv_row(report) << "\n";
    return 0;
}

int cmd_sweep(const InputFlags& input, const std::string& pipeline_path,
              const std::string& p_grid_csv, const std::string& truncate_grid_csv,
              uint64_t shots, uint64_t seed, const DecoderFlags& dec, uint32_t threads,
              double timeout, bool force, const std::string& out_path) {
    std::vector<double> p_grid;
    std::vector<uint32_t> t_grid{0};
    if (!p_grid_csv.empty()) p_grid = parse_double_csv(p_grid_csv);
    if (!truncate_grid_csv.empty()) t_grid = parse_uint_csv(truncate_grid_csv);
    if (p_grid.empty() && truncate_grid_csv.empty())
        throw std::runtime_error("sweep needs --p-grid and/or --truncate-grid");
    if (!p_grid.empty() && !input.has_code())
        throw std::runtime_error("p sweeps require a --code input");
    if (!p_grid.empty() && input.p_data <= 0)
        throw std::runtime_error("p sweeps require --p-data > 0 as the base rate");
    if (!p_grid.empty() && !pipeline_path.empty())
        throw std::runtime_error("p sweeps rebuild pipelines; omit --pipeline");

    ExperimentConfig base;
    base.shots = shots;
    base.seed = seed;
    base.threads = threads;
    base.decoder = dec.resolve();
    if (input.has_code()) base.p_label = input.p_data;

    std::vector<SweepPoint> grid;
    if (p_grid.empty()) {
        for (uint32_t t : t_grid) grid.push_back({std::nullopt, t});
    } else {
        for (double p : p_grid)
            for (uint32_t t : t_grid) grid.push_back({p, t});
    }

    std::map<double, BuildResult> cache;
    BuildResult fixed;
    if (p_grid.empty()) {
        DetectorErrorModel dem = merge_duplicates(input.load());
        PipelineArtifact art = load_artifact_checked(pipeline_path, dem, force);
        fixed.dem = std::move(dem);
        fixed.set = std::move(art.set);
        fixed.pipeline = std::move(art.pipeline);
    }
    auto provider = [&](const SweepPoint& pt) -> const BuildResult& {
        if (!pt.p) return fixed;
        auto it = cache.find(*pt.p);
        if (it == cache.end()) {
            BuildOptions opt;
            opt.timeout_seconds = timeout;
            opt.seed = seed;
            opt.code_name = input.name();
            DetectorErrorModel raw = input.load(*pt.p / input.p_data);
            it = cache.emplace(*pt.p, build_pipeline(raw, opt)).first;
        }
        return it->second;
    };
    std::vector<ExperimentReport> reports = sweep(grid, base, provider);
    std::string csv = reports_to_csv(reports);
    write_file(out_path, csv);
    std::cout << csv;
    return 0;
}

int cmd_analyze(const std::string& pipeline_path, const std::string& out_path) {
    PipelineArtifact art = pipeline_from_json(read_file(pipeline_path));
    std::ostringstream out;
    out << "code: " << art.pipeline.code_name << "\n";
    out << "model hash: " << art.pipeline.dem_ref << "\n";
    out << "primitives: " << art.set.primitives.size() << "\n";
    out << "depth: " << art.pipeline.depth << "\n";
    out << "priority order:";
    for (PrimitiveClass cls : art.set.class_priorities) out << " " << class_name(cls);
    out << "\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-14s %10s %12s %12s %7s %7s %6s %7s %s", "class", "count",
                  "total_p", "avg_p", "nodes", "edges", "omega", "colors", "method");
    out << buf << "\n";
    for (const auto& ci : art.pipeline.classes) {
        std::snprintf(buf, sizeof buf, "%-14s %10u %12.4e %12.4e %7zu %7zu %6u %7u %s",
                      class_name(ci.cls), ci.primitive_count, ci.total_probability,
                      ci.avg_probability, ci.nodes, ci.edges, ci.omega_lb, ci.colors,
                      ci.method.c_str());
        out << buf << "\n";
    }
    out << "cost: and_gate_inputs=" << art.pipeline.cost.and_gate_inputs
        << " register_bits=" << art.pipeline.cost.register_bits
        << " primitive_count=" << art.pipeline.cost.primitive_count << "\n";
    if (!out_path.empty()) write_file(out_path, out.str());
    std::cout << out.str();
    return 0;
}

int cmd_emit(const std::string& pipeline_path, const std::string& format,
             const std::string& out_path) {
    PipelineArtifact art = pipeline_from_json(read_file(pipeline_path));
    std::string text = emit_pipeline(art.set, art.pipeline, format);
    if (!out_path.empty())
        write_file(out_path, text);
    else
        std::cout << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"predecoder pipeline compiler and evaluation harness"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "compile a predecoder pipeline from a model");
    InputFlags build_input;
    build_input.add_to(build);
    std::string build_out = "pipeline.json";
    double timeout = default_timeout();
    uint64_t build_seed = 1;
    std::string sidecar_path;
    build->add_option("-o,--out", build_out, "output artifact path");
    build->add_option("--timeout", timeout, "per-graph exact coloring timeout (seconds)");
    build->add_option("--seed", build_seed, "seed for randomized heuristics");
    build->add_option("--sidecar", sidecar_path, "fault provenance sidecar (JSON)");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run the two-arm memory experiment");
    InputFlags sim_input;
    sim_input.add_to(simulate);
    DecoderFlags sim_dec;
    sim_dec.add_to(simulate);
    std::string sim_pipeline;
    uint64_t sim_shots = 100000, sim_seed = 1;
    uint32_t sim_truncate = 0, sim_threads = 1;
    bool sim_force = false;
    std::string sim_out = "report";
    simulate->add_option("--pipeline", sim_pipeline, "pipeline artifact")->required();
    simulate->add_option("--shots", sim_shots, "number of shots");
    simulate->add_option("--seed", sim_seed, "experiment seed");
    simulate->add_option("--truncate", sim_truncate, "stages removed from the tail");
    simulate->add_option("--threads", sim_threads, "worker threads");
    simulate->add_flag("--force", sim_force, "ignore model hash mismatch");
    simulate->add_option("-o,--out", sim_out, "output base path (.csv/.json)");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of experiments over p and/or truncation");
    InputFlags sweep_input;
    sweep_input.add_to(sweep_cmd);
    DecoderFlags sweep_dec;
    sweep_dec.add_to(sweep_cmd);
    std::string sweep_pipeline, p_grid_csv, truncate_grid_csv;
    uint64_t sweep_shots = 100000, sweep_seed = 1;
    uint32_t sweep_threads = 1;
    double sweep_timeout = default_timeout();
    bool sweep_force = false;
    std::string sweep_out = "sweep.csv";
    sweep_cmd->add_option("--pipeline", sweep_pipeline, "pipeline artifact (truncation sweeps)");
    sweep_cmd->add_option("--p-grid", p_grid_csv, "comma-separated physical error rates");
    sweep_cmd->add_option("--truncate-grid", truncate_grid_csv, "comma-separated stage counts");
    sweep_cmd->add_option("--shots", sweep_shots, "shots per grid point");
    sweep_cmd->add_option("--seed", sweep_seed, "experiment seed (shared across points)");
    sweep_cmd->add_option("--threads", sweep_threads, "worker threads");
    sweep_cmd->add_option("--timeout", sweep_timeout, "build timeout for p sweeps");
    sweep_cmd->add_flag("--force", sweep_force, "ignore model hash mismatch");
    sweep_cmd->add_option("-o,--out", sweep_out, "output CSV path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "print class table and conflict stats");
    std::string analyze_pipeline, analyze_out;
    analyze->add_option("pipeline", analyze_pipeline, "pipeline artifact")->required();
    analyze->add_option("-o,--out", analyze_out, "also write the table to a file");

    // emit
    auto* emit = app.add_subcommand("emit", "emit a hardware description");
    std::string emit_pipeline_path, emit_format = "json", emit_out;
    emit->add_option("--pipeline", emit_pipeline_path, "pipeline artifact")->required();
    emit->add_option("--format", emit_format, "json | netlist-text")
        ->check(CLI::IsMember({"json", "netlist-text"}));
    emit->add_option("-o,--out", emit_out, "output path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed())
            return cmd_build(build_input, build_out, timeout, build_seed, sidecar_path);
        if (simulate->parsed())
            return cmd_simulate(sim_input, sim_pipeline, sim_shots, sim_seed, sim_dec,
                                sim_truncate, sim_threads, sim_force, sim_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_input, sweep_pipeline, p_grid_csv, truncate_grid_csv,
                             sweep_shots, sweep_seed, sweep_dec, sweep_threads, sweep_timeout,
                             sweep_force, sweep_out);
        if (analyze->parsed()) return cmd_analyze(analyze_pipeline, analyze_out);
        if (emit->parsed()) return cmd_emit(emit_pipeline_path, emit_format, emit_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
