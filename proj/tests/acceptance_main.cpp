// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.
// argv[1]: path to the CLI binary (for the end-to-end determinism check).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qpredec/build.hpp"
#include "qpredec/coloring.hpp"
#include "qpredec/dem.hpp"
#include "qpredec/pipeline.hpp"
#include "qpredec/rng.hpp"
#include "qpredec/sim.hpp"

using namespace qpredec;

namespace {

std::string g_cli_path;
int g_failures = 0;

void run_criterion(int id, const std::string& name, double budget_seconds,
                   const std::function<std::pair<bool, std::string>()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        auto [p, d] = body();
        pass = p;
        detail = d;
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_seconds > 0 && secs > budget_seconds) {
        pass = false;
        detail += " [over the runtime budget]";
    }
    std::printf("[%s] criterion %2d: %s (%.1fs) %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                secs, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

CssCodeSpec load_code(const std::string& name) {
    return parse_code_spec(test_helpers::read_file(test_helpers::fixture_path(name)));
}

BuildResult build_code(const CssCodeSpec& code, const NoiseConfig& noise,
                       const std::string& name, double timeout = 30.0) {
    auto raw = build_phenomenological_dem(code, Sector::Z, noise);
    BuildOptions opt;
    opt.code_name = name;
    opt.timeout_seconds = timeout;
    return build_pipeline(raw, opt);
}

BuildResult build_dem_fixture(const std::string& file, double timeout = 60.0) {
    auto raw = parse_dem(test_helpers::read_file(test_helpers::fixture_path(file)));
    BuildOptions opt;
    opt.code_name = file;
    opt.timeout_seconds = timeout;
    return build_pipeline(raw, opt);
}

NoiseConfig steane_noise(double p_data) { return {p_data, p_data / 5.0, 0.0, 3}; }
NoiseConfig rep_noise(double p_data) { return {p_data, p_data / 5.0, 0.0, 3}; }

bool intervals_overlap(std::pair<double, double> a, std::pair<double, double> b) {
    return a.first <= b.second && b.first <= a.second;
}

// ---------------------------------------------------------------------------

std::pair<bool, std::string> criterion_single_error_completeness() {
    std::ostringstream detail;
    bool ok = true;
    struct Case {
        const char* file;
        NoiseConfig noise;
    } cases[] = {
        {"rep3.json", rep_noise(1e-3)},
        {"steane.json", steane_noise(1e-3)},
    };
    for (const auto& c : cases) {
        auto res = build_code(load_code(c.file), c.noise, c.file);
        PipelineExecutor exec(res.set, res.pipeline, res.dem);
        size_t bad = 0;
        for (const auto& m : res.dem.mechanisms) {
            BitVec s =
                bitvec_from(res.dem.num_detectors, {m.detectors.begin(), m.detectors.end()});
            BitVec want = bitvec_from(res.dem.num_observables,
                                      {m.observables.begin(), m.observables.end()});
            auto out = exec.run(s);
            if (!out.fully_resolved || !(out.predicted_observable_flips == want)) ++bad;
        }
        detail << c.file << " " << (res.dem.mechanisms.size() - bad) << "/"
               << res.dem.mechanisms.size() << " ";
        if (bad) ok = false;
    }
    return {ok, detail.str()};
}

ConflictGraph graph_from_edges(size_t n,
                               const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    PrimitiveSet set;
    std::vector<std::vector<uint32_t>> syndromes(n);
    uint32_t det = 0;
    for (auto [a, b] : edges) {
        syndromes[a].push_back(det);
        syndromes[b].push_back(det);
        ++det;
    }
    for (auto& s : syndromes)
        if (s.empty()) s.push_back(det++);
    for (size_t v = 0; v < n; ++v) {
        Primitive p;
        p.syndrome_set = syndromes[v];
        std::sort(p.syndrome_set.begin(), p.syndrome_set.end());
        p.probability = 0.01;
        set.primitives.push_back(std::move(p));
    }
    std::vector<uint32_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0u);
    return build_conflict_graph(set, ids, det);
}

std::pair<bool, std::string> criterion_coloring_oracle() {
    size_t agreed = 0, total = 0;
    for (uint64_t seed = 0; seed < 50; ++seed) {
        size_t n = 4 + seed % 9;
        double p = 0.2 + 0.1 * (seed % 6);
        SplitMix64 rng(4000 + seed);
        std::vector<std::pair<uint32_t, uint32_t>> edges;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = i + 1; j < n; ++j)
                if (rng.next_double() < p) edges.push_back({i, j});
        auto g = graph_from_edges(n, edges);
        uint32_t chi = test_helpers::oracle_chromatic_number(g.adj);
        ++total;
        auto found = exact_color(g, chi, 60.0);
        bool case_ok = found.status == ExactStatus::Found &&
                       found.coloring->num_colors == chi &&
                       validate_coloring(g, *found.coloring);
        if (chi > g.omega_lb) {
            auto below = exact_color(g, chi - 1, 60.0);
            case_ok = case_ok && below.status == ExactStatus::Exhausted;
        }
        if (case_ok) ++agreed;
    }
    std::ostringstream detail;
    detail << agreed << "/" << total << " verdicts agree with brute force";
    return {agreed == total, detail.str()};
}

std::pair<bool, std::string> criterion_hybrid_dominance() {
    std::vector<BuildResult> builds;
    builds.push_back(build_code(load_code("rep3.json"), rep_noise(1e-3), "rep3"));
    builds.push_back(build_code(load_code("steane.json"), steane_noise(1e-3), "steane"));
    builds.push_back(build_code(load_code("steane.json"), {1e-3, 2e-4, 1e-4, 3}, "steane+hook"));
    builds.push_back(build_dem_fixture("surface_d3_nz_si1000_p0.001.dem"));
    builds.push_back(build_dem_fixture("surface_d5_nz_si1000_p0.001.dem"));
    builds.push_back(build_code(load_code("bb72.json"), {1e-3, 2e-4, 0.0, 2}, "bb72", 10.0));
    size_t graphs = 0;
    bool ok = true;
    for (const auto& res : builds) {
        for (const auto& [cls, cc] : res.colorings) {
            ++graphs;
            if (!validate_coloring(cc.graph, cc.coloring)) ok = false;
            for (const auto& h : greedy_heuristics()) {
                Coloring g = greedy_color(cc.graph, h, 1);
                if (!validate_coloring(cc.graph, g)) ok = false;
                if (cc.coloring.num_colors > g.num_colors) ok = false;
            }
        }
    }
    std::ostringstream detail;
    detail << graphs << " conflict graphs checked over " << builds.size() << " fixtures";
    return {ok, detail.str()};
}

std::pair<bool, std::string> criterion_depth_targets() {
    std::ostringstream detail;
    bool ok = true;
    for (const char* file :
         {"surface_d3_nz_si1000_p0.001.dem", "surface_d5_nz_si1000_p0.001.dem"}) {
        auto res = build_dem_fixture(file);
        uint32_t omega_sum = 0;
        for (const auto& ci : res.pipeline.classes) omega_sum += ci.omega_lb;
        bool in_range = res.pipeline.depth >= omega_sum && res.pipeline.depth <= 12;
        detail << file << " depth=" << res.pipeline.depth << " (omega sum " << omega_sum
               << ", target 9) ";
        if (!in_range) {
            ok = false;
            detail << "OUT OF RANGE; per-class:";
            for (const auto& ci : res.pipeline.classes)
                detail << " " << class_name(ci.cls) << "=" << ci.colors << "(w" << ci.omega_lb
                       << ")";
        }
    }
    return {ok, detail.str()};
}

std::pair<bool, std::string> criterion_ler_parity() {
    std::ostringstream detail;
    bool ok = true;
    struct Case {
        const char* file;
        double p;
    } cases[] = {{"rep3.json", 1e-3}, {"rep3.json", 3e-3}, {"steane.json", 1e-3},
                 {"steane.json", 3e-3}};
    for (const auto& c : cases) {
        auto res = build_code(load_code(c.file), {c.p, c.p / 5.0, 0.0, 3}, c.file);
        ExperimentConfig cfg;
        cfg.shots = 100000;
        cfg.seed = 2026;
        cfg.decoder.bp_max_iters = 150;  // d=3 latency budget at 20 ns/iteration
        cfg.p_label = c.p;
        auto r = run_experiment(res.dem, res.set, res.pipeline, cfg);
        auto hier_ci = wilson_interval(r.hier_errors, r.shots);
        auto l2_ci = wilson_interval(r.l2_errors, r.shots);
        bool overlap = intervals_overlap(hier_ci, l2_ci);
        bool ratio = r.ler_hierarchy <= 1.2 * r.ler_l2_only;
        detail << c.file << "@" << c.p << " hier=" << r.hier_errors << " l2=" << r.l2_errors;
        if (!overlap) detail << " NO-OVERLAP";
        if (!ratio) detail << " RATIO-EXCEEDED";
        detail << " ";
        if (!overlap || !ratio) ok = false;
    }
    return {ok, detail.str()};
}

std::pair<bool, std::string> criterion_coverage_regime() {
    auto code = load_code("steane.json");
    std::ostringstream detail;
    // coverage at the low-p operating point
    auto res = build_code(code, steane_noise(1e-4), "steane");
    ExperimentConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 11;
    cfg.decoder.bp_max_iters = 150;
    cfg.p_label = 1e-4;
    auto low = run_experiment(res.dem, res.set, res.pipeline, cfg);
    bool ok = low.coverage >= 0.95;
    detail << "coverage@1e-4=" << format_real(low.coverage);

    // monotone non-increasing coverage over the sweep grid with shared streams
    std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3};
    std::map<double, BuildResult> cache;
    auto provider = [&](const SweepPoint& pt) -> const BuildResult& {
        auto it = cache.find(*pt.p);
        if (it == cache.end())
            it = cache.emplace(*pt.p, build_code(code, steane_noise(*pt.p), "steane")).first;
        return it->second;
    };
    std::vector<SweepPoint> points;
    for (double p : grid) points.push_back({p, 0});
    auto reports = sweep(points, cfg, provider);
    detail << " sweep=";
    for (size_t i = 0; i < reports.size(); ++i) {
        detail << (i ? "," : "") << format_real(reports[i].coverage);
        if (i > 0 && reports[i].coverage > reports[i - 1].coverage) ok = false;
    }
    return {ok, detail.str()};
}

std::pair<bool, std::string> criterion_osd_reduction() {
    auto res = build_code(load_code("steane.json"), steane_noise(3e-3), "steane");
    ExperimentConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 7;
    cfg.decoder.bp_max_iters = 4;  // starve BP so convergence failures occur
    cfg.p_label = 3e-3;
    auto r = run_experiment(res.dem, res.set, res.pipeline, cfg);
    std::ostringstream detail;
    detail << "bp_fail=" << r.bp_nonconverged << " osd_reduction=" << format_real(r.osd_reduction);
    bool ok = r.bp_nonconverged > 0 && r.osd_reduction > 0.0;
    return {ok, detail.str()};
}

std::pair<bool, std::string> criterion_stage_removal() {
    auto res = build_code(load_code("steane.json"), steane_noise(1e-3), "steane");
    ExperimentConfig cfg;
    cfg.shots = 100000;
    cfg.seed = 23;
    cfg.decoder.bp_max_iters = 150;
    cfg.p_label = 1e-3;
    std::vector<SweepPoint> grid;
    for (uint32_t t = 0; t <= (res.pipeline.depth + 1) / 2; ++t) grid.push_back({std::nullopt, t});
    auto provider = [&](const SweepPoint&) -> const BuildResult& { return res; };
    auto reports = sweep(grid, cfg, provider);
    bool ok = true;
    std::ostringstream detail;
    auto full_ci = wilson_interval(reports[0].hier_errors, reports[0].shots);
    detail << "coverage=";
    for (size_t i = 0; i < reports.size(); ++i) {
        detail << (i ? "," : "") << format_real(reports[i].coverage);
        if (i > 0 && reports[i].coverage > reports[i - 1].coverage) ok = false;
        auto ci = wilson_interval(reports[i].hier_errors, reports[i].shots);
        if (!intervals_overlap(ci, full_ci)) ok = false;
    }
    detail << " hier_errors=";
    for (size_t i = 0; i < reports.size(); ++i)
        detail << (i ? "," : "") << reports[i].hier_errors;
    return {ok, detail.str()};
}

int run_cmd(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    return rc;
}

std::pair<bool, std::string> criterion_cli_determinism() {
    if (g_cli_path.empty()) return {false, "CLI path not supplied"};
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "qpredec_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::string steane = test_helpers::fixture_path("steane.json");
    auto artifact = [&](int i) { return (dir / ("p" + std::to_string(i) + ".json")).string(); };
    std::string base_flags = " build --code " + steane +
                             " --sector Z --rounds 3 --p-data 1e-3 --p-meas 2e-4 --seed 5 ";
    for (int i = 0; i < 2; ++i) {
        std::string cmd = g_cli_path + base_flags + "-o " + artifact(i) + " > /dev/null";
        if (run_cmd(cmd) != 0) return {false, "build command failed"};
    }
    if (test_helpers::read_file(artifact(0)) != test_helpers::read_file(artifact(1)))
        return {false, "build artifacts differ between runs"};

    auto report = [&](int i) { return (dir / ("r" + std::to_string(i))).string(); };
    for (int i = 0; i < 2; ++i) {
        std::string cmd = g_cli_path + " simulate --pipeline " + artifact(0) + " --code " +
                          steane + " --sector Z --rounds 3 --p-data 1e-3 --p-meas 2e-4" +
                          " --shots 20000 --seed 9 --bp-iters 40 --threads " +
                          (i == 0 ? "1" : "4") + " -o " + report(i) + " > /dev/null";
        if (run_cmd(cmd) != 0) return {false, "simulate command failed"};
    }
    bool same_csv =
        test_helpers::read_file(report(0) + ".csv") == test_helpers::read_file(report(1) + ".csv");
    bool same_json = test_helpers::read_file(report(0) + ".json") ==
                     test_helpers::read_file(report(1) + ".json");
    if (!same_csv || !same_json)
        return {false, "simulation reports differ across thread counts"};

    std::string sweep_cmd = g_cli_path + " sweep --pipeline " + artifact(0) + " --code " + steane +
                            " --sector Z --rounds 3 --p-data 1e-3 --p-meas 2e-4" +
                            " --truncate-grid 0,1,2 --shots 5000 --seed 3 --bp-iters 40 -o ";
    for (int i = 0; i < 2; ++i)
        if (run_cmd(sweep_cmd + (dir / ("s" + std::to_string(i) + ".csv")).string() +
                    " > /dev/null") != 0)
            return {false, "sweep command failed"};
    if (test_helpers::read_file((dir / "s0.csv").string()) !=
        test_helpers::read_file((dir / "s1.csv").string()))
        return {false, "sweep outputs differ between runs"};

    for (int i = 0; i < 2; ++i) {
        if (run_cmd(g_cli_path + " analyze " + artifact(0) + " -o " +
                    (dir / ("a" + std::to_string(i))).string() + " > /dev/null") != 0)
            return {false, "analyze command failed"};
        if (run_cmd(g_cli_path + " emit --pipeline " + artifact(0) +
                    " --format netlist-text -o " +
                    (dir / ("n" + std::to_string(i))).string() + " > /dev/null") != 0)
            return {false, "emit command failed"};
    }
    if (test_helpers::read_file((dir / "a0").string()) !=
            test_helpers::read_file((dir / "a1").string()) ||
        test_helpers::read_file((dir / "n0").string()) !=
            test_helpers::read_file((dir / "n1").string()))
        return {false, "analyze or emit outputs differ between runs"};
    return {true, "build, simulate (1 vs 4 threads), sweep, analyze, emit byte-identical"};
}

std::pair<bool, std::string> criterion_pruning_soundness() {
    std::ostringstream detail;
    bool ok = true;
    for (double p_hook : {0.0, 1e-4}) {
        NoiseConfig noise{1e-3, 2e-4, p_hook, 3};
        auto dem = merge_duplicates(build_phenomenological_dem(load_code("steane.json"),
                                                               Sector::Z, noise));
        auto rounds_pruned = prune_round_offsets(generate_primitives(dem), dem);
        auto fast = prune_composites(rounds_pruned, dem.num_detectors, dem.num_observables);
        auto slow = test_helpers::oracle_composite_prune(rounds_pruned);
        bool match = fast.primitives.size() == slow.primitives.size();
        if (match)
            for (size_t i = 0; i < fast.primitives.size(); ++i)
                if (fast.primitives[i].syndrome_set != slow.primitives[i].syndrome_set ||
                    fast.primitives[i].observable_set != slow.primitives[i].observable_set)
                    match = false;
        auto again = prune_round_offsets(rounds_pruned, dem);
        bool idem = again.primitives.size() == rounds_pruned.primitives.size();
        if (idem)
            for (size_t i = 0; i < again.primitives.size(); ++i)
                if (again.primitives[i].syndrome_set != rounds_pruned.primitives[i].syndrome_set)
                    idem = false;
        detail << "p_hook=" << p_hook << (match ? " oracle-match" : " ORACLE-MISMATCH")
               << (idem ? " idempotent " : " NOT-IDEMPOTENT ");
        ok = ok && match && idem;
    }
    return {ok, detail.str()};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];
    run_criterion(1, "single-error completeness (repetition, Steane)", 10.0,
                  criterion_single_error_completeness);
    run_criterion(2, "exact coloring matches brute-force chromatic oracle", 120.0,
                  criterion_coloring_oracle);
    run_criterion(3, "hybrid coloring dominates the greedy suite on all fixtures", 0.0,
                  criterion_hybrid_dominance);
    run_criterion(4, "surface fixture pipeline depth within target band", 300.0,
                  criterion_depth_targets);
    run_criterion(5, "hierarchy LER on par with decoder-only arm", 300.0, criterion_ler_parity);
    run_criterion(6, "low-p coverage and monotone coverage sweep", 300.0,
                  criterion_coverage_regime);
    run_criterion(7, "OSD reduction well-defined and positive", 300.0, criterion_osd_reduction);
    run_criterion(8, "tail truncation trades coverage, not LER", 600.0, criterion_stage_removal);
    run_criterion(9, "CLI outputs byte-identical across runs and threads", 0.0,
                  criterion_cli_determinism);
    run_criterion(10, "composite prune matches unbounded oracle; round prune idempotent", 120.0,
                  criterion_pruning_soundness);
    std::printf("%d of 10 criteria passed\n", 10 - g_failures);
    return g_failures;
}
