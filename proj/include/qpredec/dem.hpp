#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qpredec/gf2.hpp"

namespace qpredec {

// One independent error mechanism of the decoding hypergraph: fires with
// `probability`, toggles the listed detectors and observables.
struct Mechanism {
    double probability = 0.0;
    std::vector<uint32_t> detectors;    // sorted, duplicate-free
    std::vector<uint32_t> observables;  // sorted, duplicate-free

    bool operator==(const Mechanism&) const = default;
};

struct DetectorInfo {
    uint32_t index = 0;
    std::optional<std::vector<double>> coords;  // spatial coords, then time
    std::optional<uint32_t> round;

    bool operator==(const DetectorInfo&) const = default;
};

struct DetectorErrorModel {
    std::vector<Mechanism> mechanisms;
    std::vector<DetectorInfo> detectors;  // size == num_detectors
    uint32_t num_detectors = 0;
    uint32_t num_observables = 0;
    std::optional<uint32_t> rounds;
    std::vector<std::string> warnings;

    bool operator==(const DetectorErrorModel& o) const {
        return mechanisms == o.mechanisms && detectors == o.detectors &&
               num_detectors == o.num_detectors && num_observables == o.num_observables &&
               rounds == o.rounds;
    }

    bool has_full_round_metadata() const {
        if (num_detectors == 0) return false;
        for (const auto& d : detectors)
            if (!d.round.has_value()) return false;
        return true;
    }
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, size_t line, size_t col)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + msg),
          line(line),
          col(col) {}
    size_t line;
    size_t col;
};

// --------------------------------------------------------------------------
// DEM text grammar (subset). One instruction per line:
//   error(<p>) D<i> ... L<j> ...
//   detector(<c0>, <c1>, ...) D<i>      (coordinate args optional)
//   logical_observable L<j>
//   shift_detectors(<coords>) <n>       (coordinate args optional)
//   repeat <n> { ... }                  (closing brace on its own line)
//   # comment / blank lines
// --------------------------------------------------------------------------

namespace detail {

struct Instr {
    enum Kind { Error, Detector, LogicalObservable, ShiftDetectors, Repeat } kind;
    double prob = 0.0;
    std::vector<double> args;         // parenthesized arguments
    std::vector<int64_t> dets;        // D targets
    std::vector<int64_t> obs;         // L targets
    int64_t shift = 0;                // plain numeric target
    uint64_t repeat_count = 0;
    std::vector<Instr> body;          // repeat block
    size_t line = 0;
};

class DemLexer {
  public:
    explicit DemLexer(std::string_view text) : text_(text) {}

    // Returns false at end of input. Skips blank and comment lines.
    bool next_line(std::string_view& out, size_t& line_no) {
        while (pos_ < text_.size()) {
            size_t eol = text_.find('\n', pos_);
            if (eol == std::string_view::npos) eol = text_.size();
            std::string_view raw = text_.substr(pos_, eol - pos_);
            pos_ = eol + 1;
            ++line_;
            size_t hash = raw.find('#');
            if (hash != std::string_view::npos) raw = raw.substr(0, hash);
            size_t b = raw.find_first_not_of(" \t\r");
            if (b == std::string_view::npos) continue;
            size_t e = raw.find_last_not_of(" \t\r");
            out = raw.substr(b, e - b + 1);
            line_no = line_;
            return true;
        }
        return false;
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;
    size_t line_ = 0;
};

inline double parse_double_token(std::string_view tok, size_t line) {
    try {
        size_t used = 0;
        double v = std::stod(std::string(tok), &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + std::string(tok) + "'", line, 0);
    }
}

inline int64_t parse_int_token(std::string_view tok, size_t line) {
    try {
        size_t used = 0;
        long long v = std::stoll(std::string(tok), &used);
        if (used != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + std::string(tok) + "'", line, 0);
    }
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Parses "name(a, b, c) rest" into name/args/rest.
inline void split_head(std::string_view s, size_t line, std::string& name,
                       std::vector<double>& args, std::string_view& rest) {
    size_t i = 0;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
    name = std::string(s.substr(0, i));
    args.clear();
    if (i < s.size() && s[i] == '(') {
        size_t close = s.find(')', i);
        if (close == std::string_view::npos) throw ParseError("missing ')'", line, i + 1);
        std::string inner(s.substr(i + 1, close - i - 1));
        if (inner.find_first_not_of(" \t") != std::string::npos) {
            std::stringstream ss(inner);
            std::string part;
            while (std::getline(ss, part, ',')) {
                size_t b = part.find_first_not_of(" \t");
                size_t e = part.find_last_not_of(" \t");
                if (b == std::string::npos) throw ParseError("empty argument", line, i + 1);
                args.push_back(parse_double_token(
                    std::string_view(part).substr(b, e - b + 1), line));
            }
        }
        i = close + 1;
    }
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    rest = s.substr(i);
}

// Recursive-descent parse of a block; `lexer` supplies pre-trimmed lines.
inline std::vector<Instr> parse_block(DemLexer& lexer, bool inside_repeat, size_t open_line) {
    std::vector<Instr> out;
    std::string_view ln;
    size_t line = 0;
    while (lexer.next_line(ln, line)) {
        if (ln == "}") {
            if (!inside_repeat) throw ParseError("unexpected '}'", line, 1);
            return out;
        }
        std::string name;
        std::vector<double> args;
        std::string_view rest;
        split_head(ln, line, name, args, rest);
        Instr ins;
        ins.line = line;
        ins.args = args;
        auto targets = split_ws(rest);
        if (name == "error") {
            ins.kind = Instr::Error;
            if (args.size() != 1)
                throw ParseError("error takes exactly one probability argument", line, 1);
            ins.prob = args[0];
            if (!(ins.prob > 0.0 && ins.prob < 1.0))
                throw ParseError("probability must lie strictly inside (0,1)", line, 1);
            for (auto t : targets) {
                if (t.size() >= 2 && t[0] == 'D')
                    ins.dets.push_back(parse_int_token(t.substr(1), line));
                else if (t.size() >= 2 && t[0] == 'L')
                    ins.obs.push_back(parse_int_token(t.substr(1), line));
                else
                    throw ParseError("error targets must be D<i> or L<j>", line, 1);
            }
        } else if (name == "detector") {
            ins.kind = Instr::Detector;
            if (targets.size() != 1 || targets[0].size() < 2 || targets[0][0] != 'D')
                throw ParseError("detector takes exactly one D<i> target", line, 1);
            ins.dets.push_back(parse_int_token(targets[0].substr(1), line));
        } else if (name == "logical_observable") {
            ins.kind = Instr::LogicalObservable;
            if (targets.size() != 1 || targets[0].size() < 2 || targets[0][0] != 'L')
                throw ParseError("logical_observable takes exactly one L<j> target", line, 1);
            ins.obs.push_back(parse_int_token(targets[0].substr(1), line));
        } else if (name == "shift_detectors") {
            ins.kind = Instr::ShiftDetectors;
            if (targets.size() != 1)
                throw ParseError("shift_detectors takes exactly one integer target", line, 1);
            ins.shift = parse_int_token(targets[0], line);
        } else if (name == "repeat") {
            ins.kind = Instr::Repeat;
            if (targets.size() != 2 || targets[1] != "{")
                throw ParseError("repeat syntax is: repeat <n> {", line, 1);
            int64_t n = parse_int_token(targets[0], line);
            if (n < 0) throw ParseError("repeat count must be non-negative", line, 1);
            ins.repeat_count = static_cast<uint64_t>(n);
            ins.body = parse_block(lexer, true, line);
        } else {
            throw ParseError("unknown instruction '" + name + "'", line, 1);
        }
        out.push_back(std::move(ins));
    }
    if (inside_repeat)
        throw ParseError("repeat block opened here was never closed", open_line, 1);
    return out;
}

inline constexpr size_t kMaxUnrolledInstructions = 10'000'000;

struct EvalState {
    int64_t det_offset = 0;
    std::vector<double> coord_offset;
    int64_t max_det = -1;
    int64_t max_obs = -1;
    size_t executed = 0;
    std::vector<Mechanism> mechanisms;
    std::map<uint32_t, std::vector<double>> coords;
    std::vector<std::string> warnings;
};

inline void eval_block(const std::vector<Instr>& block, EvalState& st) {
    for (const auto& ins : block) {
        if (++st.executed > kMaxUnrolledInstructions)
            throw ParseError("model exceeds the unrolled instruction budget", ins.line, 1);
        switch (ins.kind) {
            case Instr::Error: {
                std::set<int64_t> dset, oset;
                for (int64_t d : ins.dets) {
                    int64_t abs = d + st.det_offset;
                    if (abs < 0) throw ParseError("negative detector index", ins.line, 1);
                    // repeated target toggles (XOR semantics)
                    if (!dset.insert(abs).second) dset.erase(abs);
                }
                for (int64_t o : ins.obs) {
                    if (o < 0) throw ParseError("negative observable index", ins.line, 1);
                    if (!oset.insert(o).second) oset.erase(o);
                }
                if (dset.empty() && !oset.empty())
                    throw ParseError("undetectable logical error channel (no detectors)",
                                     ins.line, 1);
                if (dset.empty() && oset.empty()) {
                    st.warnings.push_back("line " + std::to_string(ins.line) +
                                          ": dropped mechanism with no effect");
                    break;
                }
                if (ins.prob >= 0.5)
                    st.warnings.push_back("line " + std::to_string(ins.line) +
                                          ": mechanism probability >= 0.5");
                Mechanism m;
                m.probability = ins.prob;
                for (int64_t d : dset) {
                    m.detectors.push_back(static_cast<uint32_t>(d));
                    st.max_det = std::max(st.max_det, d);
                }
                for (int64_t o : oset) {
                    m.observables.push_back(static_cast<uint32_t>(o));
                    st.max_obs = std::max(st.max_obs, o);
                }
                st.mechanisms.push_back(std::move(m));
                break;
            }
            case Instr::Detector: {
                int64_t abs = ins.dets[0] + st.det_offset;
                if (abs < 0) throw ParseError("negative detector index", ins.line, 1);
                st.max_det = std::max(st.max_det, abs);
                if (!ins.args.empty()) {
                    std::vector<double> c = ins.args;
                    for (size_t i = 0; i < c.size() && i < st.coord_offset.size(); ++i)
                        c[i] += st.coord_offset[i];
                    auto key = static_cast<uint32_t>(abs);
                    auto it = st.coords.find(key);
                    if (it != st.coords.end() && it->second != c)
                        throw ParseError("conflicting coordinates for detector D" +
                                             std::to_string(abs),
                                         ins.line, 1);
                    st.coords[key] = std::move(c);
                }
                break;
            }
            case Instr::LogicalObservable: {
                st.max_obs = std::max(st.max_obs, ins.obs[0]);
                break;
            }
            case Instr::ShiftDetectors: {
                st.det_offset += ins.shift;
                if (st.coord_offset.size() < ins.args.size())
                    st.coord_offset.resize(ins.args.size(), 0.0);
                for (size_t i = 0; i < ins.args.size(); ++i) st.coord_offset[i] += ins.args[i];
                break;
            }
            case Instr::Repeat: {
                for (uint64_t i = 0; i < ins.repeat_count; ++i) eval_block(ins.body, st);
                break;
            }
        }
    }
}

}  // namespace detail

// Parses the DEM text grammar into a fully flattened model: repeat blocks
// unrolled, detector shifts applied, all indices absolute.
inline DetectorErrorModel parse_dem(std::string_view text) {
    detail::DemLexer lexer(text);
    auto block = detail::parse_block(lexer, false, 0);
    detail::EvalState st;
    detail::eval_block(block, st);

    DetectorErrorModel model;
    model.mechanisms = std::move(st.mechanisms);
    model.warnings = std::move(st.warnings);
    model.num_detectors = static_cast<uint32_t>(st.max_det + 1);
    model.num_observables = static_cast<uint32_t>(st.max_obs + 1);
    model.detectors.resize(model.num_detectors);
    for (uint32_t i = 0; i < model.num_detectors; ++i) model.detectors[i].index = i;
    for (auto& [idx, coords] : st.coords) model.detectors[idx].coords = std::move(coords);

    bool all_have_coords = model.num_detectors > 0;
    for (const auto& d : model.detectors)
        if (!d.coords.has_value() || d.coords->empty()) all_have_coords = false;
    if (all_have_coords) {
        int64_t max_round = -1;
        bool ok = true;
        for (auto& d : model.detectors) {
            double t = d.coords->back();
            if (t < 0 || std::floor(t) != t) {
                ok = false;
                break;
            }
            max_round = std::max<int64_t>(max_round, static_cast<int64_t>(t));
        }
        if (ok) {
            for (auto& d : model.detectors)
                d.round = static_cast<uint32_t>(d.coords->back());
            model.rounds = static_cast<uint32_t>(max_round + 1);
        } else {
            model.warnings.push_back("detector time coordinates are not non-negative integers;"
                                     " round metadata disabled");
        }
    }
    return model;
}

// Canonical flattened text form; parse_dem(serialize_dem(m)) == m.
inline std::string serialize_dem(const DetectorErrorModel& model) {
    std::ostringstream out;
    char buf[64];
    out << "# detector error model\n";
    out << "# num_detectors: " << model.num_detectors << "\n";
    out << "# num_observables: " << model.num_observables << "\n";
    out << "# num_mechanisms: " << model.mechanisms.size() << "\n";
    if (model.rounds) out << "# rounds: " << *model.rounds << "\n";

    bool last_det_pinned = false;
    bool last_obs_pinned = false;
    for (const auto& m : model.mechanisms) {
        if (!m.detectors.empty() && m.detectors.back() + 1 == model.num_detectors)
            last_det_pinned = true;
        if (!m.observables.empty() && m.observables.back() + 1 == model.num_observables)
            last_obs_pinned = true;
    }
    for (const auto& d : model.detectors) {
        if (!d.coords.has_value() || d.coords->empty()) continue;
        if (d.index + 1 == model.num_detectors) last_det_pinned = true;
        out << "detector(";
        for (size_t i = 0; i < d.coords->size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", (*d.coords)[i]);
            out << (i ? ", " : "") << buf;
        }
        out << ") D" << d.index << "\n";
    }
    if (!last_det_pinned && model.num_detectors > 0)
        out << "detector D" << (model.num_detectors - 1) << "\n";
    if (!last_obs_pinned && model.num_observables > 0)
        out << "logical_observable L" << (model.num_observables - 1) << "\n";
    for (const auto& m : model.mechanisms) {
        std::snprintf(buf, sizeof buf, "%.17g", m.probability);
        out << "error(" << buf << ")";
        for (uint32_t d : m.detectors) out << " D" << d;
        for (uint32_t o : m.observables) out << " L" << o;
        out << "\n";
    }
    return out.str();
}

// XOR-combination of two independent occurrence probabilities.
inline double xor_probability(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

// Merges mechanisms with identical (detectors, observables); output order is
// canonical (sorted by detector set, then observable set). Mechanisms with no
// effect are dropped; undetectable ones (observables but no detectors) are
// rejected.
inline DetectorErrorModel merge_duplicates(const DetectorErrorModel& in) {
    DetectorErrorModel out = in;
    out.warnings.clear();
    for (const auto& m : in.mechanisms)
        if (m.detectors.empty() && !m.observables.empty())
            throw std::invalid_argument("undetectable logical error channel in model");
    std::vector<Mechanism> ms;
    ms.reserve(in.mechanisms.size());
    for (const auto& m : in.mechanisms)
        if (!(m.detectors.empty() && m.observables.empty())) ms.push_back(m);
    std::sort(ms.begin(), ms.end(), [](const Mechanism& a, const Mechanism& b) {
        if (a.detectors != b.detectors) return a.detectors < b.detectors;
        return a.observables < b.observables;
    });
    std::vector<Mechanism> merged;
    for (auto& m : ms) {
        if (!merged.empty() && merged.back().detectors == m.detectors &&
            merged.back().observables == m.observables)
            merged.back().probability = xor_probability(merged.back().probability, m.probability);
        else
            merged.push_back(std::move(m));
    }
    for (const auto& m : merged)
        if (m.probability >= 0.5)
            out.warnings.push_back("merged mechanism probability >= 0.5");
    out.mechanisms = std::move(merged);
    return out;
}

// --------------------------------------------------------------------------
// CSS code specification and the phenomenological model builder.
// --------------------------------------------------------------------------

struct CssCodeSpec {
    std::string name;
    uint32_t n = 0;
    std::vector<BitVec> hx, hz;  // checks x n
    std::vector<BitVec> lx, lz;  // logicals x n

    void validate() const {
        auto check_width = [&](const std::vector<BitVec>& rows, const char* what) {
            for (const auto& r : rows)
                if (r.size() != n)
                    throw std::invalid_argument(std::string(what) + " row width != n");
        };
        check_width(hx, "hx");
        check_width(hz, "hz");
        check_width(lx, "lx");
        check_width(lz, "lz");
        for (const auto& a : hx)
            for (const auto& b : hz)
                if (gf2_dot(a, b))
                    throw std::invalid_argument("hx and hz rows are not orthogonal");
        for (const auto& a : lx)
            for (const auto& b : hz)
                if (gf2_dot(a, b)) throw std::invalid_argument("lx does not commute with hz");
        for (const auto& a : lz)
            for (const auto& b : hx)
                if (gf2_dot(a, b)) throw std::invalid_argument("lz does not commute with hx");
    }
};

inline std::vector<BitVec> rows_from_json(const nlohmann::json& j, const char* key) {
    std::vector<BitVec> rows;
    if (!j.contains(key)) return rows;
    for (const auto& row : j.at(key)) {
        BitVec v(row.size());
        for (size_t i = 0; i < row.size(); ++i) {
            int b = row[i].get<int>();
            if (b != 0 && b != 1) throw std::invalid_argument("matrix entries must be 0/1");
            if (b) v.set(i);
        }
        rows.push_back(std::move(v));
    }
    return rows;
}

// JSON document with keys: name, n, hx, hz, lx, lz.
inline CssCodeSpec parse_code_spec(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CssCodeSpec code;
    code.name = j.value("name", "unnamed");
    code.n = j.at("n").get<uint32_t>();
    code.hx = rows_from_json(j, "hx");
    code.hz = rows_from_json(j, "hz");
    code.lx = rows_from_json(j, "lx");
    code.lz = rows_from_json(j, "lz");
    code.validate();
    return code;
}

struct NoiseConfig {
    double p_data = 0.0;
    double p_meas = 0.0;
    double p_hook = 0.0;
    uint32_t rounds = 1;

    void validate() const {
        auto in_range = [](double p) { return p >= 0.0 && p < 1.0; };
        if (!in_range(p_data) || !in_range(p_meas) || !in_range(p_hook))
            throw std::invalid_argument("noise probabilities must lie in [0,1)");
        if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
        if (rounds < 2 && (p_meas > 0.0 || p_hook > 0.0))
            throw std::invalid_argument(
                "rounds >= 2 required when measurement or hook noise is present");
    }
};

enum class Sector { X, Z };

// Phenomenological model over `rounds` detector layers, indexed round-major:
// detector t*m + c is check c at round t, coords [c, t]. The final round acts
// as a perfect readout, so a data error registers in exactly one round.
inline DetectorErrorModel build_phenomenological_dem(const CssCodeSpec& code, Sector sector,
                                                     const NoiseConfig& noise) {
    code.validate();
    noise.validate();
    const auto& H = sector == Sector::Z ? code.hz : code.hx;
    const auto& L = sector == Sector::Z ? code.lz : code.lx;
    const uint32_t m = static_cast<uint32_t>(H.size());
    if (m == 0) throw std::invalid_argument("selected sector has no checks");
    const uint32_t R = noise.rounds;

    auto col_stamp = [&](uint32_t q) {
        std::vector<uint32_t> checks;
        for (uint32_t c = 0; c < m; ++c)
            if (H[c].test(q)) checks.push_back(c);
        return checks;
    };
    auto obs_stamp = [&](uint32_t q) {
        std::vector<uint32_t> obs;
        for (uint32_t j = 0; j < L.size(); ++j)
            if (L[j].test(q)) obs.push_back(j);
        return obs;
    };
    auto sym_diff = [](std::vector<uint32_t> a, const std::vector<uint32_t>& b) {
        std::vector<uint32_t> out;
        std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                      std::back_inserter(out));
        return out;
    };

    DetectorErrorModel dem;
    dem.num_detectors = R * m;
    dem.num_observables = static_cast<uint32_t>(L.size());
    dem.rounds = R;
    dem.detectors.resize(dem.num_detectors);
    for (uint32_t t = 0; t < R; ++t)
        for (uint32_t c = 0; c < m; ++c) {
            auto& d = dem.detectors[t * m + c];
            d.index = t * m + c;
            d.coords = std::vector<double>{static_cast<double>(c), static_cast<double>(t)};
            d.round = t;
        }

    if (noise.p_data > 0.0) {
        for (uint32_t t = 0; t < R; ++t)
            for (uint32_t q = 0; q < code.n; ++q) {
                Mechanism mech;
                mech.probability = noise.p_data;
                for (uint32_t c : col_stamp(q)) mech.detectors.push_back(t * m + c);
                mech.observables = obs_stamp(q);
                if (mech.detectors.empty() && !mech.observables.empty())
                    throw std::invalid_argument("qubit " + std::to_string(q) +
                                                " carries an undetectable logical error");
                if (mech.detectors.empty()) continue;
                dem.mechanisms.push_back(std::move(mech));
            }
    }
    if (noise.p_meas > 0.0) {
        for (uint32_t t = 0; t + 1 < R; ++t)
            for (uint32_t c = 0; c < m; ++c) {
                Mechanism mech;
                mech.probability = noise.p_meas;
                mech.detectors = {t * m + c, (t + 1) * m + c};
                dem.mechanisms.push_back(std::move(mech));
            }
    }
    if (noise.p_hook > 0.0) {
        for (uint32_t c = 0; c < m; ++c) {
            auto support = H[c].set_bits();
            for (size_t i = 0; i + 1 < support.size(); ++i) {
                uint32_t q1 = static_cast<uint32_t>(support[i]);
                uint32_t q2 = static_cast<uint32_t>(support[i + 1]);
                for (uint32_t t = 0; t + 1 < R; ++t) {
                    std::vector<uint32_t> s1, s2;
                    for (uint32_t cc : col_stamp(q1)) s1.push_back(t * m + cc);
                    for (uint32_t cc : col_stamp(q2)) s2.push_back((t + 1) * m + cc);
                    Mechanism mech;
                    mech.probability = noise.p_hook;
                    mech.detectors = sym_diff(std::move(s1), s2);
                    mech.observables = sym_diff(obs_stamp(q1), obs_stamp(q2));
                    if (mech.detectors.empty() && !mech.observables.empty())
                        throw std::invalid_argument("hook channel on check " + std::to_string(c) +
                                                    " is undetectable");
                    if (mech.detectors.empty()) continue;
                    dem.mechanisms.push_back(std::move(mech));
                }
            }
        }
    }
    return dem;
}

// Stable content hash used to pair pipeline artifacts with their source model.
inline std::string dem_content_hash(const DetectorErrorModel& model) {
    std::string text = serialize_dem(model);
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace qpredec
