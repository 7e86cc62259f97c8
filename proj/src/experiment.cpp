#include "rotlab/experiment.hpp"

#include "rotlab/covering.hpp"
#include "rotlab/dioph.hpp"
#include "rotlab/graph.hpp"
#include "rotlab/orbit.hpp"
#include "rotlab/verify.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rotlab {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr const char* kToolName = "rotlab";
constexpr const char* kToolVersion = "1.0.0";

std::string join_strings(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i];
    }
    return s;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " wants an integer, got \"" + v + "\"");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        unsigned long long x = std::stoull(v, &used);
        if (used != v.size() || v.find('-') != std::string::npos)
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + " wants a non-negative integer, got \"" +
                                    v + "\"");
    }
}

std::vector<std::int64_t> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<std::int64_t> out;
    if (strip(v).empty()) return out;
    for (const std::string& piece : split_commas(v)) out.push_back(parse_int(key, strip(piece)));
    return out;
}

std::vector<std::string> parse_string_list(const std::string& v) {
    std::vector<std::string> out;
    if (strip(v).empty()) return out;
    for (const std::string& piece : split_commas(v)) out.push_back(strip(piece));
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw std::invalid_argument("config: " + key + " wants 0/1/true/false, got \"" + v + "\"");
}

MinMode parse_mode(const std::string& mode) {
    if (mode == "phi" || mode == "box") return MinMode::box;
    if (mode == "phi-positive" || mode == "positive") return MinMode::positive;
    throw std::invalid_argument("mode must be phi|box or phi-positive|positive, got \"" + mode +
                                "\"");
}

// "p" or "p/q" with q >= 1.
std::pair<std::int64_t, std::int64_t> parse_rational(const std::string& key,
                                                     const std::string& v) {
    std::size_t slash = v.find('/');
    if (slash == std::string::npos) return {parse_int(key, strip(v)), 1};
    return {parse_int(key, strip(v.substr(0, slash))),
            parse_int(key, strip(v.substr(slash + 1)))};
}

// All artifacts of a run share the same metadata nucleus; files are opened in
// binary mode so line endings (and therefore bytes) match across platforms.
struct ArtifactWriter {
    fs::path dir;
    std::string hash;
    int frac_bits;
    std::uint64_t seed;

    std::ofstream open_csv(const std::string& name) const {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot write artifact " + (dir / name).string());
        f << "# " << kToolName << " " << kToolVersion << "\n"
          << "# frac_bits=" << frac_bits << "\n"
          << "# config_hash=" << hash << "\n"
          << "# seed=" << seed << "\n";
        return f;
    }

    ordered_json meta() const {
        ordered_json m;
        m["tool"] = kToolName;
        m["version"] = kToolVersion;
        m["frac_bits"] = frac_bits;
        m["config_hash"] = hash;
        m["seed"] = seed;
        return m;
    }

    void write_json(const std::string& name, const ordered_json& body) const {
        ordered_json doc;
        doc["meta"] = meta();
        for (const auto& [k, v] : body.items()) doc[k] = v;
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot write artifact " + (dir / name).string());
        f << doc.dump(2) << "\n";
    }
};

ParameterSet make_params(const ExperimentConfig& cfg) {
    if (cfg.params.empty())
        throw std::invalid_argument(cfg.subcommand + " needs --params");
    return ParameterSet::from_texts(cfg.params, cfg.frac_bits());
}

std::shared_ptr<DigitStream> make_stream(const ExperimentConfig& cfg) {
    return parse_stream_spec(cfg.stream, cfg.frac_bits(), cfg.seed);
}

std::vector<std::int64_t> default_t_ladder() {
    std::vector<std::int64_t> v;
    for (std::int64_t t = 8; t <= 1024; t *= 2) v.push_back(t);
    return v;
}

int run_orbit(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    ParameterSet ps = make_params(cfg);
    std::shared_ptr<DigitStream> s = make_stream(cfg);
    Orbit o = compute_orbit(ps, *s, cfg.steps);
    std::ofstream f = w.open_csv("orbit.csv");
    f << "i,digit,x\n";
    for (std::uint64_t i = 1; i <= o.length(); ++i)
        f << i << ',' << o.digits()[i - 1] << ',' << o.point(i).fixed().to_decimal() << "\n";
    return kExitOk;
}

int run_boxdim(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    ParameterSet ps = make_params(cfg);
    std::shared_ptr<DigitStream> s = make_stream(cfg);
    Orbit o = compute_orbit(ps, *s, cfg.steps);
    std::vector<std::int64_t> ladder = cfg.t_ladder.empty() ? default_t_ladder() : cfg.t_ladder;
    CoverProfile p = box_dim_profile(o, ladder, cfg.force);

    std::ofstream f = w.open_csv("boxdim.csv");
    f << "t,count,slope\n";
    for (std::size_t i = 0; i < p.rungs.size(); ++i) {
        f << p.rungs[i].t << ',' << p.rungs[i].count << ',';
        if (i > 0) f << p.slopes[i - 1];
        f << "\n";
    }

    ordered_json body;
    body["rungs"] = ordered_json::array();
    for (const CoverRung& r : p.rungs) body["rungs"].push_back({{"t", r.t}, {"count", r.count}});
    body["slopes"] = p.slopes;
    body["min_slope"] = p.min_slope;
    body["max_slope"] = p.max_slope;
    w.write_json("boxdim.json", body);
    return kExitOk;
}

int run_cycles(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    ParameterSet ps = make_params(cfg);
    std::shared_ptr<DigitStream> s = make_stream(cfg);
    Orbit o = compute_orbit(ps, *s, cfg.steps);
    CycleWitness c = find_primitive_cycle(walk_trace(o, cfg.t));
    FixedPoint v = cycle_form_value(c, ps);
    FixedPoint bound = FixedPoint::from_ratio(2, cfg.t, ps.frac_bits());
    bool within = v <= bound;

    ordered_json body;
    body["t"] = c.t;
    body["start"] = c.start;
    body["end"] = c.end;
    body["s"] = c.s;
    body["counts"] = c.counts;
    body["form_value"] = v.to_decimal();
    body["bound"] = bound.to_decimal();
    body["within_bound"] = within;
    w.write_json("cycles.json", body);
    return within ? kExitOk : kExitAssertion;
}

int run_dioph(const ExperimentConfig& cfg, const ArtifactWriter& w, std::ostream* log) {
    ParameterSet ps = make_params(cfg);
    MinMode mode = parse_mode(cfg.mode);
    if (cfg.s_ladder.empty() && cfg.s_max < 1)
        throw std::invalid_argument("dioph needs --s-max or --s-ladder");
    DiophTable tbl = cfg.s_ladder.empty()
                         ? build_table(ps, mode, cfg.s_max, cfg.force)
                         : build_table(ps, mode, cfg.s_ladder, cfg.force);

    std::ofstream f = w.open_csv("dioph_table.csv");
    f << "mode,s,value";
    for (int j = 1; j <= ps.k(); ++j) f << ",n_" << j;
    f << "\n";
    const char* mode_name = mode == MinMode::box ? "box" : "positive";
    for (const MinRecord& r : tbl.records) {
        f << mode_name << ',' << r.s << ',' << r.value.to_decimal();
        for (std::int64_t n : r.argmin) f << ',' << n;
        f << "\n";
    }

    ordered_json fit_body;
    if (tbl.records.size() >= 4) {
        ExponentFit fit = exponent_fit(tbl, tbl.records.front().s, tbl.records.back().s);
        ordered_json fj;
        fj["tau"] = fit.tau;
        fj["logC"] = fit.log_c;
        fj["residual"] = fit.residual;
        fj["range"] = {fit.s_min, fit.s_max};
        fj["tau_envelope"] = fit.tau_envelope;
        fj["logC_envelope"] = fit.log_c_envelope;
        fj["envelope_points"] = fit.envelope_points;
        fit_body["fit"] = fj;
    } else {
        fit_body["fit"] = nullptr;  // too few rungs for a meaningful fit
    }
    w.write_json("dioph_fit.json", fit_body);

    if (cfg.check == "none") return kExitOk;
    if (cfg.check == "dirichlet") {
        std::vector<std::int64_t> violations = dirichlet_check(tbl);
        ordered_json body;
        body["check"] = "dirichlet";
        body["violations"] = violations;
        w.write_json("dioph_check.json", body);
        if (!violations.empty() && log)
            *log << "dirichlet bound violated at " << violations.size() << " shell(s)\n";
        return violations.empty() ? kExitOk : kExitAssertion;
    }
    if (cfg.check == "schmidt") {
        auto [num, den] = parse_rational("delta", cfg.delta);
        std::int64_t scan_max = cfg.s_max > 0 ? cfg.s_max : tbl.records.back().s;
        std::vector<std::vector<std::int64_t>> hits =
            schmidt_violation_scan(ps, num, den, scan_max, cfg.force);
        ordered_json body;
        body["check"] = "schmidt";
        body["delta"] = cfg.delta;
        body["s_max"] = scan_max;
        body["hits"] = hits;
        w.write_json("dioph_check.json", body);
        return kExitOk;  // the scan is exploratory, hits are data rather than failures
    }
    throw std::invalid_argument("check must be none, dirichlet or schmidt, got \"" + cfg.check +
                                "\"");
}

int run_complexity(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    std::shared_ptr<DigitStream> s = make_stream(cfg);
    if (cfg.n_max < 1) throw std::invalid_argument("complexity needs n_max >= 1");
    if (cfg.steps < static_cast<std::uint64_t>(cfg.n_max))
        throw std::invalid_argument("complexity needs steps >= n_max");
    std::ofstream f = w.open_csv("complexity.csv");
    f << "n,p_n,balance_1,recurrence_gap\n";
    for (int n = 1; n <= cfg.n_max; ++n) {
        f << n << ',' << complexity(*s, n, cfg.steps) << ','
          << balance_defect(*s, 1, n, cfg.steps) << ',';
        if (auto g = recurrence_gap(*s, n, cfg.steps)) f << *g;
        f << "\n";
    }
    return kExitOk;
}

// Index range of the scale-1/t intervals contained in (-eps, eps) and the
// predicted count floor(2 eps t), in exact integers.
struct CentralBand {
    std::int64_t lo, hi, expected;
};

CentralBand central_band(const FixedPoint& eps, std::int64_t t) {
    const int f = eps.frac_bits();
    const BigInt period = BigInt(1) << f;
    const BigInt half = BigInt(1) << (f - 1);
    const BigInt e = eps.mantissa();
    BigInt lo = ((half - e) * t + period - 1) / period;
    BigInt hi = (half + e) * t / period - 1;
    BigInt expected = (BigInt(2) * e * t) >> f;
    return {lo.convert_to<long long>(), hi.convert_to<long long>(),
            expected.convert_to<long long>()};
}

int run_avoidance(const ExperimentConfig& cfg, const ArtifactWriter& w, std::ostream* log) {
    ParameterSet ps = make_params(cfg);
    if (ps.k() != 2) throw std::invalid_argument("avoidance needs exactly two parameters");
    if (cfg.eps.empty()) throw std::invalid_argument("avoidance needs at least one eps value");
    if (cfg.steps < 1) throw std::invalid_argument("avoidance needs steps >= 1");

    bool all_ok = true;
    for (std::size_t idx = 0; idx < cfg.eps.size(); ++idx) {
        FixedPoint eps = eval_param(*parse_param(cfg.eps[idx]), cfg.frac_bits());
        std::string tag = "avoidance_" + std::to_string(idx + 1);
        ordered_json body;
        body["eps"] = cfg.eps[idx];
        body["steps"] = cfg.steps;
        try {
            AvoidanceResult r = avoidance_orbit(ps.alpha(1), ps.alpha(2), eps, cfg.steps);

            std::ofstream f = w.open_csv(tag + ".csv");
            f << "i,digit,x\n";
            for (std::uint64_t i = 1; i <= r.orbit.length(); ++i)
                f << i << ',' << r.orbit.digits()[i - 1] << ','
                  << r.orbit.point(i).fixed().to_decimal() << "\n";

            std::uint64_t inside = 0;
            FixedPoint min_dist = dist_to_zero(r.orbit.point(1));
            for (std::uint64_t i = 1; i <= r.orbit.length(); ++i) {
                FixedPoint d = dist_to_zero(r.orbit.point(i));
                if (d < eps) ++inside;
                if (d < min_dist) min_dist = d;
            }
            std::vector<CirclePoint> tail(r.orbit.points().begin() + 1,
                                          r.orbit.points().end());
            OccupiedResult occ = occupied(tail, cfg.t);
            CentralBand band = central_band(eps, cfg.t);
            std::int64_t hit = 0;
            for (std::int64_t j = band.lo; j <= band.hi; ++j)
                if (occ.bitmap[static_cast<std::size_t>(j)]) ++hit;

            body["failures"] = 0;
            body["in_interval_points"] = inside;
            body["min_distance"] = min_dist.to_decimal();
            ordered_json cb;
            cb["t"] = cfg.t;
            cb["lo"] = band.lo;
            cb["hi"] = band.hi;
            cb["width"] = band.hi - band.lo + 1;
            cb["expected"] = band.expected;
            cb["occupied"] = hit;
            body["central_band"] = cb;
            body["occupied_total"] = occ.count;
            if (inside > 0 || hit > 0) all_ok = false;
        } catch (const AvoidanceFailure& e) {
            body["failures"] = 1;
            body["failed_at_step"] = e.step();
            body["detail"] = e.what();
            all_ok = false;
            if (log) *log << "avoidance failed for eps=" << cfg.eps[idx] << ": " << e.what()
                          << "\n";
        }
        w.write_json(tag + ".json", body);
    }
    return all_ok ? kExitOk : kExitAssertion;
}

int run_returns(const ExperimentConfig& cfg, const ArtifactWriter& w) {
    ParameterSet ps = make_params(cfg);
    std::shared_ptr<DigitStream> s = make_stream(cfg);
    auto* rs = dynamic_cast<const RecurrentStream*>(s.get());
    if (!rs) throw std::invalid_argument("returns needs a recurrent:... stream");
    const RecurrentBuilder& b = rs->builder();
    if (cfg.depth < 1) throw std::invalid_argument("returns needs depth >= 1");
    std::size_t depth = static_cast<std::size_t>(cfg.depth);

    std::vector<CirclePoint> pts = return_points(b, ps, depth);
    FixedPoint residual = check_return_recursion(b, ps, depth);

    std::ofstream f = w.open_csv("returns.csv");
    f << "i,L_i,x\n";
    for (std::size_t i = 1; i <= depth; ++i)
        f << i << ',' << b.prefix_length(i).str() << ',' << pts[i - 1].fixed().to_decimal()
          << "\n";

    ordered_json body;
    body["depth"] = depth;
    body["residual"] = residual.to_decimal();
    body["exact"] = residual.is_zero();
    w.write_json("returns.json", body);
    return residual.is_zero() ? kExitOk : kExitAssertion;
}

int run_verify_all(const ArtifactWriter& w, std::ostream* log) {
    std::vector<CriterionResult> results = run_acceptance(log);
    ordered_json body;
    body["criteria"] = ordered_json::array();
    int passed = 0;
    for (const CriterionResult& r : results) {
        ordered_json c;
        c["id"] = r.id;
        c["name"] = r.name;
        c["passed"] = r.passed;
        c["detail"] = r.detail;
        body["criteria"].push_back(c);
        if (r.passed) ++passed;
    }
    body["passed"] = passed;
    body["failed"] = static_cast<int>(results.size()) - passed;
    body["all_passed"] = passed == static_cast<int>(results.size());
    w.write_json("verify.json", body);
    return body["all_passed"].get<bool>() ? kExitOk : kExitAssertion;
}

int dispatch(const ExperimentConfig& cfg, std::ostream* log) {
    if (cfg.guard_bits < 0 || cfg.guard_bits > 960)
        throw std::invalid_argument("guard_bits must lie in [0, 960]");
    fs::create_directories(cfg.out);
    ArtifactWriter w{fs::path(cfg.out), config_hash(cfg), cfg.frac_bits(), cfg.seed};
    {
        std::ofstream f(w.dir / "config.txt", std::ios::binary);
        if (!f) throw std::invalid_argument("cannot write into " + cfg.out);
        f << serialize_config(cfg);
    }

    if (cfg.subcommand == "orbit") return run_orbit(cfg, w);
    if (cfg.subcommand == "boxdim") return run_boxdim(cfg, w);
    if (cfg.subcommand == "cycles") return run_cycles(cfg, w);
    if (cfg.subcommand == "dioph") return run_dioph(cfg, w, log);
    if (cfg.subcommand == "complexity") return run_complexity(cfg, w);
    if (cfg.subcommand == "avoidance") return run_avoidance(cfg, w, log);
    if (cfg.subcommand == "returns") return run_returns(cfg, w);
    if (cfg.subcommand == "verify-all") return run_verify_all(w, log);
    throw std::invalid_argument(
        "subcommand must be one of orbit, boxdim, cycles, dioph, complexity, avoidance, "
        "returns, verify-all; got \"" +
        cfg.subcommand + "\"");
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream s;
    s << "subcommand=" << cfg.subcommand << "\n"
      << "params=" << join_strings(cfg.params) << "\n"
      << "stream=" << cfg.stream << "\n"
      << "steps=" << cfg.steps << "\n"
      << "t=" << cfg.t << "\n"
      << "t_ladder=" << join_ints(cfg.t_ladder) << "\n"
      << "s_max=" << cfg.s_max << "\n"
      << "s_ladder=" << join_ints(cfg.s_ladder) << "\n"
      << "mode=" << cfg.mode << "\n"
      << "check=" << cfg.check << "\n"
      << "delta=" << cfg.delta << "\n"
      << "eps=" << join_strings(cfg.eps) << "\n"
      << "depth=" << cfg.depth << "\n"
      << "n_max=" << cfg.n_max << "\n"
      << "seed=" << cfg.seed << "\n"
      << "guard_bits=" << cfg.guard_bits << "\n"
      << "force=" << (cfg.force ? 1 : 0) << "\n";
    return s.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value, got \"" + line + "\"");
        std::string key = strip(line.substr(0, eq));
        std::string value = strip(line.substr(eq + 1));

        if (key == "subcommand") cfg.subcommand = value;
        else if (key == "params") cfg.params = parse_string_list(value);
        else if (key == "stream") cfg.stream = value;
        else if (key == "steps") cfg.steps = parse_uint(key, value);
        else if (key == "t") cfg.t = parse_int(key, value);
        else if (key == "t_ladder") cfg.t_ladder = parse_int_list(key, value);
        else if (key == "s_max") cfg.s_max = parse_int(key, value);
        else if (key == "s_ladder") cfg.s_ladder = parse_int_list(key, value);
        else if (key == "mode") cfg.mode = value;
        else if (key == "check") cfg.check = value;
        else if (key == "delta") cfg.delta = value;
        else if (key == "eps") cfg.eps = parse_string_list(value);
        else if (key == "depth") cfg.depth = static_cast<int>(parse_int(key, value));
        else if (key == "n_max") cfg.n_max = static_cast<int>(parse_int(key, value));
        else if (key == "seed") cfg.seed = parse_uint(key, value);
        else if (key == "guard_bits") cfg.guard_bits = static_cast<int>(parse_int(key, value));
        else if (key == "out") cfg.out = value;
        else if (key == "force") cfg.force = parse_bool(key, value);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key \"" + key + "\"");
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read config file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    apply_config_text(cfg, buf.str());
}

int run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
    try {
        return dispatch(cfg, log);
    } catch (const BudgetExceeded& e) {
        if (log) *log << "budget: " << e.what() << "; rerun with --force to override\n";
        return kExitBudget;
    } catch (const AvoidanceFailure& e) {
        if (log) *log << "assertion: " << e.what() << "\n";
        return kExitAssertion;
    } catch (const ParseError& e) {
        if (log) *log << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        if (log) *log << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        if (log) *log << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        if (log) *log << "usage: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        if (log) *log << "assertion: " << e.what() << "\n";
        return kExitAssertion;
    }
}

}  // namespace rotlab
