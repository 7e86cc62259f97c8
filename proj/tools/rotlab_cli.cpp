// Command-line front end: parses flags into an ExperimentConfig, optionally
// layers a key=value config file on top, and hands off to run_experiment.

#include "rotlab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace {

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

std::vector<std::int64_t> split_ints(const std::string& s) {
    std::vector<std::int64_t> out;
    for (const std::string& piece : split_commas(s)) out.push_back(std::stoll(piece));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotlab: numerical laboratory for multi-rotation orbits on the unit circle"};
    app.require_subcommand(1);

    rotlab::ExperimentConfig cfg;
    std::string params_text, t_ladder_text, s_ladder_text, eps_text, config_path;

    const std::pair<const char*, const char*> subs[] = {
        {"orbit", "walk a digit stream and dump the orbit points"},
        {"boxdim", "occupied-interval counts and log-log slopes across a scale ladder"},
        {"cycles", "extract a primitive cycle from the interval walk and check its form value"},
        {"dioph", "tables of minimal form values with optional fits and checks"},
        {"complexity", "block complexity, balance defect and recurrence gap of a stream"},
        {"avoidance", "two-rotation construction that keeps the orbit out of (-eps, eps)"},
        {"returns", "return points of a doubling-word stream and their recursion residual"},
        {"verify-all", "run the full acceptance matrix and write the result table"},
    };
    for (const auto& [name, desc] : subs) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--params", params_text,
                        "comma-separated rotation parameter expressions");
        sub->add_option("--stream", cfg.stream, "digit stream spec")->capture_default_str();
        sub->add_option("--steps", cfg.steps, "orbit length / analysis window")
            ->capture_default_str();
        sub->add_option("--t", cfg.t, "partition scale")->capture_default_str();
        sub->add_option("--t-ladder", t_ladder_text, "comma-separated scale ladder (boxdim)");
        sub->add_option("--s-max", cfg.s_max, "dense shell limit (dioph)");
        sub->add_option("--s-ladder", s_ladder_text, "comma-separated shell ladder (dioph)");
        sub->add_option("--mode", cfg.mode, "dioph mode: phi|box or phi-positive|positive")
            ->capture_default_str();
        sub->add_option("--check", cfg.check, "dioph check: none | dirichlet | schmidt")
            ->capture_default_str();
        sub->add_option("--delta", cfg.delta, "schmidt exponent offset, p or p/q")
            ->capture_default_str();
        sub->add_option("--eps", eps_text, "comma-separated avoidance radii (default 1/20,1/10)");
        sub->add_option("--depth", cfg.depth, "returns recursion depth")->capture_default_str();
        sub->add_option("--n-max", cfg.n_max, "complexity block-length limit")
            ->capture_default_str();
        sub->add_option("--seed", cfg.seed, "seed for randomized streams")->capture_default_str();
        sub->add_option("--guard-bits", cfg.guard_bits,
                        "extra precision bits; working precision = 64 + guard bits")
            ->capture_default_str();
        sub->add_option("--out", cfg.out, "artifact directory")->capture_default_str();
        sub->add_flag("--force", cfg.force, "override the enumeration budget / scale guard");
        sub->add_option("--config", config_path, "key=value file; overrides the flags");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);  // prints the message or the requested help text
        return code == 0 ? rotlab::kExitOk : rotlab::kExitUsage;
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    try {
        if (!params_text.empty()) cfg.params = split_commas(params_text);
        if (!t_ladder_text.empty()) cfg.t_ladder = split_ints(t_ladder_text);
        if (!s_ladder_text.empty()) cfg.s_ladder = split_ints(s_ladder_text);
        if (!eps_text.empty()) cfg.eps = split_commas(eps_text);
        if (!config_path.empty()) rotlab::apply_config_file(cfg, config_path);
    } catch (const std::exception& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return rotlab::kExitUsage;
    }

    std::ostream* log = cfg.subcommand == "verify-all" ? &std::cout : &std::cerr;
    return rotlab::run_experiment(cfg, log);
}
