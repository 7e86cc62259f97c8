// Experiment driver shared by the CLI and the tests: a flat configuration
// describing one run, its canonical serialization and hash, and the
// subcommand runners that write CSV/JSON artifacts. Identical configurations
// produce byte-identical artifacts.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rotlab {

// One run of one subcommand. Serialization has a fixed key order and omits
// the output directory, so the recorded hash identifies the experiment
// independently of where its artifacts land.
struct ExperimentConfig {
    std::string subcommand;
    std::vector<std::string> params;    // rotation parameter expressions
    std::string stream = "thue-morse";  // digit stream specification
    std::uint64_t steps = 1000;         // orbit length / analysis window
    std::int64_t t = 1024;              // partition scale
    std::vector<std::int64_t> t_ladder; // scale ladder (boxdim)
    std::int64_t s_max = 0;             // dense shell limit (dioph)
    std::vector<std::int64_t> s_ladder; // shell ladder (dioph)
    std::string mode = "phi";           // dioph mode: phi|box, phi-positive|positive
    std::string check = "none";         // dioph check: none | dirichlet | schmidt
    std::string delta = "1";            // schmidt exponent offset, "p" or "p/q"
    std::vector<std::string> eps = {"1/20", "1/10"};  // avoidance radii
    int depth = 15;                     // returns recursion depth
    int n_max = 30;                     // complexity block-length limit
    std::uint64_t seed = 0;             // feeds every randomized stream
    int guard_bits = 32;                // working precision = 64 + guard bits
    std::string out = ".";              // artifact directory (not serialized)
    bool force = false;                 // override enumeration budget / scale guard

    int frac_bits() const { return 64 + guard_bits; }
};

// Canonical key=value rendering: every key on its own line, fixed order,
// list values comma-joined, `out` omitted. This exact text is hashed into
// every artifact and written alongside them as config.txt.
std::string serialize_config(const ExperimentConfig& cfg);

// 64-bit FNV-1a over serialize_config(cfg), rendered as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Applies key=value lines on top of cfg ('#' starts a comment, blank lines
// ignored, keys as in serialize_config plus `out`). Throws
// std::invalid_argument on an unknown key or a malformed line.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::string& path);

inline constexpr int kExitOk = 0;         // run completed, all assertions hold
inline constexpr int kExitAssertion = 1;  // run completed, an assertion failed
inline constexpr int kExitUsage = 2;      // configuration unusable
inline constexpr int kExitBudget = 3;     // enumeration budget exceeded without force

// Runs the configured subcommand, writing artifacts (plus config.txt) under
// cfg.out, creating the directory if needed; optional human-readable progress
// goes to log. Never throws: every outcome maps onto the exit codes above.
int run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace rotlab
