#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rotlab/experiment.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace rotlab;
namespace fs = std::filesystem;

namespace {

// Fresh per-test scratch directory, wiped on entry so reruns start clean.
fs::path temp_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("rotlab_exp_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// Data rows of a CSV artifact: everything after the '#' metadata header and
// the column-name row.
std::vector<std::string> csv_rows(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> rows;
    std::string line;
    bool past_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        if (!past_header) {
            past_header = true;  // column names
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

ExperimentConfig base_config(const std::string& subcommand, const fs::path& out) {
    ExperimentConfig cfg;
    cfg.subcommand = subcommand;
    cfg.out = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("config serialization is canonical and omits the output directory") {
    ExperimentConfig cfg;
    cfg.subcommand = "orbit";
    std::string text = serialize_config(cfg);

    CHECK(text.find("subcommand=orbit\n") == 0);
    CHECK(text.find("out=") == std::string::npos);
    CHECK(text.find("eps=1/20,1/10\n") != std::string::npos);
    CHECK(text.find("force=0\n") != std::string::npos);

    // The hash identifies the experiment, not the artifact location.
    ExperimentConfig moved = cfg;
    moved.out = "/somewhere/else";
    CHECK(config_hash(cfg) == config_hash(moved));
    CHECK(config_hash(cfg) == "6432b7071e8b0d16");  // frozen FNV-1a fixture

    ExperimentConfig other = cfg;
    other.seed = 7;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("config text round-trips through apply_config_text") {
    ExperimentConfig cfg;
    cfg.subcommand = "dioph";
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.stream = "periodic:12";
    cfg.steps = 4242;
    cfg.t = 512;
    cfg.t_ladder = {8, 64, 512};
    cfg.s_max = 77;
    cfg.s_ladder = {32, 64, 128};
    cfg.mode = "positive";
    cfg.check = "schmidt";
    cfg.delta = "3/2";
    cfg.eps = {"1/7"};
    cfg.depth = 9;
    cfg.n_max = 12;
    cfg.seed = 99;
    cfg.guard_bits = 16;
    cfg.force = true;

    ExperimentConfig parsed;
    apply_config_text(parsed, serialize_config(cfg));
    CHECK(serialize_config(parsed) == serialize_config(cfg));
    CHECK(parsed.params == cfg.params);
    CHECK(parsed.t_ladder == cfg.t_ladder);
    CHECK(parsed.force == cfg.force);
    CHECK(parsed.frac_bits() == 80);
}

TEST_CASE("config text accepts comments and rejects unknown keys") {
    ExperimentConfig cfg;
    apply_config_text(cfg, "# a comment\n\n  steps = 5  # trailing comment\nout=/tmp/x\n");
    CHECK(cfg.steps == 5);
    CHECK(cfg.out == "/tmp/x");

    CHECK_THROWS_AS(apply_config_text(cfg, "no_such_key=1\n"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_text(cfg, "steps\n"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_text(cfg, "steps=abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_text(cfg, "force=maybe\n"), std::invalid_argument);
}

TEST_CASE("identical configs write byte-identical artifacts") {
    fs::path a = temp_dir("det_a");
    fs::path b = temp_dir("det_b");
    for (const fs::path& dir : {a, b}) {
        ExperimentConfig cfg = base_config("orbit", dir);
        cfg.params = {"sqrt(2)", "sqrt(3)"};
        cfg.stream = "thue-morse";
        cfg.steps = 200;
        REQUIRE(run_experiment(cfg) == kExitOk);
    }
    CHECK(slurp(a / "orbit.csv") == slurp(b / "orbit.csv"));
    CHECK(slurp(a / "config.txt") == slurp(b / "config.txt"));
}

TEST_CASE("orbit run writes the documented one-row series") {
    fs::path dir = temp_dir("orbit");
    ExperimentConfig cfg = base_config("orbit", dir);
    cfg.params = {"pi/3", "e/4"};
    cfg.stream = "explicit:1";
    cfg.steps = 1;
    REQUIRE(run_experiment(cfg) == kExitOk);

    std::string csv = slurp(dir / "orbit.csv");
    CHECK(csv.find("# rotlab 1.0.0\n") == 0);
    CHECK(csv.find("# frac_bits=96\n") != std::string::npos);
    CHECK(csv.find("# config_hash=" + config_hash(cfg) + "\n") != std::string::npos);
    CHECK(csv.find("# seed=0\n") != std::string::npos);
    CHECK(csv.find("i,digit,x\n") != std::string::npos);

    std::vector<std::string> rows = csv_rows(dir / "orbit.csv");
    REQUIRE(rows.size() == 1);
    // x_1 = reduce(pi/3): pi/3 - 1 = 0.04719755119659774615...
    CHECK(rows[0].find("1,1,0.0471975511965977461542") == 0);
}

TEST_CASE("boxdim run reports rungs and slopes in both formats") {
    fs::path dir = temp_dir("boxdim");
    ExperimentConfig cfg = base_config("boxdim", dir);
    cfg.params = {"sqrt(2)"};
    cfg.stream = "periodic:1";
    cfg.steps = 20000;
    cfg.t_ladder = {8, 16, 32, 64};
    REQUIRE(run_experiment(cfg) == kExitOk);

    nlohmann::json j = read_json(dir / "boxdim.json");
    CHECK(j["meta"]["tool"] == "rotlab");
    CHECK(j["meta"]["config_hash"] == config_hash(cfg));
    REQUIRE(j["rungs"].size() == 4);
    CHECK(j["rungs"][0]["t"] == 8);
    CHECK(j["rungs"][0]["count"] == 8);  // a dense single rotation fills every interval
    CHECK(j["slopes"].size() == 3);
    CHECK(j["min_slope"].get<double>() >= 0.9);
    CHECK(j["max_slope"].get<double>() <= 1.0);
    CHECK(csv_rows(dir / "boxdim.csv").size() == 4);
}

TEST_CASE("cycles run finds a within-bound cycle and exits zero") {
    fs::path dir = temp_dir("cycles");
    ExperimentConfig cfg = base_config("cycles", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.stream = "thue-morse";
    cfg.steps = 5000;
    cfg.t = 64;
    REQUIRE(run_experiment(cfg) == kExitOk);

    nlohmann::json j = read_json(dir / "cycles.json");
    CHECK(j["t"] == 64);
    CHECK(j["within_bound"] == true);
    CHECK(j["s"].get<std::int64_t>() >= 1);
    CHECK(j["counts"].size() == 2);
    CHECK(j["form_value"].get<std::string>() < j["bound"].get<std::string>());
}

TEST_CASE("dioph run dumps the table, the fit and a clean dirichlet check") {
    fs::path dir = temp_dir("dioph");
    ExperimentConfig cfg = base_config("dioph", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.mode = "phi";
    cfg.s_max = 200;
    cfg.check = "dirichlet";
    REQUIRE(run_experiment(cfg) == kExitOk);

    std::vector<std::string> rows = csv_rows(dir / "dioph_table.csv");
    REQUIRE(rows.size() == 200);
    CHECK(rows[0].find("box,1,") == 0);

    nlohmann::json fit = read_json(dir / "dioph_fit.json");
    REQUIRE(!fit["fit"].is_null());
    CHECK(fit["fit"]["tau"].get<double>() > 0.0);
    CHECK(fit["fit"]["range"][0] == 1);
    CHECK(fit["fit"]["range"][1] == 200);

    nlohmann::json check = read_json(dir / "dioph_check.json");
    CHECK(check["check"] == "dirichlet");
    CHECK(check["violations"].empty());
}

TEST_CASE("dioph run on a sparse ladder skips the fit when too short") {
    fs::path dir = temp_dir("dioph_ladder");
    ExperimentConfig cfg = base_config("dioph", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.s_ladder = {64, 128, 256};
    REQUIRE(run_experiment(cfg) == kExitOk);
    CHECK(csv_rows(dir / "dioph_table.csv").size() == 3);
    CHECK(read_json(dir / "dioph_fit.json")["fit"].is_null());
}

TEST_CASE("dioph schmidt check records hits without failing the run") {
    fs::path dir = temp_dir("dioph_schmidt");
    ExperimentConfig cfg = base_config("dioph", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.s_max = 50;
    cfg.check = "schmidt";
    cfg.delta = "1";
    REQUIRE(run_experiment(cfg) == kExitOk);
    nlohmann::json check = read_json(dir / "dioph_check.json");
    CHECK(check["check"] == "schmidt");
    CHECK(check["delta"] == "1");
    CHECK(check["hits"].size() >= 2);  // the unit tuples always qualify
}

TEST_CASE("budget overruns exit with the dedicated code unless forced") {
    fs::path dir = temp_dir("budget");
    ExperimentConfig cfg = base_config("dioph", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.s_max = 5000;  // (2*5000+1)^2 tuples, past the enumeration budget
    CHECK(run_experiment(cfg) == kExitBudget);
}

TEST_CASE("usage errors exit with code 2") {
    fs::path dir = temp_dir("usage");
    {
        ExperimentConfig cfg = base_config("no-such-subcommand", dir);
        CHECK(run_experiment(cfg) == kExitUsage);
    }
    {
        ExperimentConfig cfg = base_config("orbit", dir);
        CHECK(run_experiment(cfg) == kExitUsage);  // missing --params
    }
    {
        ExperimentConfig cfg = base_config("orbit", dir);
        cfg.params = {"sqrt(2)"};
        cfg.stream = "nonsense:xyz";
        CHECK(run_experiment(cfg) == kExitUsage);
    }
    {
        ExperimentConfig cfg = base_config("orbit", dir);
        cfg.params = {"sqrt(2) +"};  // malformed expression
        CHECK(run_experiment(cfg) == kExitUsage);
    }
    {
        ExperimentConfig cfg = base_config("dioph", dir);
        cfg.params = {"sqrt(2)", "sqrt(3)"};
        CHECK(run_experiment(cfg) == kExitUsage);  // neither s_max nor s_ladder
    }
    {
        ExperimentConfig cfg = base_config("dioph", dir);
        cfg.params = {"sqrt(2)", "sqrt(3)"};
        cfg.s_max = 10;
        cfg.mode = "sideways";
        CHECK(run_experiment(cfg) == kExitUsage);
    }
    {
        ExperimentConfig cfg = base_config("dioph", dir);
        cfg.params = {"sqrt(2)", "sqrt(3)"};
        cfg.s_max = 10;
        cfg.mode = "positive";
        cfg.check = "dirichlet";  // the pigeonhole bound concerns the box table
        CHECK(run_experiment(cfg) == kExitUsage);
    }
    {
        ExperimentConfig cfg = base_config("returns", dir);
        cfg.params = {"sqrt(2)", "sqrt(3)"};
        cfg.stream = "thue-morse";  // not a doubling-word stream
        CHECK(run_experiment(cfg) == kExitUsage);
    }
}

TEST_CASE("complexity run tabulates the doubling-sequence profile") {
    fs::path dir = temp_dir("complexity");
    ExperimentConfig cfg = base_config("complexity", dir);
    cfg.stream = "thue-morse";
    cfg.steps = 3000;
    cfg.n_max = 4;
    REQUIRE(run_experiment(cfg) == kExitOk);

    std::vector<std::string> rows = csv_rows(dir / "complexity.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("1,2,", 0) == 0);
    CHECK(rows[1].rfind("2,4,", 0) == 0);
    CHECK(rows[2].rfind("3,6,", 0) == 0);
    CHECK(rows[3].rfind("4,10,", 0) == 0);
}

TEST_CASE("returns run closes the recursion exactly") {
    fs::path dir = temp_dir("returns");
    fs::path words = dir / "words.txt";
    {
        std::ofstream f(words);
        f << "# building words\n1\n2\n1 2\n";
    }
    ExperimentConfig cfg = base_config("returns", dir);
    cfg.params = {"sqrt(2)", "sqrt(3)"};
    cfg.stream = "recurrent:file=" + words.string() + ",cycle";
    cfg.depth = 10;
    REQUIRE(run_experiment(cfg) == kExitOk);

    nlohmann::json j = read_json(dir / "returns.json");
    CHECK(j["depth"] == 10);
    CHECK(j["exact"] == true);
    CHECK(j["residual"] == "0");

    std::vector<std::string> rows = csv_rows(dir / "returns.csv");
    REQUIRE(rows.size() == 10);
    // prefix schedule L_i = |w_{i-1}| + l_i for words (1), (2), (1 2) cycled
    CHECK(rows[0].rfind("1,2,", 0) == 0);
    CHECK(rows[1].rfind("2,5,", 0) == 0);
    CHECK(rows[2].rfind("3,9,", 0) == 0);
}

TEST_CASE("avoidance run keeps the window empty and reports the central band") {
    fs::path dir = temp_dir("avoidance");
    ExperimentConfig cfg = base_config("avoidance", dir);
    cfg.params = {"pi/3", "e/4"};
    cfg.eps = {"1/20"};
    cfg.steps = 20000;
    cfg.t = 64;
    REQUIRE(run_experiment(cfg) == kExitOk);

    nlohmann::json j = read_json(dir / "avoidance_1.json");
    CHECK(j["eps"] == "1/20");
    CHECK(j["failures"] == 0);
    CHECK(j["in_interval_points"] == 0);
    CHECK(j["central_band"]["t"] == 64);
    CHECK(j["central_band"]["lo"] == 29);
    CHECK(j["central_band"]["hi"] == 34);
    CHECK(j["central_band"]["width"] == 6);
    CHECK(j["central_band"]["expected"] == 6);
    CHECK(j["central_band"]["occupied"] == 0);
    CHECK(csv_rows(dir / "avoidance_1.csv").size() == 20000);
}
