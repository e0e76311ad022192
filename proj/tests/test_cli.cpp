// End-to-end tests of the mbqc command-line tool: exit codes, verdicts,
// byte-determinism, and the no-partial-output contract, all exercised
// through the real binary.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "mbqc/json_io.hpp"

using namespace mbqc;
namespace fs = std::filesystem;

namespace {

const std::string kData = MBQC_DATA_DIR;
const std::string kCli = MBQC_CLI_PATH;

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = kCli + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("mbqc_cli_" + tag);
    fs::remove_all(dir);
    return dir;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("compile reports layer counts and honors --two-layer") {
    const CmdResult clifford = run_cli("compile " + kData + "/circuit_clifford.json --out " +
                                       fresh_dir("cliff").string());
    REQUIRE(clifford.exit_code == 0);
    REQUIRE(njson::parse(clifford.out).at("quantum_layers").get<int>() == 1);

    const CmdResult two = run_cli("compile " + kData + "/circuit_cxrx.json --two-layer");
    REQUIRE(two.exit_code == 0);
    REQUIRE(njson::parse(two.out).at("depth").at("quantum_layers").get<int>() == 2);

    const CmdResult empty = run_cli("compile " + kData + "/circuit_empty.json");
    REQUIRE(empty.exit_code == 0);
    const njson je = njson::parse(empty.out);
    REQUIRE(je.at("depth").at("quantum_layers").get<int>() == 0);
    REQUIRE(je.at("pattern").at("instructions").empty());
}

TEST_CASE("compile emits loadable files, byte-identically across runs") {
    const fs::path dir = fresh_dir("emit");
    const std::string args = "compile " + kData + "/circuit_demo.json --out " + dir.string();
    REQUIRE(run_cli(args).exit_code == 0);
    const std::string pattern1 = slurp(dir / "pattern.json");
    const std::string schedule1 = slurp(dir / "schedule.json");
    const std::string depth1 = slurp(dir / "depth.json");

    const MeasurementPattern p = pattern_from_json(njson::parse(pattern1));
    REQUIRE_FALSE(p.instructions.empty());
    const Schedule s = schedule_from_json(njson::parse(schedule1));
    REQUIRE_FALSE(s.layers.empty());
    REQUIRE(njson::parse(depth1).contains("classical_parity_depth"));

    REQUIRE(run_cli(args).exit_code == 0);
    REQUIRE(slurp(dir / "pattern.json") == pattern1);
    REQUIRE(slurp(dir / "schedule.json") == schedule1);
    REQUIRE(slurp(dir / "depth.json") == depth1);
    fs::remove_all(dir);
}

TEST_CASE("verify passes faithful fixtures and fails the corrupted one") {
    const CmdResult euler = run_cli("verify " + kData + "/pattern_euler.json");
    REQUIRE(euler.exit_code == 0);
    REQUIRE(contains(euler.out, "branches: 16"));
    REQUIRE(contains(euler.out, "verdict: PASS"));

    const CmdResult wire = run_cli("verify " + kData + "/pattern_wire.json");
    REQUIRE(wire.exit_code == 0);
    REQUIRE(contains(wire.out, "branches: 4"));

    const CmdResult bad = run_cli("verify " + kData + "/pattern_euler_corrupted.json");
    REQUIRE(bad.exit_code == 1);
    REQUIRE(contains(bad.out, "verdict: FAIL"));
    REQUIRE(contains(bad.out, "worst branch:"));

    const CmdResult demo = run_cli("verify " + kData + "/circuit_demo.json");
    REQUIRE(demo.exit_code == 0);
    REQUIRE(contains(demo.out, "mode: circuit"));
    REQUIRE(contains(demo.out, "verdict: PASS"));
}

TEST_CASE("verify refuses circuits beyond the exhaustive budget") {
    Circuit big;
    big.n = 5;
    for (int q = 0; q < 5; ++q) big.gates.push_back(Gate::make(GateKind::RotX, {q}, 0.3));
    const fs::path file = fs::temp_directory_path() / "mbqc_cli_big_circuit.json";
    write_file_atomic(file.string(), circuit_to_json(big).dump() + "\n");
    const CmdResult r = run_cli("verify " + file.string());
    REQUIRE(r.exit_code == 2);
    REQUIRE_FALSE(contains(r.out, "verdict"));
    fs::remove(file);
}

TEST_CASE("sampling is byte-deterministic and corrected bits are exact") {
    const std::string args = "sample " + kData + "/pattern_wire.json --seed 7 --shots 200";
    const CmdResult a = run_cli(args);
    const CmdResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(a.out == b.out);
    REQUIRE(contains(a.out, "shot,m1,m2,k3,b0"));

    // The wire is the identity on |0>, so every corrected bit must be 0 no
    // matter which branch was sampled; raw outcomes should split near 50/50.
    std::istringstream lines(a.out);
    std::string line;
    std::getline(lines, line);  // header
    int shots = 0, ones_m1 = 0;
    while (std::getline(lines, line)) {
        ++shots;
        REQUIRE(line.back() == '0');
        const auto first_comma = line.find(',');
        ones_m1 += line[first_comma + 1] == '1';
    }
    REQUIRE(shots == 200);
    REQUIRE(std::abs(ones_m1 / 200.0 - 0.5) < 0.15);

    const CmdResult other = run_cli("sample " + kData + "/pattern_wire.json --seed 8 --shots 200");
    REQUIRE(other.out != a.out);
}

TEST_CASE("ladder queries print probabilities and seeded samples") {
    const CmdResult ground =
        run_cli("ladder " + kData + "/ladder_identity2.json " + kData + "/ladder_query_ground.json");
    REQUIRE(ground.exit_code == 0);
    REQUIRE(ground.out == "1\n");

    const CmdResult eq = run_cli("ladder " + kData + "/ladder_cluster3.json " + kData +
                                 "/ladder_query_equatorial.json");
    REQUIRE(eq.exit_code == 0);
    REQUIRE(std::abs(std::stod(eq.out) - 0.5) <= 1e-12);

    const std::string sample_args = "ladder " + kData + "/ladder_cluster3.json " + kData +
                                    "/ladder_query_sample.json --mode sample --seed 9 --shots 20";
    const CmdResult s1 = run_cli(sample_args);
    const CmdResult s2 = run_cli(sample_args);
    REQUIRE(s1.exit_code == 0);
    REQUIRE(s1.out == s2.out);
    REQUIRE(contains(s1.out, "shot,line0,line2,probability"));

    // Sample mode without a seed is a usage error.
    const CmdResult unseeded = run_cli("ladder " + kData + "/ladder_cluster3.json " + kData +
                                       "/ladder_query_sample.json --mode sample");
    REQUIRE(unseeded.exit_code == 2);

    // A joint query against a sampling fixture (no outcomes) is a schema error.
    const CmdResult mismatched = run_cli("ladder " + kData + "/ladder_cluster3.json " + kData +
                                         "/ladder_query_sample.json");
    REQUIRE(mismatched.exit_code == 2);
}

TEST_CASE("lemma3 and tqc-check report verdicts") {
    const CmdResult line = run_cli("lemma3 4");
    REQUIRE(line.exit_code == 0);
    REQUIRE(contains(line.out, "verdict: PASS"));

    const CmdResult grid = run_cli("lemma3 2 3");
    REQUIRE(grid.exit_code == 0);

    REQUIRE(run_cli("lemma3 abc").exit_code == 2);

    const CmdResult check = run_cli("tqc-check");
    REQUIRE(check.exit_code == 0);
    REQUIRE(contains(check.out, "verdict: PASS"));
    REQUIRE_FALSE(contains(check.out, "[FAIL]"));
}

TEST_CASE("schema violations never leave partial outputs") {
    const fs::path bad = fs::temp_directory_path() / "mbqc_cli_bad.json";
    write_file_atomic(bad.string(), "{\"n\": 1, \"gates\": [{\"kind\": \"Nope\", \"targets\": [0]}]}\n");

    const fs::path outdir = fresh_dir("badout");
    REQUIRE(run_cli("compile " + bad.string() + " --out " + outdir.string()).exit_code == 2);
    REQUIRE_FALSE(fs::exists(outdir / "pattern.json"));

    const fs::path outfile = fs::temp_directory_path() / "mbqc_cli_bad_out.csv";
    fs::remove(outfile);
    REQUIRE(run_cli("sample " + bad.string() + " --seed 1 --out " + outfile.string()).exit_code ==
            2);
    REQUIRE_FALSE(fs::exists(outfile));

    REQUIRE(run_cli("verify " + bad.string()).exit_code == 2);
    REQUIRE(run_cli("nonsense").exit_code == 2);
    fs::remove(bad);
}
