// mbqc: command-line front end for the measurement-pattern toolkit.
//
// Subcommands:
//   compile    circuit.json -> pattern.json + schedule.json + depth.json
//   verify     circuit.json or pattern.json -> branch-exhaustive verdict
//   sample     pattern.json -> seeded outcome CSV with corrected bits
//   ladder     spec.json query.json -> joint probability or sampled records
//   lemma3     1D length or 2D rows cols -> bond-grid / cluster fidelity
//   tqc-check  built-in self-test of schemes, patterns, grids and ladders
//
// Exit codes: 0 success/PASS, 1 verification FAIL, 2 input or usage error.
// All output is deterministic for fixed inputs and seed: input sites are
// prepared in |0>, numbers are printed with fixed formats, and files are
// written atomically only after their content is fully built.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbqc/json_io.hpp"
#include "mbqc/random.hpp"

namespace {

using namespace mbqc;

struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;  // positional input paths / numbers
    std::uint64_t seed = 0;
    bool seed_set = false;
    long shots = 1;
    std::string mode = "branch";  // sample | branch | exhaustive
    bool two_layer = false;
    double tolerance = 0.0;  // 0 = command default
    std::string out;
};

constexpr std::size_t kVerifyQubitBudget = 12;    // dense-oracle qubit cap
constexpr std::size_t kExhaustiveSiteBudget = 20; // measured-site cap for enumeration

double tol_or(const RunConfig& cfg, double fallback) {
    return cfg.tolerance > 0.0 ? cfg.tolerance : fallback;
}

// Deterministic per-shot stream: spread the base seed so consecutive shots
// use well-separated engine seeds.
std::uint64_t shot_seed(std::uint64_t base, long shot) {
    return base + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(shot + 1);
}

QubitState corrected_output(const RunResult& r, const std::vector<int>& outs) {
    return pauli_apply(frame_resolve(r.frame, r.outcomes, outs), r.output);
}

std::string branch_string(const OutcomeRecord& rec) {
    std::string s;
    for (const auto& [id, bit] : rec.bits) {
        if (!s.empty()) s += ' ';
        s += std::to_string(id) + ':' + std::to_string(bit);
    }
    return s.empty() ? "(none)" : s;
}

void emit(const RunConfig& cfg, const std::string& content) {
    if (cfg.out.empty())
        std::fputs(content.c_str(), stdout);
    else
        write_file_atomic(cfg.out, content);
}

// --- compile --------------------------------------------------------------------

int cmd_compile(const RunConfig& cfg) {
    const Circuit c = circuit_from_json(load_json_file(cfg.inputs.at(0)));
    const MeasurementPattern p = compile(c);
    const Schedule s = cfg.two_layer ? schedule_two_layer(c) : schedule(p, c.gates.size());
    const DepthReport report = depth_report(s);

    const njson jp = pattern_to_json(p);
    const njson js = schedule_to_json(s);
    const njson jd = depth_report_to_json(report);

    if (cfg.out.empty()) {
        const njson all{{"pattern", jp}, {"schedule", js}, {"depth", jd}};
        std::fputs((all.dump(2) + "\n").c_str(), stdout);
    } else {
        std::filesystem::create_directories(cfg.out);
        write_file_atomic(cfg.out + "/pattern.json", jp.dump(2) + "\n");
        write_file_atomic(cfg.out + "/schedule.json", js.dump(2) + "\n");
        write_file_atomic(cfg.out + "/depth.json", jd.dump(2) + "\n");
        std::fputs((jd.dump(2) + "\n").c_str(), stdout);
    }
    return 0;
}

// --- verify ---------------------------------------------------------------------

struct VerifyStats {
    std::size_t branches = 0;
    double max_infidelity = 0.0;
    double max_dist_dev = 0.0;
    OutcomeRecord worst;
};

int report_verdict(const RunConfig& cfg, const char* mode, std::size_t branches,
                   const VerifyStats& st, double tol) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "mode: %s\n", mode);
    out += line;
    std::snprintf(line, sizeof line, "branches: %zu\n", branches);
    out += line;
    std::snprintf(line, sizeof line, "max infidelity: %.3e\n", st.max_infidelity);
    out += line;
    std::snprintf(line, sizeof line, "max distribution deviation: %.3e\n", st.max_dist_dev);
    out += line;
    const bool pass = st.max_infidelity <= tol && st.max_dist_dev <= tol;
    if (!pass) {
        std::snprintf(line, sizeof line, "worst branch: %s\n", branch_string(st.worst).c_str());
        out += line;
    }
    out += pass ? "verdict: PASS\n" : "verdict: FAIL\n";
    emit(cfg, out);
    return pass ? 0 : 1;
}

int verify_circuit(const RunConfig& cfg, const Circuit& c) {
    const MeasurementPattern p = compile(c);
    if (p.graph.sites.size() > kVerifyQubitBudget) {
        std::fprintf(stderr,
                     "verify: compiled pattern has %zu sites; the exhaustive budget is %zu "
                     "qubits and this tool refuses to fall back to sampling\n",
                     p.graph.sites.size(), kVerifyQubitBudget);
        return 2;
    }
    const QubitState in(c.n);  // |0...0>
    const QubitState want = apply_circuit(c, in);

    VerifyStats st;
    double total_p = 0.0;
    lazy_enumerate(p, in, [&](const RunResult& r) {
        ++st.branches;
        total_p += r.probability;
        const double inf = 1.0 - fidelity_up_to_phase(corrected_output(r, p.outputs), want);
        if (inf > st.max_infidelity) {
            st.max_infidelity = inf;
            st.worst = r.outcomes;
        }
    });
    st.max_dist_dev = std::max(std::abs(total_p - 1.0),
                               total_variation(readout_distribution_via_frame(p, in),
                                               circuit_distribution(c, in)));
    return report_verdict(cfg, "circuit", st.branches, st, tol_or(cfg, 1e-9));
}

int verify_pattern(const RunConfig& cfg, const MeasurementPattern& p) {
    if (p.instructions.size() > kExhaustiveSiteBudget) {
        std::fprintf(stderr,
                     "verify: pattern measures %zu sites; the exhaustive budget is %zu and "
                     "this tool refuses to fall back to sampling\n",
                     p.instructions.size(), kExhaustiveSiteBudget);
        return 2;
    }
    const std::size_t k = p.inputs.size();
    if (k > 6) {
        std::fprintf(stderr, "verify: pattern has %zu input sites; probe budget is 6\n", k);
        return 2;
    }

    // Probe every computational basis input plus the uniform superposition;
    // a correct pattern gives phase-equal corrected outputs on every branch.
    std::vector<QubitState> probes;
    for (std::size_t b = 0; b < (std::size_t{1} << k); ++b) {
        QubitState e(static_cast<int>(k));
        e.amps.assign(e.dim(), cplx{0.0, 0.0});
        e.amps[b] = cplx{1.0, 0.0};
        probes.push_back(std::move(e));
    }
    QubitState plus(static_cast<int>(k));
    plus.amps.assign(plus.dim(), cplx{1.0 / std::sqrt(static_cast<double>(plus.dim())), 0.0});
    probes.push_back(std::move(plus));

    VerifyStats st;
    std::size_t per_probe = 0;
    for (const QubitState& probe : probes) {
        std::optional<QubitState> reference;
        double total_p = 0.0;
        std::size_t branches = 0;
        lazy_enumerate(p, probe, [&](const RunResult& r) {
            ++branches;
            total_p += r.probability;
            const QubitState cor = corrected_output(r, p.outputs);
            if (!reference) {
                reference = cor;
                return;
            }
            const double inf = 1.0 - fidelity_up_to_phase(cor, *reference);
            if (inf > st.max_infidelity) {
                st.max_infidelity = inf;
                st.worst = r.outcomes;
            }
        });
        per_probe = branches;
        st.max_dist_dev = std::max(st.max_dist_dev, std::abs(total_p - 1.0));
    }
    return report_verdict(cfg, "pattern", per_probe, st, tol_or(cfg, 1e-9));
}

int cmd_verify(const RunConfig& cfg) {
    const njson j = load_json_file(cfg.inputs.at(0));
    if (j.is_object() && j.contains("gates")) return verify_circuit(cfg, circuit_from_json(j));
    return verify_pattern(cfg, pattern_from_json(j));
}

// --- sample ---------------------------------------------------------------------

int cmd_sample(const RunConfig& cfg) {
    const MeasurementPattern p = pattern_from_json(load_json_file(cfg.inputs.at(0)));
    if (cfg.shots < 1) {
        std::fprintf(stderr, "sample: --shots must be positive\n");
        return 2;
    }
    const MeasurementPattern readout = append_z_readout(p);
    const QubitState in(static_cast<int>(p.inputs.size()));  // |0...0>

    std::string csv = "shot";
    for (const auto& ins : p.instructions) csv += ",m" + std::to_string(ins.site);
    for (int site : p.outputs) csv += ",k" + std::to_string(site);
    for (std::size_t i = 0; i < p.outputs.size(); ++i) csv += ",b" + std::to_string(i);
    csv += "\n";

    for (long shot = 0; shot < cfg.shots; ++shot) {
        const RunResult r = lazy_run_sample(readout, in, shot_seed(cfg.seed, shot));
        csv += std::to_string(shot);
        for (const auto& ins : p.instructions)
            csv += "," + std::to_string(r.outcomes.get(ins.id));
        for (int site : p.outputs) csv += "," + std::to_string(r.outcomes.get(site));
        const std::vector<int> bits =
            reinterpret_output(r.outcomes, p.frame, r.outcomes, p.outputs);
        for (int b : bits) csv += "," + std::to_string(b);
        csv += "\n";
    }
    emit(cfg, csv);
    return 0;
}

// --- ladder ---------------------------------------------------------------------

int cmd_ladder(const RunConfig& cfg) {
    const LadderSpec spec = ladder_from_json(load_json_file(cfg.inputs.at(0)));
    const njson jq = load_json_file(cfg.inputs.at(1));

    if (cfg.mode == "sample") {
        if (!cfg.seed_set) {
            std::fprintf(stderr, "ladder: --seed is required in sample mode\n");
            return 2;
        }
        if (cfg.shots < 1) {
            std::fprintf(stderr, "ladder: --shots must be positive\n");
            return 2;
        }
        MeasurementQuery q = ladder_query_from_json(jq, false).canonical();
        q.validate(spec.n);
        const auto strategy =
            [&q](const std::vector<LineMeasurement>& hist) -> std::optional<LineRequest> {
            if (hist.size() >= q.items.size()) return std::nullopt;
            const LineMeasurement& next = q.items[hist.size()];
            return LineRequest{next.line, next.basis, next.angle};
        };

        std::string csv = "shot";
        for (const auto& it : q.items) csv += ",line" + std::to_string(it.line);
        csv += ",probability\n";
        char num[48];
        for (long shot = 0; shot < cfg.shots; ++shot) {
            const LadderSample run = conditional_sample(spec, strategy, shot_seed(cfg.seed, shot));
            csv += std::to_string(shot);
            for (const auto& lm : run.record) csv += "," + std::to_string(lm.outcome);
            std::snprintf(num, sizeof num, ",%.17g\n", run.probability);
            csv += num;
        }
        emit(cfg, csv);
        return 0;
    }

    const MeasurementQuery q = ladder_query_from_json(jq, true);
    const double prob = joint_probability(spec, q);
    char line[64];
    std::snprintf(line, sizeof line, "%.17g\n", prob);
    emit(cfg, line);
    return 0;
}

// --- lemma3 ---------------------------------------------------------------------

int cmd_lemma3(const RunConfig& cfg) {
    std::vector<int> dims;
    for (const std::string& arg : cfg.inputs) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            dims.push_back(v);
        } catch (const std::exception&) {
            std::fprintf(stderr, "lemma3: '%s' is not an integer\n", arg.c_str());
            return 2;
        }
    }
    const double f = dims.size() == 1 ? verify_lemma3(dims[0]) : verify_lemma3(dims[0], dims[1]);
    const double tol = tol_or(cfg, 1e-12);
    const bool pass = f >= 1.0 - tol;
    std::string out;
    char line[96];
    std::snprintf(line, sizeof line, "fidelity: %.17g\n", f);
    out += line;
    out += pass ? "verdict: PASS\n" : "verdict: FAIL\n";
    emit(cfg, out);
    return pass ? 0 : 1;
}

// --- tqc-check ------------------------------------------------------------------

struct CheckSink {
    std::string out;
    int failures = 0;

    void record(const std::string& name, bool pass, double measured) {
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %s (measured %.3e)\n", pass ? "PASS" : "FAIL",
                      name.c_str(), measured);
        out += line;
        if (!pass) ++failures;
    }
};

// Worst branch infidelity of the corrected pattern output against
// `expected` applied to the inputs, over basis probes plus the uniform one,
// together with the worst deviation of a branch probability from 2^-m.
struct PatternLaw {
    double max_infidelity = 0.0;
    double max_prob_dev = 0.0;
};

PatternLaw check_pattern_law(const MeasurementPattern& p, const ComplexMatrix& expected) {
    const std::size_t k = p.inputs.size();
    const double uniform = 1.0 / static_cast<double>(std::size_t{1} << p.instructions.size());
    PatternLaw law;
    std::vector<QubitState> probes;
    for (std::size_t b = 0; b < (std::size_t{1} << k); ++b) {
        QubitState e(static_cast<int>(k));
        e.amps.assign(e.dim(), cplx{0.0, 0.0});
        e.amps[b] = cplx{1.0, 0.0};
        probes.push_back(std::move(e));
    }
    QubitState plus(static_cast<int>(k));
    plus.amps.assign(plus.dim(), cplx{1.0 / std::sqrt(static_cast<double>(plus.dim())), 0.0});
    probes.push_back(std::move(plus));

    std::vector<int> all_targets(k);
    for (std::size_t i = 0; i < k; ++i) all_targets[i] = static_cast<int>(i);
    for (const QubitState& probe : probes) {
        const QubitState want = apply_unitary(probe, expected, all_targets);
        lazy_enumerate(p, probe, [&](const RunResult& r) {
            law.max_infidelity =
                std::max(law.max_infidelity,
                         1.0 - fidelity_up_to_phase(corrected_output(r, p.outputs), want));
            law.max_prob_dev = std::max(law.max_prob_dev, std::abs(r.probability - uniform));
        });
    }
    return law;
}

double scheme_branch_infidelity(const TeleportScheme& s, const ComplexMatrix& gate,
                                const dvec& input, double& prob_dev) {
    const auto branches = teleport_branches(s, gate, input);
    int n = 0;
    while ((1 << n) < s.d) ++n;
    QubitState want(n, input, true);
    want = apply_unitary(want.normalized(), gate, [&] {
        std::vector<int> t(n);
        for (int i = 0; i < n; ++i) t[i] = i;
        return t;
    }());
    double worst = 0.0;
    prob_dev = 0.0;
    const double uniform = 1.0 / static_cast<double>(s.ops.size());
    for (const auto& b : branches) {
        prob_dev = std::max(prob_dev, std::abs(b.probability - uniform));
        if (!b.residual) return 1.0;  // branch law requires a Pauli residue
        const QubitState got(n, b.output, true);
        const QubitState fixed = pauli_apply(*b.residual, want);
        worst = std::max(worst, 1.0 - fidelity_up_to_phase(got.normalized(), fixed));
    }
    return worst;
}

int cmd_tqc_check(const RunConfig& cfg) {
    const double tol_f = tol_or(cfg, 1e-9);   // infidelity bound
    const double tol_p = 1e-10;               // probability bound
    CheckSink sink;

    sink.record("bell scheme completeness", validate_povm(bell_scheme()), 0.0);
    sink.record("cz4 scheme completeness", validate_povm(cz4_scheme()), 0.0);

    {
        const dvec input = {cplx{0.6, 0.0}, cplx{0.0, 0.8}};
        double pdev = 0.0;
        const double inf = scheme_branch_infidelity(bell_scheme(), identity2(), input, pdev);
        sink.record("bell scheme branch law", inf <= tol_f && pdev <= tol_p, inf);
        double rdev = 0.0;
        const double rinf =
            scheme_branch_infidelity(rotated_bell_scheme(rx(0.7)), rx(0.7), input, rdev);
        sink.record("rotated bell scheme teleports rx", rinf <= tol_f && rdev <= tol_p, rinf);
    }
    {
        dvec input = {cplx{0.5, 0.0}, cplx{0.1, -0.3}, cplx{0.0, 0.7}, cplx{0.2, 0.2}};
        double norm = 0.0;
        for (const auto& a : input) norm += std::norm(a);
        for (auto& a : input) a /= std::sqrt(norm);
        double pdev = 0.0;
        const double inf = scheme_branch_infidelity(cz4_scheme(), cz(), input, pdev);
        sink.record("cz4 scheme branch law", inf <= tol_f && pdev <= tol_p, inf);
    }
    sink.record("three-bond pairing search", cz3_search_bonds().has_value(), 0.0);

    const auto law_check = [&](const char* name, const MeasurementPattern& p,
                               const ComplexMatrix& expected) {
        const PatternLaw law = check_pattern_law(p, expected);
        sink.record(name, law.max_infidelity <= tol_f && law.max_prob_dev <= 1e-12,
                    law.max_infidelity);
    };
    law_check("wire pattern is the identity", pattern_wire(), identity2());
    law_check("single step realizes W(-theta)", pattern_single_step(0.9), w_gate(-0.9));
    law_check("euler pattern realizes rx rz rx", pattern_euler({0.3, 1.1, -0.7}),
              rx(-0.7) * rz(1.1) * rx(0.3));
    law_check("x-rotation pattern adapts its angle", pattern_rx(0.8), rx(0.8));
    law_check("grid pattern realizes CZ", pattern_cz_grid(), cz());

    for (int len : {2, 3, 4}) {
        const double f = verify_lemma3(len);
        sink.record("bond grid line " + std::to_string(len), f >= 1.0 - 1e-12, 1.0 - f);
    }
    {
        const double f = verify_lemma3(2, 2);
        sink.record("bond grid 2x2", f >= 1.0 - 1e-12, 1.0 - f);
    }
    {
        MeasurementQuery q;
        q.items = {{1, MeasBasis::M, 0.0, 0}};
        const double pr = joint_probability(cluster_ladder(3), q);
        sink.record("cluster ladder uniformity", std::abs(pr - 0.5) <= 1e-12,
                    std::abs(pr - 0.5));
    }

    sink.out += sink.failures == 0 ? "verdict: PASS\n" : "verdict: FAIL\n";
    emit(cfg, sink.out);
    return sink.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"measurement-pattern compiler and simulator"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* compile_cmd = app.add_subcommand("compile", "compile a circuit to a pattern");
    compile_cmd->add_option("circuit", cfg.inputs, "circuit JSON file")->expected(1)->required();
    compile_cmd->add_flag("--two-layer", cfg.two_layer, "use the two-layer rotation schedule");
    compile_cmd->add_option("--out", cfg.out, "directory for pattern/schedule/depth JSON");

    CLI::App* verify_cmd = app.add_subcommand("verify", "branch-exhaustive verification");
    verify_cmd->add_option("input", cfg.inputs, "circuit or pattern JSON file")
        ->expected(1)
        ->required();
    verify_cmd->add_option("--tolerance", cfg.tolerance, "override the pass tolerance");
    verify_cmd->add_option("--out", cfg.out, "write the report here instead of stdout");

    CLI::App* sample_cmd = app.add_subcommand("sample", "sample measurement outcomes");
    sample_cmd->add_option("pattern", cfg.inputs, "pattern JSON file")->expected(1)->required();
    sample_cmd->add_option("--seed", cfg.seed, "RNG seed")->required();
    sample_cmd->add_option("--shots", cfg.shots, "number of shots");
    sample_cmd->add_option("--out", cfg.out, "write the CSV here instead of stdout");

    CLI::App* ladder_cmd = app.add_subcommand("ladder", "ladder joint probability or samples");
    ladder_cmd->add_option("spec", cfg.inputs, "ladder spec and query JSON files")
        ->expected(2)
        ->required();
    ladder_cmd->add_option("--mode", cfg.mode, "branch (joint probability) or sample")
        ->check(CLI::IsMember({"branch", "exhaustive", "sample"}));
    ladder_cmd->add_option("--seed", cfg.seed, "RNG seed (sample mode)");
    ladder_cmd->add_option("--shots", cfg.shots, "number of shots (sample mode)");
    ladder_cmd->add_option("--out", cfg.out, "write the result here instead of stdout");

    CLI::App* lemma3_cmd = app.add_subcommand("lemma3", "bond-grid cluster fidelity");
    lemma3_cmd->add_option("dims", cfg.inputs, "1D length, or 2D rows cols")
        ->expected(1, 2)
        ->required();
    lemma3_cmd->add_option("--tolerance", cfg.tolerance, "override the pass tolerance");
    lemma3_cmd->add_option("--out", cfg.out, "write the report here instead of stdout");

    CLI::App* check_cmd = app.add_subcommand("tqc-check", "run the built-in self test");
    check_cmd->add_option("--tolerance", cfg.tolerance, "override the fidelity tolerance");
    check_cmd->add_option("--out", cfg.out, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    cfg.seed_set = sample_cmd->count("--seed") > 0 || ladder_cmd->count("--seed") > 0;

    try {
        if (compile_cmd->parsed()) {
            cfg.command = "compile";
            return cmd_compile(cfg);
        }
        if (verify_cmd->parsed()) {
            cfg.command = "verify";
            return cmd_verify(cfg);
        }
        if (sample_cmd->parsed()) {
            cfg.command = "sample";
            return cmd_sample(cfg);
        }
        if (ladder_cmd->parsed()) {
            cfg.command = "ladder";
            return cmd_ladder(cfg);
        }
        if (lemma3_cmd->parsed()) {
            cfg.command = "lemma3";
            return cmd_lemma3(cfg);
        }
        cfg.command = "tqc-check";
        return cmd_tqc_check(cfg);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s: %s\n", cfg.command.c_str(), e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", cfg.command.c_str(), e.what());
        return 2;
    }
}
