// Round-trip and strictness tests for the JSON interchange formats, plus
// loads of the committed fixtures under data/.

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "mbqc/json_io.hpp"
#include "mbqc/random.hpp"

using namespace mbqc;

namespace {

const std::string kData = MBQC_DATA_DIR;

bool same_parity(const ParitySet& a, const ParitySet& b) { return a == b; }

}  // namespace

TEST_CASE("complex matrices survive a serialize-parse round trip exactly") {
    Rng rng(11);
    const ComplexMatrix u = rng.haar_unitary(4);
    const njson j = njson::parse(matrix_to_json(u).dump());
    REQUIRE(matrix_from_json(j).max_abs_diff(u) == 0.0);

    REQUIRE_THROWS_AS(complex_from_json(njson::array({1.0})), std::invalid_argument);
    REQUIRE_THROWS_AS(matrix_from_json(njson::array()), std::invalid_argument);
    const njson ragged = njson::parse("[[[1,0],[0,0]],[[0,0]]]");
    REQUIRE_THROWS_AS(matrix_from_json(ragged), std::invalid_argument);
}

TEST_CASE("circuits round trip and reject malformed input") {
    Circuit c;
    c.n = 3;
    c.gates = {Gate::make(GateKind::H, {0}), Gate::make(GateKind::S, {2}),
               Gate::make(GateKind::RotX, {1}, 0.5), Gate::make(GateKind::CX, {0, 2}),
               Gate::make(GateKind::W, {2}, -2.25)};
    const Circuit back = circuit_from_json(njson::parse(circuit_to_json(c).dump()));
    REQUIRE(back.n == c.n);
    REQUIRE(back.gates.size() == c.gates.size());
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        REQUIRE(back.gates[i].kind == c.gates[i].kind);
        REQUIRE(back.gates[i].targets == c.gates[i].targets);
        REQUIRE(back.gates[i].theta == c.gates[i].theta);
    }

    REQUIRE_THROWS_AS(circuit_from_json(njson::parse(R"({"gates": []})")),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        circuit_from_json(njson::parse(R"({"n": 1, "gates": [{"kind": "Q", "targets": [0]}]})")),
        std::invalid_argument);
    // theta on a fixed gate, and a missing theta on a rotation, are both errors.
    REQUIRE_THROWS_AS(
        circuit_from_json(
            njson::parse(R"({"n": 1, "gates": [{"kind": "H", "theta": 1.0, "targets": [0]}]})")),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        circuit_from_json(njson::parse(R"({"n": 1, "gates": [{"kind": "Rx", "targets": [0]}]})")),
        std::invalid_argument);
    // Out-of-range target fails Circuit::validate.
    REQUIRE_THROWS_AS(
        circuit_from_json(njson::parse(R"({"n": 1, "gates": [{"kind": "H", "targets": [4]}]})")),
        std::invalid_argument);
}

TEST_CASE("patterns round trip with frames and dependencies intact") {
    Circuit c;
    c.n = 2;
    c.gates = {Gate::make(GateKind::RotX, {0}, 0.8), Gate::make(GateKind::CX, {0, 1}),
               Gate::make(GateKind::RotZ, {1}, -0.3)};
    const MeasurementPattern p = compile(c);
    const MeasurementPattern back = pattern_from_json(njson::parse(pattern_to_json(p).dump()));

    REQUIRE(back.graph.sites == p.graph.sites);
    REQUIRE(back.graph.edges == p.graph.edges);
    REQUIRE(back.inputs == p.inputs);
    REQUIRE(back.outputs == p.outputs);
    REQUIRE(back.instructions.size() == p.instructions.size());
    for (std::size_t i = 0; i < p.instructions.size(); ++i) {
        REQUIRE(back.instructions[i].site == p.instructions[i].site);
        REQUIRE(back.instructions[i].basis == p.instructions[i].basis);
        REQUIRE(back.instructions[i].angle == p.instructions[i].angle);
        REQUIRE(back.instructions[i].id == p.instructions[i].id);
        REQUIRE(same_parity(back.instructions[i].sign_deps, p.instructions[i].sign_deps));
    }
    REQUIRE(back.frame.size() == p.frame.size());
    for (const auto& [site, e] : p.frame) {
        REQUIRE(same_parity(back.frame.at(site).x_deps, e.x_deps));
        REQUIRE(same_parity(back.frame.at(site).z_deps, e.z_deps));
    }

    njson bad = pattern_to_json(p);
    bad["frame"]["junk"] = njson{{"x_deps", njson::array()}, {"z_deps", njson::array()}};
    REQUIRE_THROWS_AS(pattern_from_json(bad), std::invalid_argument);

    njson orphan = pattern_to_json(p);
    orphan["instructions"][0]["site"] = 999;
    REQUIRE_THROWS_AS(pattern_from_json(orphan), std::invalid_argument);
}

TEST_CASE("schedules and depth reports serialize to stable shapes") {
    Circuit c;
    c.n = 1;
    c.gates = {Gate::make(GateKind::RotX, {0}, 0.8), Gate::make(GateKind::RotZ, {0}, -0.3)};
    const MeasurementPattern p = compile(c);
    const Schedule s = schedule(p, c.gates.size());
    const Schedule back = schedule_from_json(njson::parse(schedule_to_json(s).dump()));
    REQUIRE(back.layers == s.layers);
    REQUIRE(back.classical_steps.size() == s.classical_steps.size());
    for (std::size_t i = 0; i < s.classical_steps.size(); ++i) {
        REQUIRE(back.classical_steps[i].parities.size() == s.classical_steps[i].parities.size());
        for (std::size_t k = 0; k < s.classical_steps[i].parities.size(); ++k)
            REQUIRE(same_parity(back.classical_steps[i].parities[k],
                                s.classical_steps[i].parities[k]));
    }

    const njson jr = depth_report_to_json(depth_report(s));
    REQUIRE(jr.at("quantum_layers").get<std::size_t>() == s.layers.size());
    REQUIRE(jr.contains("classical_parity_depth"));
    REQUIRE(jr.at("gate_count").get<std::size_t>() == c.gates.size());
}

TEST_CASE("teleport schemes round trip and stay complete") {
    for (const TeleportScheme& s : {bell_scheme(), cz4_scheme()}) {
        const TeleportScheme back = scheme_from_json(njson::parse(scheme_to_json(s).dump()));
        REQUIRE(back.d == s.d);
        REQUIRE(back.ops.size() == s.ops.size());
        for (std::size_t i = 0; i < s.ops.size(); ++i)
            REQUIRE(back.ops[i].max_abs_diff(s.ops[i]) == 0.0);
        REQUIRE(validate_povm(back));
    }
}

TEST_CASE("ladder specs and queries round trip") {
    const LadderSpec spec = cluster_ladder(4);
    const LadderSpec back = ladder_from_json(njson::parse(ladder_to_json(spec).dump()));
    REQUIRE(back.n == spec.n);
    for (std::size_t i = 0; i < spec.unitaries.size(); ++i)
        REQUIRE(back.unitaries[i].max_abs_diff(spec.unitaries[i]) == 0.0);

    MeasurementQuery q;
    q.items = {{0, MeasBasis::M, 0.7, 1}, {2, MeasBasis::Mz, 0.0, 0}};
    const MeasurementQuery qback =
        ladder_query_from_json(njson::parse(ladder_query_to_json(q).dump()), true);
    REQUIRE(qback.items.size() == 2);
    REQUIRE(qback.items[0].line == 0);
    REQUIRE(qback.items[0].outcome == 1);
    REQUIRE(qback.items[1].basis == MeasBasis::Mz);

    // Sampling queries carry no outcomes; fixing one is an error.
    REQUIRE_THROWS_AS(ladder_query_from_json(ladder_query_to_json(q, true), false),
                      std::invalid_argument);
    REQUIRE_NOTHROW(ladder_query_from_json(ladder_query_to_json(q, false), false));

    njson bad = ladder_to_json(spec);
    bad["unitaries"][0][0][0] = njson::array({2.0, 0.0});
    REQUIRE_THROWS_AS(ladder_from_json(bad), std::invalid_argument);
}

TEST_CASE("bond grids round trip") {
    const BondGrid g = rect_grid(2, 3);
    const BondGrid back = grid_from_json(njson::parse(grid_to_json(g).dump()));
    REQUIRE(back.site_arity == g.site_arity);
    REQUIRE(back.bonds.size() == g.bonds.size());
    double diff = 0.0;
    const QubitState a = build_grid_state(g);
    const QubitState b = build_grid_state(back);
    for (std::size_t i = 0; i < a.amps.size(); ++i)
        diff = std::max(diff, std::abs(a.amps[i] - b.amps[i]));
    REQUIRE(diff == 0.0);

    njson bad = grid_to_json(g);
    bad["bonds"][0][1] = 9;  // slot outside the site arity
    REQUIRE_THROWS_AS(grid_from_json(bad), std::invalid_argument);
}

TEST_CASE("committed fixtures parse and validate") {
    const MeasurementPattern euler = pattern_from_json(load_json_file(kData + "/pattern_euler.json"));
    REQUIRE(euler.graph.sites.size() == 5);
    REQUIRE(euler.instructions.size() == 4);

    const MeasurementPattern corrupted =
        pattern_from_json(load_json_file(kData + "/pattern_euler_corrupted.json"));
    REQUIRE(corrupted.instructions[3].sign_deps.empty());
    REQUIRE_FALSE(euler.instructions[3].sign_deps.empty());

    const Circuit demo = circuit_from_json(load_json_file(kData + "/circuit_demo.json"));
    REQUIRE(demo.n == 3);
    REQUIRE(demo.gates.size() == 6);

    REQUIRE(validate_povm(scheme_from_json(load_json_file(kData + "/scheme_bell.json"))));
    REQUIRE(validate_povm(scheme_from_json(load_json_file(kData + "/scheme_cz4.json"))));

    const LadderSpec cluster3 = ladder_from_json(load_json_file(kData + "/ladder_cluster3.json"));
    const MeasurementQuery eq =
        ladder_query_from_json(load_json_file(kData + "/ladder_query_equatorial.json"), true);
    REQUIRE(joint_probability(cluster3, eq) == Catch::Approx(0.5).margin(1e-12));

    const BondGrid line = grid_from_json(load_json_file(kData + "/grid_line4.json"));
    REQUIRE(line.site_arity.size() == 4);

    REQUIRE_THROWS_AS(load_json_file(kData + "/does_not_exist.json"), std::invalid_argument);
}

TEST_CASE("atomic writes land complete or not at all") {
    const std::string path = "test_json_io_tmp.json";
    write_file_atomic(path, "{\"ok\": true}\n");
    const njson j = load_json_file(path);
    REQUIRE(j.at("ok").get<bool>());
    std::remove(path.c_str());
    REQUIRE_THROWS_AS(write_file_atomic("/nonexistent_dir_xyz/file.json", "x"),
                      std::runtime_error);
}
