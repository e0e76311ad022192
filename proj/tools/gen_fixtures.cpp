// Regenerates the JSON fixtures under data/. Deterministic: no RNG, fixed
// angles, so reruns are byte-identical. Usage: gen_fixtures [out_dir]
// (default "data").

#include <cstdio>
#include <filesystem>
#include <string>

#include "mbqc/json_io.hpp"

using namespace mbqc;

namespace {

void dump(const std::string& dir, const std::string& name, const njson& j) {
    write_file_atomic(dir + "/" + name, j.dump(2) + "\n");
    std::printf("wrote %s/%s\n", dir.c_str(), name.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";
    std::filesystem::create_directories(dir);

    // Measurement-pattern fixtures.
    const MeasurementPattern euler = pattern_euler({0.3, 1.1, -0.7});
    dump(dir, "pattern_euler.json", pattern_to_json(euler));

    // Negative control: same pattern with the last instruction's angle-sign
    // dependencies dropped, so branches with s1 xor s3 = 1 use the wrong
    // angle and verification must fail.
    MeasurementPattern corrupted = euler;
    corrupted.instructions[3].sign_deps = {};
    dump(dir, "pattern_euler_corrupted.json", pattern_to_json(corrupted));

    dump(dir, "pattern_wire.json", pattern_to_json(pattern_wire()));

    // Circuit fixtures.
    Circuit demo;
    demo.n = 3;
    demo.gates = {
        Gate::make(GateKind::H, {0}),
        Gate::make(GateKind::CX, {0, 1}),
        Gate::make(GateKind::RotX, {2}, 0.5),
        Gate::make(GateKind::CZ, {1, 2}),
        Gate::make(GateKind::RotZ, {0}, -0.9),
        Gate::make(GateKind::W, {1}, 1.2),
    };
    dump(dir, "circuit_demo.json", circuit_to_json(demo));

    Circuit clifford;
    clifford.n = 3;
    clifford.gates = {
        Gate::make(GateKind::H, {0}),
        Gate::make(GateKind::CX, {0, 1}),
        Gate::make(GateKind::S, {1}),
        Gate::make(GateKind::Z, {2}),
        Gate::make(GateKind::CX, {1, 2}),
        Gate::make(GateKind::H, {2}),
    };
    dump(dir, "circuit_clifford.json", circuit_to_json(clifford));

    Circuit cxrx;
    cxrx.n = 2;
    cxrx.gates = {
        Gate::make(GateKind::RotX, {0}, 0.4),
        Gate::make(GateKind::CX, {0, 1}),
        Gate::make(GateKind::RotX, {1}, -1.1),
    };
    dump(dir, "circuit_cxrx.json", circuit_to_json(cxrx));

    Circuit empty;
    empty.n = 2;
    dump(dir, "circuit_empty.json", circuit_to_json(empty));

    // Teleportation schemes.
    dump(dir, "scheme_bell.json", scheme_to_json(bell_scheme()));
    dump(dir, "scheme_cz4.json", scheme_to_json(cz4_scheme()));

    // Ladder fixtures.
    LadderSpec identity;
    identity.n = 2;
    identity.unitaries.push_back(ComplexMatrix::identity(4));
    dump(dir, "ladder_identity2.json", ladder_to_json(identity));
    dump(dir, "ladder_cluster3.json", ladder_to_json(cluster_ladder(3)));
    dump(dir, "ladder_cluster4.json", ladder_to_json(cluster_ladder(4)));

    MeasurementQuery ground;
    ground.items = {{1, MeasBasis::Mz, 0.0, 0}};
    dump(dir, "ladder_query_ground.json", ladder_query_to_json(ground));

    MeasurementQuery equatorial;
    equatorial.items = {{1, MeasBasis::M, 0.0, 0}};
    dump(dir, "ladder_query_equatorial.json", ladder_query_to_json(equatorial));

    MeasurementQuery open_lines;
    open_lines.items = {{0, MeasBasis::M, 0.7, 0}, {2, MeasBasis::Mz, 0.0, 0}};
    dump(dir, "ladder_query_sample.json", ladder_query_to_json(open_lines, false));

    // Bond-grid fixtures.
    dump(dir, "grid_line4.json", grid_to_json(line_grid(4)));
    dump(dir, "grid_rect23.json", grid_to_json(rect_grid(2, 3)));

    return 0;
}
