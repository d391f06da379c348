#include <doctest.h>

#include <cmath>
#include <random>

#include "stairs/error.hpp"
#include "stairs/io.hpp"

using namespace stairs;

TEST_CASE("a three-row measurement file parses in order") {
    const std::string text =
        "# device=hikey970\n"
        "layer_id,out_channels,run_index,latency_ms\n"
        "ResNet.L16,96,0,14.2\n"
        "ResNet.L16,96,1,14.5\n"
        "ResNet.L16,95,0,14.1\n";
    const auto file = parse_measurements(text);
    CHECK(file.device_label == "hikey970");
    REQUIRE(file.samples.size() == 3);
    CHECK(file.samples[0] == LatencySample{"ResNet.L16", 96, 0, 14.2});
    CHECK(file.samples[2] == LatencySample{"ResNet.L16", 95, 0, 14.1});
}

TEST_CASE("negative latency is rejected with its line") {
    const std::string text =
        "layer_id,out_channels,run_index,latency_ms\n"
        "l16,96,0,-1.0\n";
    CHECK_THROWS_WITH_AS(parse_measurements(text),
                         doctest::Contains("line 2"), validation_error);
}

TEST_CASE("malformed rows carry line numbers") {
    const std::string text =
        "layer_id,out_channels,run_index,latency_ms\n"
        "l16,96,0,1.0\n"
        "l16,not_a_number,0,1.0\n";
    try {
        parse_measurements(text);
        FAIL("expected parse error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("wrong header is rejected") {
    CHECK_THROWS_AS(parse_measurements("layer,chan,run,ms\nl,1,0,1\n"), parse_error);
    CHECK_THROWS_AS(parse_measurements(""), parse_error);
}

TEST_CASE("measurement serialization round-trips content") {
    std::mt19937 rng(997);
    MeasurementFile file;
    file.device_label = "board-a";
    for (int i = 0; i < 200; ++i) {
        file.samples.push_back(
            LatencySample{"L" + std::to_string(i % 7),
                          std::uniform_int_distribution<int>(1, 2048)(rng), i % 10,
                          std::uniform_real_distribution<double>(0.001, 500.0)(rng)});
    }
    CHECK(parse_measurements(serialize_measurements(file)) == file);
}

TEST_CASE("curve files round-trip and preserve layer order") {
    std::vector<LatencyCurve> curves = {
        {"b_first", {{8, 1.5}, {16, 2.25}}},
        {"a_second", {{4, 0.125}, {6, 3.0}}},
    };
    const auto parsed = parse_curves(serialize_curves(curves));
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0] == curves[0]);
    CHECK(parsed[1] == curves[1]);
}

TEST_CASE("an empty curve file is an analysis error") {
    CHECK_THROWS_AS(parse_curves("layer_id,out_channels,latency_ms\n"), analysis_error);
    CHECK_THROWS_AS(parse_curves(""), analysis_error);
}

TEST_CASE("sweep config JSON round-trips") {
    std::vector<ConvLayerSpec> configs;
    for (int c = 128; c >= 120; --c) {
        configs.push_back(make_layer_spec("ResNet.L16", 128, c, 3, 3, 28, 28, 1, 1));
    }
    CHECK(configs_from_json(configs_to_json(configs)) == configs);
}

TEST_CASE("profile config parses every section") {
    const std::string text = R"(
# demo profile
device.label = hikey970-sim
device.ns_per_arith_instr = 0.004
device.ns_per_mem_instr = 0.02
device.job_overhead_ms = 2.0
device.tvm_direct_channels = 70 71 72

workgroup.default = 1 1 8
workgroup.channels.90 = 2 1 8
workgroup.channels.92 = 4 1 1
workgroup.penalty.2x1x8 = 1.0
workgroup.penalty.1x1x8 = 1.17

split.vector_width = 4
split.main_tile = 16
split.merge_full_tile_remainder = true

gemm.im2col_arith_slope = 13836
gemm.im2col_arith_intercept = 92286
gemm.im2col_mem_slope = 2306
gemm.im2col_mem_intercept = 0
gemm.reshape_arith_const = 44183104
gemm.reshape_mem_const = 3615808
gemm.gemm_arith_unit = 8833916
gemm.gemm_mem_unit = 453348

direct.base_arith_instr = 500000000
direct.base_mem_instr = 75000000
direct.ref_channels = 90
)";
    const auto profile = parse_profile(text);
    CHECK(profile.device_label == "hikey970-sim");
    CHECK(profile.device.ns_per_arith_instr == 0.004);
    CHECK(profile.device.job_overhead_ms == 2.0);
    CHECK(profile.device.tvm_direct_channels == std::set<int>{70, 71, 72});
    CHECK(profile.device.workgroup_policy.by_channels.at(90) == WorkGroupSize{2, 1, 8});
    CHECK(profile.device.workgroup_policy.fallback == WorkGroupSize{1, 1, 8});
    CHECK(profile.device.workgroup_policy.penalty.at({1, 1, 8}) == 1.17);
    CHECK(profile.cost.split.main_tile == 16);
    REQUIRE(profile.cost.gemm.has_value());
    CHECK(profile.cost.gemm->gemm_arith_unit == 8833916);
    REQUIRE(profile.cost.direct.has_value());
    CHECK(profile.cost.direct->ref_channels == 90);
}

TEST_CASE("unknown profile keys are rejected") {
    CHECK_THROWS_AS(parse_profile("device.ns_per_arith_instr = 1\n"
                                  "device.ns_per_mem_instr = 1\n"
                                  "device.warp_size = 32\n"),
                    parse_error);
}

TEST_CASE("profile validation catches bad rates and penalties") {
    CHECK_THROWS_AS(parse_profile("device.ns_per_arith_instr = 0\n"
                                  "device.ns_per_mem_instr = 1\n"),
                    validation_error);
    CHECK_THROWS_AS(parse_profile("device.ns_per_arith_instr = 1\n"
                                  "device.ns_per_mem_instr = 1\n"
                                  "workgroup.penalty.1x1x8 = 1.1\n"),
                    validation_error);
}

TEST_CASE("a one-cell heatmap renders the documented CSV shape") {
    SpeedupMap map{2036, {{12, 2.57}}};
    const auto grid = build_heatmap({{"ResNet.L45", map}}, {12});
    CHECK(heatmap_to_csv(grid) == "layer_id,12\nResNet.L45,2.57\n");
}

TEST_CASE("missing distances produce empty CSV fields and no SVG cell") {
    SpeedupMap map{100, {{1, 2.0}}};
    const auto grid = build_heatmap({{"L", map}}, {1, 4});
    CHECK(heatmap_to_csv(grid) == "layer_id,1,4\nL,2,\n");

    const auto svg = heatmap_to_svg(grid);
    // One colored cell only.
    std::size_t rects = 0;
    for (std::size_t pos = 0; (pos = svg.find("<rect", pos)) != std::string::npos; ++pos) {
        ++rects;
    }
    CHECK(rects == 2); // background + one cell
}

TEST_CASE("an all-ones grid renders uniformly neutral") {
    SpeedupMap map{64, {{1, 1.0}, {4, 1.0}}};
    const auto grid = build_heatmap({{"A", map}, {"B", map}}, {1, 4});
    const auto svg = heatmap_to_svg(grid);
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = svg.find("fill=\"#f7f7f7\"", pos)) != std::string::npos;
         ++pos) {
        ++count;
    }
    CHECK(count == 4);
    CHECK(svg.find("xmlns=\"http://www.w3.org/2000/svg\"") != std::string::npos);
}

TEST_CASE("slowdown cells are tinted differently from speedups") {
    SpeedupMap map{64, {{1, 0.5}, {4, 2.0}}};
    const auto grid = build_heatmap({{"A", map}}, {1, 4});
    const auto svg = heatmap_to_svg(grid);
    // Equal log-distance from 1, so the two cells use the full ranges of
    // the diverging palette: red-ish for the slowdown, blue-ish for the
    // speedup.
    CHECK(svg.find("fill=\"#b2182b\"") != std::string::npos);
    CHECK(svg.find("fill=\"#2166ac\"") != std::string::npos);
}

TEST_CASE("heatmap CSV re-parses to the same values") {
    std::mt19937 rng(1201);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<std::string, SpeedupMap>> maps;
        const int layers = std::uniform_int_distribution<int>(1, 6)(rng);
        for (int l = 0; l < layers; ++l) {
            SpeedupMap map{512, {}};
            for (int d : default_heatmap_distances()) {
                if (std::bernoulli_distribution(0.7)(rng)) {
                    map.entries[d] = std::uniform_real_distribution<double>(0.1, 8.0)(rng);
                }
            }
            maps.emplace_back("L" + std::to_string(l), map);
        }
        const auto grid = build_heatmap(maps);
        const auto reparsed = heatmap_from_csv(heatmap_to_csv(grid));
        REQUIRE(reparsed.layer_ids == grid.layer_ids);
        REQUIRE(reparsed.distances == grid.distances);
        for (std::size_t r = 0; r < grid.cells.size(); ++r) {
            for (std::size_t c = 0; c < grid.cells[r].size(); ++c) {
                REQUIRE(reparsed.cells[r][c].has_value() == grid.cells[r][c].has_value());
                if (grid.cells[r][c]) {
                    CHECK(std::abs(*reparsed.cells[r][c] - *grid.cells[r][c]) <= 1e-9);
                }
            }
        }
    }
}

TEST_CASE("shortest double formatting round-trips exactly") {
    std::mt19937 rng(1301);
    for (int trial = 0; trial < 2000; ++trial) {
        const double value = std::uniform_real_distribution<double>(1e-6, 1e6)(rng);
        CHECK(std::stod(format_double(value)) == value);
    }
    CHECK(format_double(2.57) == "2.57");
    CHECK(format_double(1.0) == "1");
}
