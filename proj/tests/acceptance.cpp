// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Each check pins its tolerance in code.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stairs/advisor.hpp"
#include "stairs/cli.hpp"
#include "stairs/dispatch.hpp"
#include "stairs/error.hpp"
#include "stairs/io.hpp"
#include "stairs/model.hpp"
#include "stairs/prune.hpp"
#include "stairs/staircase.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace stairs;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] %2d. %s%s%s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
                detail.empty() ? "" : ": ", detail.c_str());
    if (!ok) ++failures;
}

ConvLayerSpec layer16(int out_channels) {
    return make_layer_spec("ResNet.L16", 128, out_channels, 3, 3, 28, 28, 1, 1);
}

// Simulator instruction counts for layer 16 at 92 and 93 output channels
// (the calibration inputs) and at 96 and 97 (the held-out checks).
KernelCostBreakdown measured_92() {
    return {{{"im2col3x3_nhwc", 1365198, 212152},
             {"reshape_to_columns", 44183104, 3615808},
             {"gemm_mm", 706713280, 36267840},
             {"gemm_mm", 106006992, 5440176}}};
}
KernelCostBreakdown measured_93() {
    return {{{"im2col3x3_nhwc", 1379034, 214458},
             {"reshape_to_columns", 44183104, 3615808},
             {"gemm_mm", 848055936, 43521408}}};
}
KernelCostBreakdown measured_96() {
    return {{{"im2col3x3_nhwc", 1420542, 221376},
             {"reshape_to_columns", 44183104, 3615808},
             {"gemm_mm", 848055936, 43521408}}};
}
KernelCostBreakdown measured_97() {
    return {{{"im2col3x3_nhwc", 1434378, 223682},
             {"reshape_to_columns", 44183104, 3615808},
             {"gemm_mm", 848055936, 43521408},
             {"gemm_mm", 35335664, 1813392}}};
}

void criterion_1_table_reproduction() {
    bool ok = true;
    std::string detail;
    try {
        const auto coeffs = calibrate_gemm(measured_92(), 92, measured_93(), 93);
        ok = gemm_cost(layer16(96), coeffs) == measured_96() &&
             gemm_cost(layer16(97), coeffs) == measured_97();
        detail = "held-out 96/97-channel tables, integer-exact";
    } catch (const error& e) {
        ok = false;
        detail = e.what();
    }
    report(1, "table reproduction from 92/93-channel calibration", ok, detail);
}

void criterion_2_split_vectors() {
    bool ok = split_gemm_channels(92) == std::vector<int>{80, 12} &&
              split_gemm_channels(97) == std::vector<int>{96, 4};
    for (int c = 93; c <= 96; ++c) {
        ok = ok && split_gemm_channels(c) == std::vector<int>{96};
    }
    // Kernel-row counts of the four tables: 4, 3, 3, 4 rows, of which the
    // gemm rows are the split kernels.
    ok = ok && split_gemm_channels(92).size() == measured_92().kernels.size() - 2;
    ok = ok && split_gemm_channels(93).size() == measured_93().kernels.size() - 2;
    ok = ok && split_gemm_channels(96).size() == measured_96().kernels.size() - 2;
    ok = ok && split_gemm_channels(97).size() == measured_97().kernels.size() - 2;
    report(2, "split vectors [80,12] / [96] / [96,4] under defaults", ok);
}

void criterion_3_derived_ratios() {
    const auto coeffs = calibrate_gemm(measured_92(), 92, measured_93(), 93);
    auto gemm_total = [&](int c) {
        std::uint64_t total = 0;
        for (const auto& k : gemm_cost(layer16(c), coeffs).kernels) {
            if (k.kernel_name == "gemm_mm") total += k.arith_instr;
        }
        return static_cast<double>(total);
    };
    const double increase_pct = (gemm_total(93) - gemm_total(92)) / gemm_total(92) * 100.0;
    const auto at92 = gemm_cost(layer16(92), coeffs);
    const double second_share_pct =
        static_cast<double>(at92.kernels[3].arith_instr) / gemm_total(92) * 100.0;

    const bool ok =
        std::abs(increase_pct - 4.35) <= 0.01 && std::abs(second_share_pct - 13.0) <= 0.1;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "gemm growth %.4f%% (4.35 +/- 0.01), second kernel %.2f%% (13.0 +/- 0.1)",
                  increase_pct, second_share_pct);
    report(3, "derived instruction ratios", ok, detail);
}

void criterion_4_direct_relatives_and_workgroups() {
    const std::uint64_t base = 1000000000;
    auto relative_mills = [&](int c) {
        return std::llround(direct_cost(layer16(c), base, 90) /
                            direct_cost(layer16(90), base, 90) * 1000.0);
    };
    bool ok = std::abs(relative_mills(91) - 1011) <= 1 &&
              std::abs(relative_mills(92) - 1023) <= 1 &&
              std::abs(relative_mills(93) - 1034) <= 1;

    WorkGroupPolicy policy;
    policy.by_channels[90] = {2, 1, 8};
    policy.by_channels[91] = {1, 1, 8};
    policy.by_channels[92] = {4, 1, 1};
    policy.by_channels[93] = {1, 1, 8};
    ok = ok && select_workgroup(90, policy) == WorkGroupSize{2, 1, 8} &&
         select_workgroup(91, policy) == WorkGroupSize{1, 1, 8} &&
         select_workgroup(92, policy) == WorkGroupSize{4, 1, 1} &&
         select_workgroup(93, policy) == WorkGroupSize{1, 1, 8};
    report(4, "direct-convolution relatives (+/- 0.001) and work-group map", ok);
}

void criterion_5_speedup_figures() {
    LatencyCurve l45{"ResNet.L45", {{2024, 7.67}, {2036, 19.69}}};
    const double s45 = speedup_map(l45, 2036).entries.at(12);

    LatencyCurve l16{"ResNet.L16", {{76, 20.12}, {78, 10.996}}};
    const double s16_down = speedup_map(l16, 78).entries.at(2);
    const double s16_gap = 1.0 / s16_down;

    const bool ok = std::abs(s45 - 2.57) <= 0.01 && std::abs(s16_gap - 1.83) <= 0.01;
    char detail[96];
    std::snprintf(detail, sizeof(detail), "L45 %.4fx (2.57 +/- 0.01), L16 %.4fx (1.83 +/- 0.01)",
                  s45, s16_gap);
    report(5, "published speedup figures", ok, detail);
}

void criterion_6_job_counts() {
    bool ok = count_dispatched_jobs(layer16(92), ConvMethod::kGemm) == 4;
    for (int c = 93; c <= 96; ++c) {
        ok = ok && count_dispatched_jobs(layer16(c), ConvMethod::kGemm) == 3;
    }
    report(6, "dispatched job counts 4 at 92, 3 at 93..96", ok);
}

void criterion_7_staircase_recovery() {
    std::mt19937 rng(20240812);
    const double rel_tol = 0.03;
    int recovered = 0;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        const auto synthetic = testsupport::random_staircase(rng, rel_tol);
        const auto plateaus = detect_plateaus(synthetic.curve, rel_tol);
        bool match = plateaus.size() == synthetic.truth.size();
        if (match) {
            for (std::size_t i = 0; i < plateaus.size(); ++i) {
                match = match && plateaus[i].start_channels == synthetic.truth[i].start_channels &&
                        plateaus[i].end_channels == synthetic.truth[i].end_channels;
            }
            const auto points = optimal_points(plateaus);
            for (std::size_t i = 0; match && i < points.size(); ++i) {
                match = points[i].first == synthetic.truth[i].end_channels;
            }
        }
        if (match) ++recovered;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%d/%d exact recoveries", recovered, trials);
    report(7, "randomized staircase recovery", recovered == trials, detail);
}

void criterion_8_pruning_properties() {
    std::mt19937 rng(20240813);
    int checked = 0;
    bool ok = true;
    for (int trial = 0; trial < 10000 && ok; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 600)(rng);
        const int k = std::uniform_int_distribution<int>(0, n - 1)(rng);
        ConvLayerSpec base = layer16(n);

        auto pick = [&] {
            std::set<int> indices;
            std::uniform_int_distribution<int> dist(1, n);
            while (static_cast<int>(indices.size()) < k) indices.insert(dist(rng));
            return indices;
        };
        const auto a = prune_channels({base, pick()});
        const auto b = prune_channels({base, pick()});
        ok = a.out_channels == n - k && a == b;

        if (ok && trial % 10 == 0) {
            const int min_c = std::uniform_int_distribution<int>(1, n)(rng);
            const int step = std::uniform_int_distribution<int>(1, 7)(rng);
            for (const auto& spec : sweep_configs(base, min_c, step)) {
                try {
                    make_layer_spec(spec.layer_id, spec.in_channels, spec.out_channels,
                                    spec.kernel_h, spec.kernel_w, spec.input_h, spec.input_w,
                                    spec.stride, spec.padding);
                } catch (const error&) {
                    ok = false;
                    break;
                }
            }
        }
        ++checked;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%d random cases", checked);
    report(8, "pruning shape and index-invariance properties", ok, detail);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_9_pipeline_determinism() {
    const fs::path work = fs::temp_directory_path() / "stairs_acceptance_pipeline";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string profile = std::string(STAIRS_DATA_DIR) + "/layer16_gemm.profile";

    auto run_once = [&](const std::string& tag) {
        const fs::path dir = work / tag;
        fs::create_directories(dir);
        auto p = [&](const char* name) { return (dir / name).string(); };
        bool ok = run_cli({"sweep", "--network", "resnet50", "--layer", "ResNet.L16",
                           "--min-channels", "60", "--out", p("configs.json")}) == 0;
        ok = ok && run_cli({"emulate", p("configs.json"), "--profile", profile, "--runs", "10",
                            "--jitter", "0.01", "--out", p("measurements.csv")}) == 0;
        ok = ok && run_cli({"ingest", p("measurements.csv"), "--out", p("curves.csv")}) == 0;
        ok = ok && run_cli({"analyze", p("curves.csv"), "--rel-tol", "0.03", "--out",
                            (dir / "analysis").string()}) == 0;
        ok = ok && run_cli({"advise", p("curves.csv"), "--out", (dir / "advice").string()}) == 0;
        ok = ok && run_cli({"report", (dir / "analysis" / "speedups.csv").string(), "--format",
                            "csv", "--out", p("heatmap.csv")}) == 0;
        ok = ok && run_cli({"report", (dir / "analysis" / "speedups.csv").string(), "--format",
                            "svg", "--out", p("heatmap.svg")}) == 0;
        return ok;
    };

    bool ok = run_once("a") && run_once("b");
    const char* outputs[] = {"measurements.csv",
                             "curves.csv",
                             "analysis/plateaus.csv",
                             "analysis/optimal_points.csv",
                             "analysis/speedups.csv",
                             "advice/recommendations.csv",
                             "advice/report.txt",
                             "heatmap.csv",
                             "heatmap.svg"};
    for (const char* name : outputs) {
        if (!ok) break;
        const std::string a = slurp(work / "a" / name);
        const std::string b = slurp(work / "b" / name);
        ok = !a.empty() && a == b;
    }
    fs::remove_all(work);
    report(9, "pipeline determinism on the bundled layer-16 profile", ok,
           "byte-identical outputs across two runs");
}

void criterion_10_calibration_round_trip() {
    std::mt19937 rng(20240814);
    std::uniform_int_distribution<std::uint64_t> slope(0, 30000);
    std::uniform_int_distribution<std::uint64_t> intercept(0, 200000);
    std::uniform_int_distribution<std::uint64_t> reshape(0, 80000000);
    std::uniform_int_distribution<std::uint64_t> unit(1, 20000000);

    bool ok = true;
    int checked = 0;
    for (int trial = 0; trial < 1000 && ok; ++trial) {
        GemmCostCoefficients original;
        original.im2col_arith_slope = slope(rng);
        original.im2col_arith_intercept = intercept(rng);
        original.im2col_mem_slope = slope(rng);
        original.im2col_mem_intercept = intercept(rng);
        original.reshape_arith_const = reshape(rng);
        original.reshape_mem_const = reshape(rng);
        original.gemm_arith_unit = unit(rng);
        original.gemm_mem_unit = unit(rng);

        int cb;
        do {
            cb = std::uniform_int_distribution<int>(1, 1024)(rng);
        } while (split_gemm_channels(cb).size() != 1);
        int ca;
        do {
            ca = std::uniform_int_distribution<int>(1, 1024)(rng);
        } while (ca == cb);

        try {
            const auto recovered = calibrate_gemm(gemm_cost(layer16(ca), original), ca,
                                                  gemm_cost(layer16(cb), original), cb);
            ok = recovered == original;
        } catch (const error&) {
            ok = false;
        }
        ++checked;
    }
    char detail[64];
    std::snprintf(detail, sizeof(detail), "%d random coefficient sets, integer-exact", checked);
    report(10, "calibration round-trip", ok, detail);
}

} // namespace

int main() {
    criterion_1_table_reproduction();
    criterion_2_split_vectors();
    criterion_3_derived_ratios();
    criterion_4_direct_relatives_and_workgroups();
    criterion_5_speedup_figures();
    criterion_6_job_counts();
    criterion_7_staircase_recovery();
    criterion_8_pruning_properties();
    criterion_9_pipeline_determinism();
    criterion_10_calibration_round_trip();

    if (failures == 0) {
        std::printf("all 10 acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria FAILED\n", failures);
    return 1;
}
