#include "stairs/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>

#include "stairs/advisor.hpp"
#include "stairs/dispatch.hpp"
#include "stairs/error.hpp"
#include "stairs/io.hpp"
#include "stairs/model.hpp"
#include "stairs/prune.hpp"
#include "stairs/staircase.hpp"

namespace stairs {

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw error("cannot write '" + path.string() + "'");
    }
    out << content;
}

// FNV-1a, used to derive deterministic per-sample jitter.
std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

struct SweepArgs {
    std::string network;
    std::string layer;
    int min_channels = 1;
    int step = 1;
    std::string out;
};

int cmd_sweep(const SweepArgs& args) {
    const NetworkModel network = builtin_network(args.network);
    const auto it = std::find_if(network.layers.begin(), network.layers.end(),
                                 [&](const ConvLayerSpec& l) { return l.layer_id == args.layer; });
    if (it == network.layers.end()) {
        throw lookup_error("network '" + args.network + "' has no layer '" + args.layer + "'");
    }
    const auto configs = sweep_configs(*it, args.min_channels, args.step);
    write_file(args.out, configs_to_json(configs));
    std::cerr << "sweep: " << configs.size() << " configurations -> " << args.out << "\n";
    return 0;
}

struct EmulateArgs {
    std::string configs;
    std::string profile;
    std::string method = "gemm";
    int runs = 1;
    double jitter = 0.0;
    std::string out;
};

int cmd_emulate(const EmulateArgs& args) {
    const auto configs = configs_from_json(
        [&] {
            std::ifstream in(args.configs, std::ios::binary);
            if (!in) throw parse_error("cannot open '" + args.configs + "'");
            return std::string(std::istreambuf_iterator<char>(in), {});
        }());
    const ProfileConfig profile = load_profile(args.profile);
    const ConvMethod method = conv_method_from_string(args.method);

    MeasurementFile file;
    file.device_label = profile.device_label;
    for (const auto& spec : configs) {
        const double latency = emulate_latency(spec, method, profile.cost, profile.device);
        for (int run = 0; run < args.runs; ++run) {
            double value = latency;
            if (args.jitter > 0.0) {
                const std::uint64_t h = fnv1a(spec.layer_id + "/" +
                                              std::to_string(spec.out_channels) + "/" +
                                              std::to_string(run));
                const double unit = static_cast<double>(h % 20001) / 10000.0 - 1.0;
                value *= 1.0 + args.jitter * unit;
            }
            file.samples.push_back(LatencySample{spec.layer_id, spec.out_channels, run, value});
        }
    }
    write_file(args.out, serialize_measurements(file));
    std::cerr << "emulate: " << file.samples.size() << " samples (" << args.method << ") -> "
              << args.out << "\n";
    return 0;
}

struct IngestArgs {
    std::string measurements;
    std::string out;
};

int cmd_ingest(const IngestArgs& args) {
    const MeasurementFile file = load_measurements(args.measurements);
    if (file.samples.empty()) {
        throw analysis_error("measurement file holds no samples");
    }

    // Group per layer, preserving first-appearance order.
    std::vector<std::string> order;
    std::map<std::string, std::vector<LatencySample>> groups;
    for (const auto& sample : file.samples) {
        auto [it, inserted] = groups.try_emplace(sample.layer_id);
        if (inserted) order.push_back(sample.layer_id);
        it->second.push_back(sample);
    }

    std::vector<LatencyCurve> curves;
    curves.reserve(order.size());
    for (const auto& layer_id : order) {
        curves.push_back(aggregate_median(groups.at(layer_id)));
    }
    write_file(args.out, serialize_curves(curves));
    std::cerr << "ingest: " << curves.size() << " curve(s) from device '" << file.device_label
              << "' -> " << args.out << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string curves;
    double rel_tol = 0.03;
    int regimes = 0; // 0 disables the interleaved-regime pass
    std::string out_dir;
};

struct LayerAnalysis {
    std::vector<Plateau> plateaus;
    std::vector<std::pair<int, double>> optima;
    SpeedupMap speedups;
    std::optional<RegimeAssignment> regimes;
};

LayerAnalysis analyze_one(const LatencyCurve& curve, double rel_tol, int regimes) {
    LayerAnalysis analysis;
    analysis.plateaus = detect_plateaus(curve, rel_tol);
    analysis.optima = optimal_points(analysis.plateaus);
    analysis.speedups = speedup_map(curve, curve.points.rbegin()->first);
    if (regimes >= 1) {
        analysis.regimes = regime_split(curve, regimes);
    }
    return analysis;
}

int cmd_analyze(const AnalyzeArgs& args) {
    const auto curves = load_curves(args.curves);

    // Layers are independent; analyze them concurrently and join in order.
    std::vector<std::future<LayerAnalysis>> futures;
    futures.reserve(curves.size());
    for (const auto& curve : curves) {
        futures.push_back(std::async(std::launch::async,
                                     [&curve, rel_tol = args.rel_tol, regimes = args.regimes] {
                                         return analyze_one(curve, rel_tol, regimes);
                                     }));
    }

    std::string plateau_csv = "layer_id,start_channels,end_channels,level_ms\n";
    std::string optima_csv = "layer_id,channels,level_ms\n";
    std::string speedup_csv = "layer_id,baseline_channels,distance,speedup\n";
    std::string regime_csv = "layer_id,out_channels,regime\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const std::string& id = curves[i].layer_id;
        const LayerAnalysis analysis = futures[i].get();
        for (const auto& p : analysis.plateaus) {
            plateau_csv += id + ',' + std::to_string(p.start_channels) + ',' +
                           std::to_string(p.end_channels) + ',' + format_double(p.level_ms) + '\n';
        }
        for (const auto& [channels, level] : analysis.optima) {
            optima_csv += id + ',' + std::to_string(channels) + ',' + format_double(level) + '\n';
        }
        for (const auto& [distance, speedup] : analysis.speedups.entries) {
            speedup_csv += id + ',' + std::to_string(analysis.speedups.baseline_channels) + ',' +
                           std::to_string(distance) + ',' + format_double(speedup) + '\n';
        }
        if (analysis.regimes) {
            for (const auto& [channels, label] : analysis.regimes->labels) {
                regime_csv += id + ',' + std::to_string(channels) + ',' + std::to_string(label) +
                              '\n';
            }
        }
    }

    const fs::path dir(args.out_dir);
    write_file(dir / "plateaus.csv", plateau_csv);
    write_file(dir / "optimal_points.csv", optima_csv);
    write_file(dir / "speedups.csv", speedup_csv);
    if (args.regimes >= 1) {
        write_file(dir / "regimes.csv", regime_csv);
    }
    std::cerr << "analyze: " << curves.size() << " layer(s) -> " << args.out_dir << "\n";
    return 0;
}

struct AdviseArgs {
    std::string curves;
    std::optional<double> budget_ms;
    std::optional<double> min_accuracy;
    std::string out_dir;
};

int cmd_advise(const AdviseArgs& args) {
    if (args.budget_ms && args.min_accuracy) {
        throw error("pass either --budget-ms or --min-accuracy, not both");
    }
    const auto curves = load_curves(args.curves);

    std::vector<std::future<LayerAdvice>> futures;
    futures.reserve(curves.size());
    for (const auto& curve : curves) {
        futures.push_back(std::async(std::launch::async, [&curve, &args] {
            PruneRecommendation rec;
            if (args.budget_ms) {
                rec = recommend_for_budget(curve, *args.budget_ms);
            } else if (args.min_accuracy) {
                const int base = curve.points.rbegin()->first;
                rec = recommend_with_accuracy(curve, linear_toy_oracle(base), *args.min_accuracy);
            } else {
                rec = recommend_pareto_edge(curve);
            }
            const int baseline = curve.points.rbegin()->first;
            return LayerAdvice{rec, slowdown_regions(speedup_map(curve, baseline))};
        }));
    }

    // The CSV keeps exact values; the text report rounds for reading.
    auto rounded = [](double value) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4g", value);
        return std::string(buf);
    };

    std::string csv = "layer_id,target_channels,predicted_latency_ms,speedup_vs_base,rationale\n";
    std::string text = "Channel pruning advisory\n========================\n";
    if (args.min_accuracy) {
        text += "(accuracy estimated by the built-in linear toy oracle)\n";
    }
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const LayerAdvice advice = futures[i].get();
        const auto& rec = advice.recommendation;
        csv += rec.layer_id + ',' + std::to_string(rec.target_channels) + ',' +
               format_double(rec.predicted_latency_ms) + ',' +
               format_double(rec.speedup_vs_base) + ',' + to_string(rec.rationale) + '\n';

        const int baseline = curves[i].points.rbegin()->first;
        text += "\n" + rec.layer_id + ": keep " + std::to_string(rec.target_channels) + " of " +
                std::to_string(baseline) + " channels, predicted " +
                rounded(rec.predicted_latency_ms) + " ms (" + rounded(rec.speedup_vs_base) +
                "x vs base, " + to_string(rec.rationale) + ")\n";
        if (advice.slowdown_warnings.empty()) {
            text += "  no slowdown regions\n";
        } else {
            for (const auto& region : advice.slowdown_warnings) {
                text += "  warning: pruning " + std::to_string(region.first) +
                        (region.first == region.last ? ""
                                                     : ".." + std::to_string(region.last)) +
                        " channels runs SLOWER than the base configuration\n";
            }
        }
    }

    const fs::path dir(args.out_dir);
    write_file(dir / "recommendations.csv", csv);
    write_file(dir / "report.txt", text);
    std::cerr << "advise: " << curves.size() << " recommendation(s) -> " << args.out_dir << "\n";
    return 0;
}

struct ReportArgs {
    std::string speedups;
    std::string network;
    std::string format = "csv";
    std::vector<int> distances;
    std::string out;
};

int cmd_report(const ReportArgs& args) {
    std::ifstream in(args.speedups, std::ios::binary);
    if (!in) throw parse_error("cannot open '" + args.speedups + "'");
    const std::string text(std::istreambuf_iterator<char>(in), {});

    // Re-assemble per-layer speedup maps from the analyze output.
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::pair<std::string, SpeedupMap>> maps;
    std::map<std::string, std::size_t> index;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line_no == 1) {
            if (line != "layer_id,baseline_channels,distance,speedup") {
                throw parse_error("expected analyze speedups.csv header", line_no);
            }
            continue;
        }
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string id, baseline, distance, speedup;
        if (!std::getline(row, id, ',') || !std::getline(row, baseline, ',') ||
            !std::getline(row, distance, ',') || !std::getline(row, speedup)) {
            throw parse_error("malformed speedup row", line_no);
        }
        auto [it, inserted] = index.try_emplace(id, maps.size());
        if (inserted) {
            maps.emplace_back(id, SpeedupMap{});
        }
        SpeedupMap& map = maps[it->second].second;
        try {
            map.baseline_channels = std::stoi(baseline);
            map.entries[std::stoi(distance)] = std::stod(speedup);
        } catch (const std::exception&) {
            throw parse_error("malformed speedup row", line_no);
        }
    }
    if (maps.empty()) {
        throw analysis_error("speedups file holds no entries");
    }

    if (!args.network.empty()) {
        // Reorder rows to the network's layer order, keeping only layers
        // that were analyzed.
        const NetworkModel network = builtin_network(args.network);
        std::vector<std::pair<std::string, SpeedupMap>> ordered;
        for (const auto& layer : network.layers) {
            if (auto it = index.find(layer.layer_id); it != index.end()) {
                ordered.push_back(maps[it->second]);
            }
        }
        maps = std::move(ordered);
    }

    const HeatmapGrid grid =
        build_heatmap(maps, args.distances.empty() ? default_heatmap_distances() : args.distances);
    if (args.format == "csv") {
        write_file(args.out, heatmap_to_csv(grid));
    } else if (args.format == "svg") {
        write_file(args.out, heatmap_to_svg(grid));
    } else {
        throw error("unknown format '" + args.format + "' (expected csv or svg)");
    }
    std::cerr << "report: " << grid.layer_ids.size() << " row(s) -> " << args.out << "\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Staircase-aware channel pruning toolkit"};
    app.require_subcommand(1);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Generate a pruning sweep for one layer");
    sweep_cmd->add_option("--network", sweep.network, "Built-in network name")->required();
    sweep_cmd->add_option("--layer", sweep.layer, "Layer id within the network")->required();
    sweep_cmd->add_option("--min-channels", sweep.min_channels, "Smallest channel count");
    sweep_cmd->add_option("--step", sweep.step, "Channels removed per step");
    sweep_cmd->add_option("--out", sweep.out, "Output config JSON path")->required();

    EmulateArgs emulate;
    auto* emulate_cmd =
        app.add_subcommand("emulate", "Synthesize measurements for swept configurations");
    emulate_cmd->add_option("configs", emulate.configs, "Sweep config JSON")->required();
    emulate_cmd->add_option("--profile", emulate.profile, "Device profile path")->required();
    emulate_cmd->add_option("--method", emulate.method, "gemm, direct, or tvm");
    emulate_cmd->add_option("--runs", emulate.runs, "Timed runs per configuration")
        ->check(CLI::PositiveNumber);
    emulate_cmd->add_option("--jitter", emulate.jitter,
                            "Deterministic relative jitter amplitude across runs");
    emulate_cmd->add_option("--out", emulate.out, "Output measurement CSV path")->required();

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Aggregate measurements into latency curves");
    ingest_cmd->add_option("measurements", ingest.measurements, "Measurement CSV")->required();
    ingest_cmd->add_option("--out", ingest.out, "Output curve CSV path")->required();

    AnalyzeArgs analyze;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Detect plateaus, optimal points, and speedups");
    analyze_cmd->add_option("curves", analyze.curves, "Curve CSV")->required();
    analyze_cmd->add_option("--rel-tol", analyze.rel_tol, "Relative plateau tolerance");
    analyze_cmd->add_option("--regimes", analyze.regimes,
                            "Also split each curve into this many interleaved regimes");
    analyze_cmd->add_option("--out", analyze.out_dir, "Output directory")->required();

    AdviseArgs advise;
    auto* advise_cmd = app.add_subcommand("advise", "Recommend pruning levels per layer");
    advise_cmd->add_option("curves", advise.curves, "Curve CSV")->required();
    advise_cmd->add_option("--budget-ms", advise.budget_ms, "Latency budget per layer");
    advise_cmd->add_option("--min-accuracy", advise.min_accuracy,
                           "Accuracy floor (toy linear oracle)");
    advise_cmd->add_option("--out", advise.out_dir, "Output directory")->required();

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Render a speedup heatmap");
    report_cmd->add_option("speedups", report.speedups, "speedups.csv from analyze")->required();
    report_cmd->add_option("--network", report.network, "Order rows by this built-in network");
    report_cmd->add_option("--format", report.format, "csv or svg");
    report_cmd->add_option("--distances", report.distances, "Prune-distance columns")
        ->delimiter(',');
    report_cmd->add_option("--out", report.out, "Output path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep_cmd->parsed()) return cmd_sweep(sweep);
        if (emulate_cmd->parsed()) return cmd_emulate(emulate);
        if (ingest_cmd->parsed()) return cmd_ingest(ingest);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze);
        if (advise_cmd->parsed()) return cmd_advise(advise);
        if (report_cmd->parsed()) return cmd_report(report);
    } catch (const stairs::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

} // namespace stairs
