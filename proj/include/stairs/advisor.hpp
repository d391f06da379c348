#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stairs/model.hpp"
#include "stairs/staircase.hpp"

namespace stairs {

enum class PruneRationale { kParetoEdge, kBudgetFit, kAccuracyFloor };

const char* to_string(PruneRationale rationale);

// A recommended channel count for one layer, with the latency the
// analyzed curve predicts for it and the speedup against the unpruned
// (maximum-channel) configuration of that curve.
struct PruneRecommendation {
    std::string layer_id;
    int target_channels = 0;
    double predicted_latency_ms = 0.0;
    double speedup_vs_base = 1.0;
    PruneRationale rationale = PruneRationale::kParetoEdge;

    bool operator==(const PruneRecommendation&) const = default;
};

// Estimated accuracy in [0,1] for (layer_id, target_channels). Must be
// deterministic for the duration of one advisory run.
using AccuracyOracle = std::function<double(const std::string&, int)>;

// Synthetic stand-in oracle for demos and tests: accuracy scales linearly
// with the retained channel fraction. Real accuracy estimation requires
// retraining infrastructure and is injected by the caller.
AccuracyOracle linear_toy_oracle(int base_channels);

// Points (channels, latency) not dominated by any other curve point:
// nothing with at least as many channels is strictly faster, and nothing
// with strictly more channels is at least as fast. Sorted by descending
// channels; latency strictly decreases along the front.
std::vector<std::pair<int, double>> pareto_front(const LatencyCurve& curve);

// Largest-channel Pareto point whose latency fits the budget.
PruneRecommendation recommend_for_budget(const LatencyCurve& curve, double latency_budget_ms);

// Minimum-latency Pareto point whose oracle accuracy reaches the floor;
// ties break toward more channels.
PruneRecommendation recommend_with_accuracy(const LatencyCurve& curve,
                                            const AccuracyOracle& oracle, double min_accuracy);

// Default per-layer pick: the largest-channel Pareto point strictly
// faster than the base configuration, or the base itself when pruning
// never helps.
PruneRecommendation recommend_pareto_edge(const LatencyCurve& curve);

struct LayerAdvice {
    PruneRecommendation recommendation;
    std::vector<DistanceInterval> slowdown_warnings;

    bool operator==(const LayerAdvice&) const = default;
};

// Per-layer recommendations plus slowdown warnings for a whole network.
// Layers without a curve are listed as skipped, not failed.
struct NetworkReport {
    std::vector<LayerAdvice> layers;
    std::vector<std::string> skipped_layer_ids;

    bool operator==(const NetworkReport&) const = default;
};

struct AdvisorOptions {
    std::optional<double> latency_budget_ms;
    std::optional<double> min_accuracy;
    AccuracyOracle oracle; // required when min_accuracy is set
};

NetworkReport network_report(const NetworkModel& network,
                             const std::map<std::string, LatencyCurve>& curves,
                             const AdvisorOptions& options = {});

} // namespace stairs
