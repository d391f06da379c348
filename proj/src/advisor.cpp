#include "stairs/advisor.hpp"

#include <algorithm>
#include <limits>

#include "stairs/error.hpp"

namespace stairs {

const char* to_string(PruneRationale rationale) {
    switch (rationale) {
        case PruneRationale::kParetoEdge: return "PARETO_EDGE";
        case PruneRationale::kBudgetFit: return "BUDGET_FIT";
        case PruneRationale::kAccuracyFloor: return "ACCURACY_FLOOR";
    }
    return "?";
}

AccuracyOracle linear_toy_oracle(int base_channels) {
    return [base_channels](const std::string&, int channels) {
        if (base_channels < 1) return 0.0;
        return std::clamp(static_cast<double>(channels) / base_channels, 0.0, 1.0);
    };
}

std::vector<std::pair<int, double>> pareto_front(const LatencyCurve& curve) {
    validate_curve(curve);
    if (curve.points.empty()) {
        throw analysis_error("pareto front of an empty curve");
    }

    // Descending channels: a point survives iff it is strictly faster
    // than everything with more channels.
    std::vector<std::pair<int, double>> front;
    double best_latency = std::numeric_limits<double>::infinity();
    for (auto it = curve.points.rbegin(); it != curve.points.rend(); ++it) {
        if (it->second < best_latency) {
            front.emplace_back(it->first, it->second);
            best_latency = it->second;
        }
    }
    return front;
}

namespace {

PruneRecommendation make_recommendation(const LatencyCurve& curve, int channels, double latency,
                                        PruneRationale rationale) {
    const double base_latency = curve.points.rbegin()->second;
    return PruneRecommendation{curve.layer_id, channels, latency, base_latency / latency,
                               rationale};
}

} // namespace

PruneRecommendation recommend_for_budget(const LatencyCurve& curve, double latency_budget_ms) {
    if (!(latency_budget_ms > 0.0)) {
        throw range_error("latency budget must be > 0");
    }
    const auto front = pareto_front(curve);
    for (const auto& [channels, latency] : front) {
        if (latency <= latency_budget_ms) {
            return make_recommendation(curve, channels, latency, PruneRationale::kBudgetFit);
        }
    }
    throw infeasible_error("no configuration of layer '" + curve.layer_id + "' fits within " +
                           std::to_string(latency_budget_ms) + " ms");
}

PruneRecommendation recommend_with_accuracy(const LatencyCurve& curve,
                                            const AccuracyOracle& oracle, double min_accuracy) {
    if (!oracle) {
        throw validation_error("accuracy oracle is required");
    }
    if (min_accuracy < 0.0) {
        throw range_error("accuracy floor must be >= 0");
    }
    // Floors above 1 fall through the scan: no oracle output can reach
    // them, so they surface as infeasible.

    // The front has strictly decreasing latency toward fewer channels, so
    // scanning it in order and keeping the last eligible point yields the
    // minimum-latency one; on (impossible) latency ties the earlier,
    // larger-channel point wins.
    const auto front = pareto_front(curve);
    const std::pair<int, double>* chosen = nullptr;
    for (const auto& point : front) {
        const double accuracy = oracle(curve.layer_id, point.first);
        if (accuracy < 0.0 || accuracy > 1.0) {
            throw validation_error("oracle returned accuracy outside [0, 1]");
        }
        if (accuracy >= min_accuracy && (chosen == nullptr || point.second < chosen->second)) {
            chosen = &point;
        }
    }
    if (chosen == nullptr) {
        throw infeasible_error("no configuration of layer '" + curve.layer_id +
                               "' reaches accuracy " + std::to_string(min_accuracy));
    }
    return make_recommendation(curve, chosen->first, chosen->second,
                               PruneRationale::kAccuracyFloor);
}

PruneRecommendation recommend_pareto_edge(const LatencyCurve& curve) {
    const auto front = pareto_front(curve);
    // front[0] is the base configuration; front[1], when present, is the
    // largest-channel point that actually beats it.
    const auto& pick = front.size() > 1 ? front[1] : front[0];
    return make_recommendation(curve, pick.first, pick.second, PruneRationale::kParetoEdge);
}

NetworkReport network_report(const NetworkModel& network,
                             const std::map<std::string, LatencyCurve>& curves,
                             const AdvisorOptions& options) {
    if (options.min_accuracy && !options.oracle) {
        throw validation_error("an accuracy floor requires an oracle");
    }

    NetworkReport report;
    for (const auto& layer : network.layers) {
        const auto it = curves.find(layer.layer_id);
        if (it == curves.end()) {
            report.skipped_layer_ids.push_back(layer.layer_id);
            continue;
        }
        const LatencyCurve& curve = it->second;

        PruneRecommendation recommendation;
        if (options.latency_budget_ms) {
            recommendation = recommend_for_budget(curve, *options.latency_budget_ms);
        } else if (options.min_accuracy) {
            recommendation = recommend_with_accuracy(curve, options.oracle, *options.min_accuracy);
        } else {
            recommendation = recommend_pareto_edge(curve);
        }

        const int baseline = curve.points.rbegin()->first;
        report.layers.push_back(
            LayerAdvice{recommendation, slowdown_regions(speedup_map(curve, baseline))});
    }
    return report;
}

} // namespace stairs
