#include "stairs/staircase.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "stairs/error.hpp"

namespace stairs {

namespace {

double median_sorted(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

} // namespace

LatencyCurve aggregate_median(std::span<const LatencySample> samples) {
    if (samples.empty()) {
        throw analysis_error("cannot aggregate an empty sample set");
    }
    const std::string& layer_id = samples.front().layer_id;
    std::map<int, std::vector<double>> groups;
    for (const auto& sample : samples) {
        if (sample.layer_id != layer_id) {
            throw validation_error("mixed layer ids in one aggregation: '" + layer_id +
                                   "' vs '" + sample.layer_id + "'");
        }
        if (!(sample.latency_ms > 0.0) || !std::isfinite(sample.latency_ms)) {
            throw validation_error("sample latency must be finite and > 0");
        }
        groups[sample.out_channels].push_back(sample.latency_ms);
    }

    LatencyCurve curve{layer_id, {}};
    for (auto& [channels, runs] : groups) {
        std::sort(runs.begin(), runs.end());
        curve.points[channels] = median_sorted(runs);
    }
    validate_curve(curve);
    return curve;
}

std::vector<Plateau> detect_plateaus(const LatencyCurve& curve, double rel_tol) {
    validate_curve(curve);
    if (curve.points.size() < 2) {
        throw validation_error("plateau detection needs at least two curve points");
    }
    if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
        throw range_error("rel_tol must lie in (0, 1)");
    }

    std::vector<std::pair<int, double>> points(curve.points.begin(), curve.points.end());

    std::vector<Plateau> plateaus;
    std::size_t start = 0;
    while (start < points.size()) {
        // Grow the run while every member stays within rel_tol of the
        // run median recomputed after each candidate.
        std::vector<double> sorted{points[start].second};
        std::size_t end = start + 1;
        while (end < points.size()) {
            const double candidate = points[end].second;
            auto pos = std::lower_bound(sorted.begin(), sorted.end(), candidate);
            sorted.insert(pos, candidate);
            const double med = median_sorted(sorted);
            const double band = rel_tol * med;
            const bool fits = std::abs(sorted.front() - med) <= band &&
                              std::abs(sorted.back() - med) <= band;
            if (!fits) {
                sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), candidate));
                break;
            }
            ++end;
        }
        plateaus.push_back(
            Plateau{points[start].first, points[end - 1].first, median_sorted(sorted)});
        start = end;
    }
    return plateaus;
}

std::vector<std::pair<int, double>> optimal_points(const std::vector<Plateau>& plateaus) {
    if (plateaus.empty()) {
        throw analysis_error("optimal points need a non-empty plateau list");
    }
    std::vector<std::pair<int, double>> points;
    points.reserve(plateaus.size());
    for (const auto& plateau : plateaus) {
        points.emplace_back(plateau.end_channels, plateau.level_ms);
    }
    return points;
}

SpeedupMap speedup_map(const LatencyCurve& curve, int baseline_channels) {
    validate_curve(curve);
    const auto base = curve.points.find(baseline_channels);
    if (base == curve.points.end()) {
        throw validation_error("baseline " + std::to_string(baseline_channels) +
                               " is not a point of curve '" + curve.layer_id + "'");
    }

    SpeedupMap map{baseline_channels, {}};
    map.entries[0] = 1.0;
    for (const auto& [channels, latency] : curve.points) {
        if (channels < baseline_channels) {
            map.entries[baseline_channels - channels] = base->second / latency;
        }
    }
    return map;
}

std::vector<DistanceInterval> slowdown_regions(const SpeedupMap& map) {
    if (map.entries.empty()) {
        throw analysis_error("slowdown regions need a non-empty speedup map");
    }
    std::vector<DistanceInterval> regions;
    bool open = false;
    for (const auto& [distance, speedup] : map.entries) {
        if (speedup < 1.0) {
            if (!open) {
                regions.push_back(DistanceInterval{distance, distance});
                open = true;
            } else {
                regions.back().last = distance;
            }
        } else {
            open = false;
        }
    }
    return regions;
}

namespace {

// Exact 1-D k-medians over sorted values: dynamic program over contiguous
// clusters. Returns the k-1 boundary positions (index of first element of
// each cluster after the first).
std::vector<std::size_t> cluster_boundaries(std::span<const double> sorted, int k) {
    const std::size_t n = sorted.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sorted[i];

    // Absolute deviation of sorted[a..b] around its lower median.
    auto segment_cost = [&](std::size_t a, std::size_t b) {
        const std::size_t h = a + (b - a) / 2;
        const double upper = (prefix[b + 1] - prefix[h + 1]) -
                             sorted[h] * static_cast<double>(b - h);
        const double lower = sorted[h] * static_cast<double>(h - a) - (prefix[h] - prefix[a]);
        return upper + lower;
    };

    constexpr double kInf = std::numeric_limits<double>::infinity();
    // best[j][i]: cost of splitting the first i values into j clusters.
    std::vector<std::vector<double>> best(static_cast<std::size_t>(k) + 1,
                                          std::vector<double>(n + 1, kInf));
    std::vector<std::vector<std::size_t>> cut(static_cast<std::size_t>(k) + 1,
                                              std::vector<std::size_t>(n + 1, 0));
    best[0][0] = 0.0;
    for (int j = 1; j <= k; ++j) {
        for (std::size_t i = 1; i <= n; ++i) {
            for (std::size_t s = static_cast<std::size_t>(j) - 1; s < i; ++s) {
                if (best[j - 1][s] == kInf) continue;
                const double cost = best[j - 1][s] + segment_cost(s, i - 1);
                if (cost < best[j][i]) {
                    best[j][i] = cost;
                    cut[j][i] = s;
                }
            }
        }
    }

    std::vector<std::size_t> boundaries;
    std::size_t i = n;
    for (int j = k; j > 1; --j) {
        i = cut[j][i];
        boundaries.push_back(i);
    }
    std::sort(boundaries.begin(), boundaries.end());
    return boundaries;
}

int label_for(double value, std::span<const double> sorted,
              std::span<const std::size_t> boundaries) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), value) - sorted.begin());
    int label = 0;
    for (std::size_t boundary : boundaries) {
        if (pos >= boundary) ++label;
    }
    return label;
}

} // namespace

RegimeAssignment regime_split(const LatencyCurve& curve, int regime_count) {
    validate_curve(curve);
    if (regime_count < 1) {
        throw range_error("regime count must be >= 1");
    }
    const std::size_t n = curve.points.size();
    if (n < 2 * static_cast<std::size_t>(regime_count)) {
        throw validation_error("regime split needs at least 2k curve points");
    }

    std::vector<std::pair<int, double>> points(curve.points.begin(), curve.points.end());

    RegimeAssignment assignment{{}, regime_count};
    if (regime_count == 1) {
        for (const auto& [channels, latency] : points) assignment.labels[channels] = 0;
        return assignment;
    }

    {
        std::vector<double> values;
        values.reserve(n);
        for (const auto& [channels, latency] : points) values.push_back(latency);
        std::sort(values.begin(), values.end());
        const auto distinct = static_cast<std::size_t>(
            std::unique(values.begin(), values.end()) - values.begin());
        if (distinct < static_cast<std::size_t>(regime_count)) {
            throw analysis_error("degenerate clustering: " + std::to_string(regime_count) +
                                 " regimes but only " + std::to_string(distinct) +
                                 " distinct latency levels");
        }
    }

    const std::size_t radius = static_cast<std::size_t>(4 * regime_count);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i > radius ? i - radius : 0;
        std::size_t hi = std::min(n - 1, i + radius);

        // Widen until the window holds enough distinct levels to support
        // the requested regime count.
        std::vector<double> window;
        for (;;) {
            window.clear();
            for (std::size_t t = lo; t <= hi; ++t) window.push_back(points[t].second);
            std::sort(window.begin(), window.end());
            const auto distinct = static_cast<std::size_t>(
                std::unique(window.begin(), window.end()) - window.begin());
            if (distinct >= static_cast<std::size_t>(regime_count) || (lo == 0 && hi == n - 1)) {
                break;
            }
            lo = lo > 0 ? lo - 1 : 0;
            hi = std::min(n - 1, hi + 1);
        }
        std::sort(window.begin(), window.end());

        const std::vector<std::size_t> boundaries = cluster_boundaries(window, regime_count);
        assignment.labels[points[i].first] = label_for(points[i].second, window, boundaries);
    }
    return assignment;
}

} // namespace stairs
