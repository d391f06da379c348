#pragma once

#include <map>
#include <span>
#include <vector>

#include "stairs/model.hpp"

namespace stairs {

// Maximal contiguous channel range sharing one latency level. level_ms is
// the median of the member points.
struct Plateau {
    int start_channels = 0;
    int end_channels = 0;
    double level_ms = 0.0;

    bool operator==(const Plateau&) const = default;
};

// Per-distance speedup relative to a baseline configuration:
// entries[d] = T(baseline) / T(baseline - d). Values below 1 mean the
// pruned layer runs slower than the baseline.
struct SpeedupMap {
    int baseline_channels = 0;
    std::map<int, double> entries;

    bool operator==(const SpeedupMap&) const = default;
};

// Closed interval of prune distances.
struct DistanceInterval {
    int first = 0;
    int last = 0;

    bool operator==(const DistanceInterval&) const = default;
};

// Per-point regime labels for curves that interleave several staircases.
// Labels are 0..regime_count-1 ordered by ascending local latency level.
struct RegimeAssignment {
    std::map<int, int> labels;
    int regime_count = 0;

    bool operator==(const RegimeAssignment&) const = default;
};

// Collapses repeated runs into one curve point per channel count using
// the median; even-sized groups take the mean of the two middle values.
// All samples must belong to one layer.
LatencyCurve aggregate_median(std::span<const LatencySample> samples);

// Greedy left-to-right segmentation into maximal runs whose members all
// sit within rel_tol (relative) of the running median. Runs cover every
// point; boundary ties attach to the left run.
std::vector<Plateau> detect_plateaus(const LatencyCurve& curve, double rel_tol = 0.03);

// Right edge of each plateau: the largest channel count per latency
// level, i.e. the pruning targets worth considering.
std::vector<std::pair<int, double>> optimal_points(const std::vector<Plateau>& plateaus);

// Speedup at every prune distance reachable within the curve. The
// baseline must be a curve point.
SpeedupMap speedup_map(const LatencyCurve& curve, int baseline_channels);

// Maximal runs of consecutive map distances whose speedup is below 1.
std::vector<DistanceInterval> slowdown_regions(const SpeedupMap& map);

// Assigns each curve point to one of k latency regimes by clustering the
// latencies in a sliding channel window (1-D k-medians, exact). Labels
// are ordered by level within the window, so interleaved staircases come
// out as stable per-regime classes.
RegimeAssignment regime_split(const LatencyCurve& curve, int regime_count);

} // namespace stairs
