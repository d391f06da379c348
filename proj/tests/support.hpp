#pragma once

#include <random>
#include <vector>

#include "stairs/model.hpp"
#include "stairs/staircase.hpp"

namespace stairs::testsupport {

struct SyntheticStaircase {
    LatencyCurve curve;              // noisy observation
    std::vector<Plateau> truth;      // generating boundaries and clean levels
};

// Random step function with 1..8 plateaus whose adjacent levels differ by
// at least a factor (1 + 5*rel_tol), observed with multiplicative noise of
// amplitude 0.4*rel_tol. Under these gaps greedy median segmentation at
// rel_tol recovers the generating boundaries exactly.
inline SyntheticStaircase random_staircase(std::mt19937& rng, double rel_tol) {
    const int plateau_count = std::uniform_int_distribution<int>(1, 8)(rng);
    const double ladder = 1.0 + 5.0 * rel_tol;
    const double noise_amp = 0.4 * rel_tol;

    // Levels live on a multiplicative ladder; a random walk over rungs
    // keeps every adjacent pair at least one rung apart.
    int rung = std::uniform_int_distribution<int>(4, 8)(rng);
    const double base_level = std::uniform_real_distribution<double>(1.0, 50.0)(rng);

    SyntheticStaircase out;
    int channel = 1;
    for (int p = 0; p < plateau_count; ++p) {
        // A lone one-point plateau would not be a curve worth analyzing.
        const int min_width = plateau_count == 1 ? 2 : 1;
        const int width = std::uniform_int_distribution<int>(min_width, 30)(rng);
        const double level = base_level * std::pow(ladder, rung);

        Plateau truth{channel, channel + width - 1, level};
        for (int c = truth.start_channels; c <= truth.end_channels; ++c) {
            const double unit = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
            out.curve.points[c] = level * (1.0 + noise_amp * unit);
        }
        out.truth.push_back(truth);
        channel = truth.end_channels + 1;

        int step = std::uniform_int_distribution<int>(1, 3)(rng);
        if (rung <= 2 || (rung < 12 && std::bernoulli_distribution(0.5)(rng))) {
            rung += step;
        } else {
            rung -= step;
        }
    }
    out.curve.layer_id = "synthetic";
    return out;
}

} // namespace stairs::testsupport
