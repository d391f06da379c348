#include "stairs/prune.hpp"

#include "stairs/error.hpp"

namespace stairs {

ConvLayerSpec prune_channels(const PruneRequest& request) {
    const auto& base = request.base;
    const int n = base.out_channels;

    for (int index : request.pruned_indices) {
        if (index < 1 || index > n) {
            throw validation_error("layer '" + base.layer_id + "': prune index " +
                                   std::to_string(index) + " outside 1.." + std::to_string(n));
        }
    }
    const int pruned = static_cast<int>(request.pruned_indices.size());
    if (pruned >= n) {
        throw validation_error("layer '" + base.layer_id + "': pruning all " + std::to_string(n) +
                               " channels leaves an empty layer");
    }

    // Survivors re-index to 1..n-pruned, so the shape is fully described
    // by the remaining count.
    ConvLayerSpec result = base;
    result.out_channels = n - pruned;
    return result;
}

std::vector<ConvLayerSpec> sweep_configs(const ConvLayerSpec& base, int min_channels, int step) {
    if (min_channels < 1) {
        throw range_error("sweep: min_channels must be >= 1");
    }
    if (min_channels > base.out_channels) {
        throw range_error("sweep: min_channels " + std::to_string(min_channels) +
                          " exceeds base out_channels " + std::to_string(base.out_channels));
    }
    if (step < 1) {
        throw range_error("sweep: step must be >= 1");
    }

    std::vector<ConvLayerSpec> configs;
    for (int channels = base.out_channels; channels >= min_channels; channels -= step) {
        ConvLayerSpec spec = base;
        spec.out_channels = channels;
        configs.push_back(std::move(spec));
    }
    return configs;
}

} // namespace stairs
