#pragma once

#include <set>
#include <vector>

#include "stairs/model.hpp"

namespace stairs {

// Request to remove a set of channels from a layer. Indices are 1-based
// into the layer's channel index space, matching how pruned channels are
// usually reported. Set semantics: duplicates are impossible by
// construction, and the whole layer may never be pruned away.
struct PruneRequest {
    ConvLayerSpec base;
    std::set<int> pruned_indices;
};

// Removes the requested channels and re-indexes the survivors to a
// contiguous 1..new_n space. Only the channel count matters for the
// resulting shape: pruning {1,64,128} and {2,3,4} from a 128-channel
// layer yield value-equal specs.
ConvLayerSpec prune_channels(const PruneRequest& request);

// Descending pruning sweep: out_channels = base, base-step, ..., down to
// the last value >= min_channels. The base configuration is always first.
std::vector<ConvLayerSpec> sweep_configs(const ConvLayerSpec& base, int min_channels, int step);

} // namespace stairs
