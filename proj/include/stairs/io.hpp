#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stairs/dispatch.hpp"
#include "stairs/model.hpp"
#include "stairs/staircase.hpp"

namespace stairs {

// Shortest decimal representation that round-trips the exact value.
std::string format_double(double value);

// Raw measurement file: '#'-prefixed key=value metadata lines (device
// label), the exact header "layer_id,out_channels,run_index,latency_ms",
// then one row per timed run.
struct MeasurementFile {
    std::string device_label = "unknown";
    std::vector<LatencySample> samples;

    bool operator==(const MeasurementFile&) const = default;
};

MeasurementFile parse_measurements(const std::string& text);
MeasurementFile load_measurements(const std::filesystem::path& path);
std::string serialize_measurements(const MeasurementFile& file);

// Curve files: "layer_id,out_channels,latency_ms", one file holding the
// aggregated curves of any number of layers. Order of curves follows
// first appearance in the file.
std::vector<LatencyCurve> parse_curves(const std::string& text);
std::vector<LatencyCurve> load_curves(const std::filesystem::path& path);
std::string serialize_curves(const std::vector<LatencyCurve>& curves);

// Sweep configuration files: a JSON array of layer-spec objects using the
// same field names as the network schema.
std::string configs_to_json(const std::vector<ConvLayerSpec>& configs);
std::vector<ConvLayerSpec> configs_from_json(const std::string& text);

// Full emulation profile: device timing plus the cost model, loaded from
// a key/value text config with dotted section prefixes (device.*,
// split.*, workgroup.*, gemm.*, direct.*).
struct ProfileConfig {
    std::string device_label = "unknown";
    DeviceProfile device;
    ConvCostModel cost;

    bool operator==(const ProfileConfig&) const = default;
};

ProfileConfig parse_profile(const std::string& text);
ProfileConfig load_profile(const std::filesystem::path& path);

// Prune-distance columns used by the published speedup heatmaps.
const std::vector<int>& default_heatmap_distances();

// Speedup-per-distance grid. cells[row][col] is empty when the layer's
// speedup map has no entry at that distance.
struct HeatmapGrid {
    std::vector<std::string> layer_ids;
    std::vector<int> distances;
    std::vector<std::vector<std::optional<double>>> cells;

    bool operator==(const HeatmapGrid&) const = default;
};

HeatmapGrid build_heatmap(const std::vector<std::pair<std::string, SpeedupMap>>& maps,
                          const std::vector<int>& distances = default_heatmap_distances());

std::string heatmap_to_csv(const HeatmapGrid& grid);
HeatmapGrid heatmap_from_csv(const std::string& text);

// Self-contained SVG (inline styles only): log-scale diverging colors
// with speedup 1 as the neutral midpoint, slowdown cells tinted red.
std::string heatmap_to_svg(const HeatmapGrid& grid);

} // namespace stairs
