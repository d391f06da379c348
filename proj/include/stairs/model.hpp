#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

namespace stairs {

// Geometry of one convolutional layer. Weights and tensors are out of
// scope; the toolkit reasons about shapes only.
struct ConvLayerSpec {
    std::string layer_id;
    int in_channels = 0;
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    int input_h = 0;
    int input_w = 0;
    int stride = 1;
    int padding = 0;

    auto operator<=>(const ConvLayerSpec&) const = default;
};

// Validates all geometry invariants and returns the spec.
// Throws validation_error for non-positive counts and geometry_error when
// (input + 2*padding - kernel) is not divisible by stride in either
// dimension. Flooring is deliberately not applied: a geometry that does
// not tile exactly would silently skew the cost model.
ConvLayerSpec make_layer_spec(std::string layer_id,
                              int in_channels, int out_channels,
                              int kernel_h, int kernel_w,
                              int input_h, int input_w,
                              int stride, int padding);

// Output spatial extent, exact by construction for validated specs.
int output_h(const ConvLayerSpec& spec);
int output_w(const ConvLayerSpec& spec);

struct NetworkModel {
    std::string name;
    std::vector<ConvLayerSpec> layers;

    bool operator==(const NetworkModel&) const = default;
};

// Validates layer-id uniqueness and per-layer geometry.
NetworkModel make_network(std::string name, std::vector<ConvLayerSpec> layers);

// Built-in layer tables for the supported architectures:
// "vgg16", "alexnet", "resnet50". Layer ids follow the profiling
// convention of indexing by position among the network's named layers
// (e.g. ResNet.L16), with repeated shapes listed once under their first
// index. Unknown names throw lookup_error.
NetworkModel builtin_network(const std::string& name);

// One timed run of one layer configuration.
struct LatencySample {
    std::string layer_id;
    int out_channels = 0;
    int run_index = 0;
    double latency_ms = 0.0;

    bool operator==(const LatencySample&) const = default;
};

// Aggregated latency per channel count for one layer. Keys of `points`
// are out_channels, strictly increasing by map order.
struct LatencyCurve {
    std::string layer_id;
    std::map<int, double> points;

    bool operator==(const LatencyCurve&) const = default;
};

// Checks curve invariants: every latency finite and positive.
void validate_curve(const LatencyCurve& curve);

// JSON-text serialization of the documented schema
// {name, layers:[{layer_id,in_channels,...}]}.
std::string network_to_json(const NetworkModel& network);
NetworkModel network_from_json(const std::string& text);

} // namespace stairs
