#include "stairs/model.hpp"

#include <json.hpp>

#include <cmath>
#include <utility>

#include "stairs/error.hpp"

namespace stairs {

namespace {

int exact_output_extent(int input, int padding, int kernel, int stride,
                        const std::string& layer_id, const char* axis) {
    const int span = input + 2 * padding - kernel;
    if (span < 0) {
        throw geometry_error("layer '" + layer_id + "': kernel exceeds padded input along " + axis);
    }
    if (span % stride != 0) {
        throw geometry_error("layer '" + layer_id + "': (" + std::to_string(input) + " + 2*" +
                             std::to_string(padding) + " - " + std::to_string(kernel) + ") not divisible by stride " +
                             std::to_string(stride) + " along " + axis);
    }
    const int extent = span / stride + 1;
    if (extent <= 0) {
        throw geometry_error("layer '" + layer_id + "': non-positive output extent along " + axis);
    }
    return extent;
}

void require_positive(int value, const char* field, const std::string& layer_id) {
    if (value < 1) {
        throw validation_error("layer '" + layer_id + "': " + field + " must be >= 1, got " +
                               std::to_string(value));
    }
}

} // namespace

ConvLayerSpec make_layer_spec(std::string layer_id,
                              int in_channels, int out_channels,
                              int kernel_h, int kernel_w,
                              int input_h, int input_w,
                              int stride, int padding) {
    if (layer_id.empty()) {
        throw validation_error("layer id must be non-empty");
    }
    require_positive(in_channels, "in_channels", layer_id);
    require_positive(out_channels, "out_channels", layer_id);
    require_positive(kernel_h, "kernel_h", layer_id);
    require_positive(kernel_w, "kernel_w", layer_id);
    require_positive(input_h, "input_h", layer_id);
    require_positive(input_w, "input_w", layer_id);
    require_positive(stride, "stride", layer_id);
    if (padding < 0) {
        throw validation_error("layer '" + layer_id + "': padding must be >= 0");
    }

    exact_output_extent(input_h, padding, kernel_h, stride, layer_id, "h");
    exact_output_extent(input_w, padding, kernel_w, stride, layer_id, "w");

    return ConvLayerSpec{std::move(layer_id), in_channels, out_channels,
                         kernel_h,            kernel_w,    input_h,
                         input_w,             stride,      padding};
}

int output_h(const ConvLayerSpec& spec) {
    return exact_output_extent(spec.input_h, spec.padding, spec.kernel_h, spec.stride,
                               spec.layer_id, "h");
}

int output_w(const ConvLayerSpec& spec) {
    return exact_output_extent(spec.input_w, spec.padding, spec.kernel_w, spec.stride,
                               spec.layer_id, "w");
}

NetworkModel make_network(std::string name, std::vector<ConvLayerSpec> layers) {
    for (const auto& layer : layers) {
        make_layer_spec(layer.layer_id, layer.in_channels, layer.out_channels, layer.kernel_h,
                        layer.kernel_w, layer.input_h, layer.input_w, layer.stride, layer.padding);
        for (const auto& other : layers) {
            if (&other != &layer && other.layer_id == layer.layer_id) {
                throw validation_error("network '" + name + "': duplicate layer id '" +
                                       layer.layer_id + "'");
            }
        }
    }
    return NetworkModel{std::move(name), std::move(layers)};
}

namespace {

ConvLayerSpec conv(const char* id, int in_c, int out_c, int k, int input, int stride, int pad) {
    return make_layer_spec(id, in_c, out_c, k, k, input, input, stride, pad);
}

NetworkModel build_vgg16() {
    // Nine unique layer shapes of the thirteen 3x3 convolutions, indexed by
    // first occurrence among the network's named layers.
    std::vector<ConvLayerSpec> layers = {
        conv("VGG.L0", 3, 64, 3, 224, 1, 1),
        conv("VGG.L2", 64, 64, 3, 224, 1, 1),
        conv("VGG.L5", 64, 128, 3, 112, 1, 1),
        conv("VGG.L7", 128, 128, 3, 112, 1, 1),
        conv("VGG.L10", 128, 256, 3, 56, 1, 1),
        conv("VGG.L12", 256, 256, 3, 56, 1, 1),
        conv("VGG.L17", 256, 512, 3, 28, 1, 1),
        conv("VGG.L19", 512, 512, 3, 28, 1, 1),
        conv("VGG.L24", 512, 512, 3, 14, 1, 1),
    };
    return make_network("vgg16", std::move(layers));
}

NetworkModel build_alexnet() {
    // Caffe geometry (227x227 input) so the first layer tiles exactly.
    std::vector<ConvLayerSpec> layers = {
        make_layer_spec("AlexNet.L0", 3, 64, 11, 11, 227, 227, 4, 0),
        make_layer_spec("AlexNet.L3", 64, 192, 5, 5, 27, 27, 1, 2),
        conv("AlexNet.L6", 192, 384, 3, 13, 1, 1),
        conv("AlexNet.L8", 384, 256, 3, 13, 1, 1),
        conv("AlexNet.L10", 256, 256, 3, 13, 1, 1),
    };
    return make_network("alexnet", std::move(layers));
}

NetworkModel build_resnet50() {
    // The 23 unique convolution shapes of ResNet-50, labeled with the
    // profiling indices of their first occurrence among the 53 convolutions
    // (bottleneck order conv1x1/conv3x3/conv1x1, projection last).
    //
    // Best-effort geometry note: the published network computes its
    // stride-2 layers with asymmetric padding (output floor'd). Those rows
    // carry the largest input extent that divides exactly (one less than
    // the nominal feature map), which preserves the true output size and
    // every channel count.
    std::vector<ConvLayerSpec> layers = {
        conv("ResNet.L0", 3, 64, 7, 223, 2, 3),       // 7x7/2 stem -> 112
        conv("ResNet.L1", 64, 64, 1, 56, 1, 0),       // block1 reduce
        conv("ResNet.L2", 64, 64, 3, 56, 1, 1),
        conv("ResNet.L3", 64, 256, 1, 56, 1, 0),      // expand + projection shape
        conv("ResNet.L5", 256, 64, 1, 56, 1, 0),      // later-block reduce
        conv("ResNet.L11", 256, 128, 1, 56, 1, 0),
        conv("ResNet.L12", 128, 128, 3, 55, 2, 1),    // 56 -> 28
        conv("ResNet.L13", 128, 512, 1, 28, 1, 0),
        conv("ResNet.L14", 256, 512, 1, 55, 2, 0),    // projection 56 -> 28
        conv("ResNet.L15", 512, 128, 1, 28, 1, 0),
        conv("ResNet.L16", 128, 128, 3, 28, 1, 1),
        conv("ResNet.L24", 512, 256, 1, 28, 1, 0),
        conv("ResNet.L25", 256, 256, 3, 27, 2, 1),    // 28 -> 14
        conv("ResNet.L26", 256, 1024, 1, 14, 1, 0),
        conv("ResNet.L27", 512, 1024, 1, 27, 2, 0),   // projection 28 -> 14
        conv("ResNet.L28", 1024, 256, 1, 14, 1, 0),
        conv("ResNet.L29", 256, 256, 3, 14, 1, 1),
        conv("ResNet.L43", 1024, 512, 1, 14, 1, 0),
        conv("ResNet.L44", 512, 512, 3, 13, 2, 1),    // 14 -> 7
        conv("ResNet.L45", 512, 2048, 1, 7, 1, 0),
        conv("ResNet.L46", 1024, 2048, 1, 13, 2, 0),  // projection 14 -> 7
        conv("ResNet.L47", 2048, 512, 1, 7, 1, 0),
        conv("ResNet.L48", 512, 512, 3, 7, 1, 1),
    };
    return make_network("resnet50", std::move(layers));
}

} // namespace

NetworkModel builtin_network(const std::string& name) {
    if (name == "vgg16") return build_vgg16();
    if (name == "alexnet") return build_alexnet();
    if (name == "resnet50") return build_resnet50();
    throw lookup_error("unknown network '" + name + "' (expected vgg16, alexnet, or resnet50)");
}

void validate_curve(const LatencyCurve& curve) {
    if (curve.layer_id.empty()) {
        throw validation_error("latency curve must carry a layer id");
    }
    for (const auto& [channels, latency] : curve.points) {
        if (channels < 1) {
            throw validation_error("curve '" + curve.layer_id + "': channel count must be >= 1");
        }
        if (!(latency > 0.0) || !std::isfinite(latency)) {
            throw validation_error("curve '" + curve.layer_id + "': latency at " +
                                   std::to_string(channels) + " channels must be finite and > 0");
        }
    }
}

namespace {

nlohmann::json layer_to_json(const ConvLayerSpec& layer) {
    return nlohmann::json{{"layer_id", layer.layer_id},
                          {"in_channels", layer.in_channels},
                          {"out_channels", layer.out_channels},
                          {"kernel_h", layer.kernel_h},
                          {"kernel_w", layer.kernel_w},
                          {"input_h", layer.input_h},
                          {"input_w", layer.input_w},
                          {"stride", layer.stride},
                          {"padding", layer.padding}};
}

ConvLayerSpec layer_from_json(const nlohmann::json& j) {
    return make_layer_spec(j.at("layer_id").get<std::string>(),
                           j.at("in_channels").get<int>(), j.at("out_channels").get<int>(),
                           j.at("kernel_h").get<int>(), j.at("kernel_w").get<int>(),
                           j.at("input_h").get<int>(), j.at("input_w").get<int>(),
                           j.at("stride").get<int>(), j.at("padding").get<int>());
}

} // namespace

std::string network_to_json(const NetworkModel& network) {
    nlohmann::json j;
    j["name"] = network.name;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : network.layers) {
        j["layers"].push_back(layer_to_json(layer));
    }
    return j.dump(2);
}

NetworkModel network_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("invalid network JSON: ") + e.what());
    }
    try {
        std::vector<ConvLayerSpec> layers;
        for (const auto& item : j.at("layers")) {
            layers.push_back(layer_from_json(item));
        }
        return make_network(j.at("name").get<std::string>(), std::move(layers));
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("network JSON schema mismatch: ") + e.what());
    }
}

} // namespace stairs
