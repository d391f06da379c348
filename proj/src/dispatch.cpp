#include "stairs/dispatch.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "stairs/error.hpp"

namespace stairs {

std::uint64_t KernelCostBreakdown::total_arith() const {
    std::uint64_t total = 0;
    for (const auto& k : kernels) total += k.arith_instr;
    return total;
}

std::uint64_t KernelCostBreakdown::total_mem() const {
    std::uint64_t total = 0;
    for (const auto& k : kernels) total += k.mem_instr;
    return total;
}

std::string breakdown_to_csv(const KernelCostBreakdown& breakdown) {
    std::string csv = "kernel_name,arith_instr,mem_instr\n";
    for (const auto& k : breakdown.kernels) {
        csv += k.kernel_name;
        csv += ',';
        csv += std::to_string(k.arith_instr);
        csv += ',';
        csv += std::to_string(k.mem_instr);
        csv += '\n';
    }
    return csv;
}

const char* to_string(ConvMethod method) {
    switch (method) {
        case ConvMethod::kGemm: return "gemm";
        case ConvMethod::kDirect: return "direct";
        case ConvMethod::kTvm: return "tvm";
    }
    return "?";
}

ConvMethod conv_method_from_string(const std::string& name) {
    if (name == "gemm") return ConvMethod::kGemm;
    if (name == "direct") return ConvMethod::kDirect;
    if (name == "tvm") return ConvMethod::kTvm;
    throw lookup_error("unknown convolution method '" + name + "' (expected gemm, direct, or tvm)");
}

namespace {

void validate_split_policy(const SplitPolicy& policy) {
    if (policy.vector_width < 1 || policy.main_tile < 1) {
        throw validation_error("split policy: vector_width and main_tile must be >= 1");
    }
    if (policy.main_tile % policy.vector_width != 0) {
        throw validation_error("split policy: main_tile must be a multiple of vector_width");
    }
}

} // namespace

std::vector<int> split_gemm_channels(int c_out, const SplitPolicy& policy) {
    validate_split_policy(policy);
    if (c_out < 1) {
        throw range_error("split: c_out must be >= 1");
    }

    const int main = (c_out / policy.main_tile) * policy.main_tile;
    const int rest = c_out - main;
    const int remainder =
        (rest + policy.vector_width - 1) / policy.vector_width * policy.vector_width;

    if (remainder == 0) {
        return {main};
    }
    if (policy.merge_full_tile_remainder && remainder == policy.main_tile) {
        return {main + policy.main_tile};
    }
    if (main == 0) {
        return {remainder};
    }
    return {main, remainder};
}

namespace {

std::string im2col_kernel_name(const ConvLayerSpec& layer) {
    return "im2col" + std::to_string(layer.kernel_h) + "x" + std::to_string(layer.kernel_w) +
           "_nhwc";
}

void require_calibrated(const GemmCostCoefficients& coeffs) {
    if (coeffs.gemm_arith_unit == 0 || coeffs.gemm_mem_unit == 0) {
        throw calibration_error("gemm cost model is uncalibrated (zero gemm unit)");
    }
}

} // namespace

KernelCostBreakdown gemm_cost(const ConvLayerSpec& layer, const GemmCostCoefficients& coeffs,
                              const SplitPolicy& policy) {
    require_calibrated(coeffs);
    const auto c = static_cast<std::uint64_t>(layer.out_channels);

    KernelCostBreakdown breakdown;
    breakdown.kernels.push_back({im2col_kernel_name(layer),
                                 coeffs.im2col_arith_intercept + coeffs.im2col_arith_slope * c,
                                 coeffs.im2col_mem_intercept + coeffs.im2col_mem_slope * c});
    breakdown.kernels.push_back(
        {"reshape_to_columns", coeffs.reshape_arith_const, coeffs.reshape_mem_const});
    for (int width : split_gemm_channels(layer.out_channels, policy)) {
        const auto w = static_cast<std::uint64_t>(width);
        breakdown.kernels.push_back(
            {"gemm_mm", coeffs.gemm_arith_unit * w, coeffs.gemm_mem_unit * w});
    }
    return breakdown;
}

namespace {

// Exact division of an instruction-count delta; any remainder means the
// table cannot have come from the affine/unit model.
std::uint64_t exact_ratio(std::uint64_t numerator, std::uint64_t denominator, const char* what) {
    if (numerator % denominator != 0) {
        throw calibration_error(std::string("calibration: non-integral ") + what + " (" +
                                std::to_string(numerator) + " / " + std::to_string(denominator) +
                                ")");
    }
    return numerator / denominator;
}

struct GemmTableView {
    const KernelCost* im2col;
    const KernelCost* reshape;
    std::vector<const KernelCost*> gemm;
};

GemmTableView view_gemm_table(const KernelCostBreakdown& table, int channels) {
    if (table.kernels.size() < 3 || table.kernels.size() > 4) {
        throw calibration_error("calibration: table at " + std::to_string(channels) +
                                " channels must have 3 or 4 kernels, got " +
                                std::to_string(table.kernels.size()));
    }
    GemmTableView view{&table.kernels[0], &table.kernels[1], {}};
    for (std::size_t i = 2; i < table.kernels.size(); ++i) {
        view.gemm.push_back(&table.kernels[i]);
    }
    return view;
}

} // namespace

GemmCostCoefficients calibrate_gemm(const KernelCostBreakdown& table_a, int channels_a,
                                    const KernelCostBreakdown& table_b, int channels_b,
                                    const SplitPolicy& policy) {
    if (channels_a == channels_b) {
        throw calibration_error("calibration: tables at identical channel counts are degenerate");
    }
    if (channels_a < 1 || channels_b < 1) {
        throw range_error("calibration: channel counts must be >= 1");
    }

    const GemmTableView a = view_gemm_table(table_a, channels_a);
    const GemmTableView b = view_gemm_table(table_b, channels_b);

    if (a.reshape->arith_instr != b.reshape->arith_instr ||
        a.reshape->mem_instr != b.reshape->mem_instr) {
        throw calibration_error("calibration: reshape kernel differs between the two tables");
    }

    // im2col slope and intercept from the two points.
    const auto [lo_c, lo, hi_c, hi] =
        channels_a < channels_b
            ? std::tuple{channels_a, a.im2col, channels_b, b.im2col}
            : std::tuple{channels_b, b.im2col, channels_a, a.im2col};
    if (hi->arith_instr < lo->arith_instr || hi->mem_instr < lo->mem_instr) {
        throw calibration_error("calibration: im2col counts decrease with channels");
    }
    const auto span = static_cast<std::uint64_t>(hi_c - lo_c);
    const std::uint64_t arith_slope =
        exact_ratio(hi->arith_instr - lo->arith_instr, span, "im2col arith slope");
    const std::uint64_t mem_slope =
        exact_ratio(hi->mem_instr - lo->mem_instr, span, "im2col mem slope");

    const auto lo_cu = static_cast<std::uint64_t>(lo_c);
    if (lo->arith_instr < arith_slope * lo_cu || lo->mem_instr < mem_slope * lo_cu) {
        throw calibration_error("calibration: negative im2col intercept");
    }

    // gemm units from a single-kernel table divided by its split width.
    const GemmTableView* single = nullptr;
    int single_channels = 0;
    if (a.gemm.size() == 1) {
        single = &a;
        single_channels = channels_a;
    } else if (b.gemm.size() == 1) {
        single = &b;
        single_channels = channels_b;
    } else {
        throw calibration_error("calibration: neither table has a single gemm kernel");
    }
    const std::vector<int> widths = split_gemm_channels(single_channels, policy);
    if (widths.size() != 1) {
        throw calibration_error("calibration: split policy predicts " +
                                std::to_string(widths.size()) + " kernels at " +
                                std::to_string(single_channels) +
                                " channels but the table has one");
    }
    const auto width = static_cast<std::uint64_t>(widths.front());
    const std::uint64_t arith_unit =
        exact_ratio(single->gemm.front()->arith_instr, width, "gemm arith unit");
    const std::uint64_t mem_unit =
        exact_ratio(single->gemm.front()->mem_instr, width, "gemm mem unit");
    if (arith_unit == 0 || mem_unit == 0) {
        throw calibration_error("calibration: gemm units must be strictly positive");
    }

    return GemmCostCoefficients{arith_slope,
                                lo->arith_instr - arith_slope * lo_cu,
                                mem_slope,
                                lo->mem_instr - mem_slope * lo_cu,
                                a.reshape->arith_instr,
                                a.reshape->mem_instr,
                                arith_unit,
                                mem_unit};
}

double direct_cost(const ConvLayerSpec& layer, std::uint64_t base_instr, int ref_channels) {
    if (ref_channels < 1) {
        throw range_error("direct cost: reference channel count must be >= 1");
    }
    return static_cast<double>(base_instr) * static_cast<double>(layer.out_channels) /
           static_cast<double>(ref_channels);
}

void validate_workgroup_policy(const WorkGroupPolicy& policy) {
    auto check_shape = [](const WorkGroupSize& wg) {
        if (wg.x < 1 || wg.y < 1 || wg.z < 1) {
            throw validation_error("work-group dimensions must be >= 1");
        }
    };
    check_shape(policy.fallback);
    for (const auto& [channels, shape] : policy.by_channels) {
        if (channels < 1) {
            throw validation_error("work-group map: channel counts must be >= 1");
        }
        check_shape(shape);
    }
    if (!policy.penalty.empty()) {
        double fastest = std::numeric_limits<double>::infinity();
        for (const auto& [shape, factor] : policy.penalty) {
            check_shape(shape);
            if (factor < 1.0) {
                throw validation_error("work-group penalty must be >= 1");
            }
            fastest = std::min(fastest, factor);
        }
        if (fastest != 1.0) {
            throw validation_error("fastest work-group shape must carry penalty exactly 1");
        }
    }
}

WorkGroupSize select_workgroup(int c_out, const WorkGroupPolicy& policy) {
    if (auto it = policy.by_channels.find(c_out); it != policy.by_channels.end()) {
        return it->second;
    }
    return policy.fallback;
}

double workgroup_penalty(int c_out, const WorkGroupPolicy& policy) {
    const WorkGroupSize shape = select_workgroup(c_out, policy);
    if (auto it = policy.penalty.find(shape); it != policy.penalty.end()) {
        return it->second;
    }
    return 1.0;
}

void validate_device_profile(const DeviceProfile& profile) {
    if (!(profile.ns_per_arith_instr > 0.0) || !(profile.ns_per_mem_instr > 0.0)) {
        throw validation_error("device profile: instruction rates must be > 0");
    }
    if (profile.job_overhead_ms < 0.0) {
        throw validation_error("device profile: job overhead must be >= 0");
    }
    validate_workgroup_policy(profile.workgroup_policy);
}

int count_dispatched_jobs(const ConvLayerSpec& layer, ConvMethod method,
                          const SplitPolicy& policy) {
    switch (method) {
        case ConvMethod::kDirect:
            return 1;
        case ConvMethod::kGemm:
            return 2 + static_cast<int>(split_gemm_channels(layer.out_channels, policy).size());
        case ConvMethod::kTvm:
            throw range_error("job count for tvm depends on per-channel routing; resolve first");
    }
    return 0;
}

namespace {

double instruction_ms(double arith, double mem, const DeviceProfile& profile) {
    constexpr double kNsToMs = 1e-6;
    return (arith * profile.ns_per_arith_instr + mem * profile.ns_per_mem_instr) * kNsToMs;
}

double emulate_resolved(const ConvLayerSpec& layer, ConvMethod method, const ConvCostModel& model,
                        const DeviceProfile& profile) {
    const double penalty = workgroup_penalty(layer.out_channels, profile.workgroup_policy);

    if (method == ConvMethod::kDirect) {
        if (!model.direct) {
            throw calibration_error("direct cost model missing for layer '" + layer.layer_id +
                                    "'");
        }
        const double arith = direct_cost(layer, model.direct->base_arith_instr,
                                         model.direct->ref_channels);
        const double mem =
            direct_cost(layer, model.direct->base_mem_instr, model.direct->ref_channels);
        return instruction_ms(arith, mem, profile) * penalty + profile.job_overhead_ms;
    }

    if (!model.gemm) {
        throw calibration_error("gemm cost model missing for layer '" + layer.layer_id + "'");
    }
    const KernelCostBreakdown breakdown = gemm_cost(layer, *model.gemm, model.split);
    double ms = 0.0;
    for (const auto& kernel : breakdown.kernels) {
        ms += instruction_ms(static_cast<double>(kernel.arith_instr),
                             static_cast<double>(kernel.mem_instr), profile) *
              penalty;
    }
    ms += profile.job_overhead_ms * static_cast<double>(breakdown.kernels.size());
    return ms;
}

} // namespace

double emulate_latency(const ConvLayerSpec& layer, ConvMethod method, const ConvCostModel& model,
                       const DeviceProfile& profile) {
    ConvMethod resolved = method;
    if (method == ConvMethod::kTvm) {
        resolved = profile.tvm_direct_channels.contains(layer.out_channels) ? ConvMethod::kDirect
                                                                            : ConvMethod::kGemm;
    }
    return emulate_resolved(layer, resolved, model, profile);
}

} // namespace stairs
