#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stairs/model.hpp"

namespace stairs {

// How the runtime splits one logical GEMM over output channels into
// dispatched kernels. The observed behavior: channel counts are tiled by
// main_tile, the remainder is padded up to vector_width, and a remainder
// that pads to a full tile is merged into the main kernel. The true
// library heuristic is not published; this is the simplest rule
// consistent with every observed split, kept swappable behind the policy.
struct SplitPolicy {
    int vector_width = 4;
    int main_tile = 16;
    bool merge_full_tile_remainder = true;

    bool operator==(const SplitPolicy&) const = default;
};

// Per-layer calibrated instruction-count coefficients for the GEMM path.
// im2col is affine in the output channel count, reshape is constant, and
// each gemm kernel costs a fixed unit per padded output channel.
struct GemmCostCoefficients {
    std::uint64_t im2col_arith_slope = 0;
    std::uint64_t im2col_arith_intercept = 0;
    std::uint64_t im2col_mem_slope = 0;
    std::uint64_t im2col_mem_intercept = 0;
    std::uint64_t reshape_arith_const = 0;
    std::uint64_t reshape_mem_const = 0;
    std::uint64_t gemm_arith_unit = 0;
    std::uint64_t gemm_mem_unit = 0;

    bool operator==(const GemmCostCoefficients&) const = default;
};

struct KernelCost {
    std::string kernel_name;
    std::uint64_t arith_instr = 0;
    std::uint64_t mem_instr = 0;

    bool operator==(const KernelCost&) const = default;
};

// Ordered per-kernel instruction counts for one layer configuration.
// GEMM path order: im2col, reshape_to_columns, then one or two gemm_mm.
struct KernelCostBreakdown {
    std::vector<KernelCost> kernels;

    bool operator==(const KernelCostBreakdown&) const = default;

    std::uint64_t total_arith() const;
    std::uint64_t total_mem() const;
};

// "kernel_name,arith_instr,mem_instr" rows, one per dispatched kernel.
std::string breakdown_to_csv(const KernelCostBreakdown& breakdown);

struct WorkGroupSize {
    int x = 1;
    int y = 1;
    int z = 1;

    auto operator<=>(const WorkGroupSize&) const = default;
};

// Work-group shape chosen per channel count, with a fallback for counts
// the map does not list, plus the relative throughput penalty of each
// shape. Penalties are a lookup table rather than a derived model: the
// measurements show which shapes run slow without explaining why.
struct WorkGroupPolicy {
    std::map<int, WorkGroupSize> by_channels;
    WorkGroupSize fallback{1, 1, 8};
    std::map<WorkGroupSize, double> penalty;

    bool operator==(const WorkGroupPolicy&) const = default;
};

// Validates shape dimensions >= 1, penalties >= 1, and that the fastest
// penalized shape sits at exactly 1.
void validate_workgroup_policy(const WorkGroupPolicy& policy);

enum class ConvMethod { kGemm, kDirect, kTvm };

const char* to_string(ConvMethod method);
ConvMethod conv_method_from_string(const std::string& name);

// Device timing profile used to turn instruction counts into synthetic
// latencies. tvm_direct_channels lists the channel counts the TVM-style
// method routes to direct convolution instead of GEMM.
struct DeviceProfile {
    double ns_per_arith_instr = 0.0;
    double ns_per_mem_instr = 0.0;
    double job_overhead_ms = 0.0;
    WorkGroupPolicy workgroup_policy;
    std::set<int> tvm_direct_channels;

    bool operator==(const DeviceProfile&) const = default;
};

void validate_device_profile(const DeviceProfile& profile);

// Direct-convolution instruction base: total counts measured at one
// reference channel count, scaled proportionally elsewhere.
struct DirectCostModel {
    std::uint64_t base_arith_instr = 0;
    std::uint64_t base_mem_instr = 0;
    int ref_channels = 0;

    bool operator==(const DirectCostModel&) const = default;
};

// Everything needed to cost one layer under any method.
struct ConvCostModel {
    SplitPolicy split;
    std::optional<GemmCostCoefficients> gemm;
    std::optional<DirectCostModel> direct;

    bool operator==(const ConvCostModel&) const = default;
};

// Channel widths of the dispatched gemm kernels for c_out output
// channels. Every width is a positive multiple of vector_width and the
// widths sum to c_out rounded up to the next multiple; at most two
// kernels are ever produced.
std::vector<int> split_gemm_channels(int c_out, const SplitPolicy& policy = {});

// Full GEMM-path instruction breakdown for the layer at its out_channels,
// exact in integer arithmetic. Requires calibrated coefficients
// (gemm units > 0), else throws calibration_error.
KernelCostBreakdown gemm_cost(const ConvLayerSpec& layer, const GemmCostCoefficients& coeffs,
                              const SplitPolicy& policy = {});

// Recovers coefficients from two measured breakdowns taken at different
// channel counts, at least one of which dispatched a single gemm kernel.
// Throws calibration_error when the counts coincide or the tables are
// inconsistent with the affine/unit model (non-integral slope or unit).
GemmCostCoefficients calibrate_gemm(const KernelCostBreakdown& table_a, int channels_a,
                                    const KernelCostBreakdown& table_b, int channels_b,
                                    const SplitPolicy& policy = {});

// Direct-convolution instruction count at the layer's out_channels,
// proportional through the origin: base_instr * c_out / ref_channels.
double direct_cost(const ConvLayerSpec& layer, std::uint64_t base_instr, int ref_channels);

// Work-group shape for a channel count: mapped value if present, else the
// policy fallback.
WorkGroupSize select_workgroup(int c_out, const WorkGroupPolicy& policy);

// Relative throughput multiplier of the shape chosen for c_out (1.0 when
// the shape carries no penalty entry).
double workgroup_penalty(int c_out, const WorkGroupPolicy& policy);

// Jobs dispatched to the GPU for one layer execution. GEMM: im2col +
// reshape + one per gemm split. Direct: a single kernel.
int count_dispatched_jobs(const ConvLayerSpec& layer, ConvMethod method,
                          const SplitPolicy& policy = {});

// Synthetic latency in milliseconds:
//   sum over kernels of (arith*ns_arith + mem*ns_mem) * wg_penalty
//   + job_overhead_ms * dispatched jobs.
// The TVM method routes each channel count to DIRECT when listed in
// profile.tvm_direct_channels, else to GEMM. Deterministic; throws
// calibration_error when the routed method's model part is missing.
double emulate_latency(const ConvLayerSpec& layer, ConvMethod method, const ConvCostModel& model,
                       const DeviceProfile& profile);

} // namespace stairs
