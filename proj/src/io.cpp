#include "stairs/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "stairs/error.hpp"

namespace stairs {

std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw parse_error("cannot open '" + path.string() + "'");
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(current);
    return fields;
}

std::string strip(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

int parse_int_field(const std::string& field, const char* what, std::size_t line) {
    int value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw parse_error(std::string("invalid ") + what + " '" + field + "'", line);
    }
    return value;
}

std::uint64_t parse_u64_field(const std::string& field, const char* what, std::size_t line) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw parse_error(std::string("invalid ") + what + " '" + field + "'", line);
    }
    return value;
}

double parse_double_field(const std::string& field, const char* what, std::size_t line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw parse_error(std::string("invalid ") + what + " '" + field + "'", line);
    }
    return value;
}

constexpr const char* kMeasurementHeader = "layer_id,out_channels,run_index,latency_ms";
constexpr const char* kCurveHeader = "layer_id,out_channels,latency_ms";

} // namespace

MeasurementFile parse_measurements(const std::string& text) {
    MeasurementFile file;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (!header_seen) {
            if (line.starts_with('#')) {
                const std::string meta = strip(line.substr(1));
                if (const auto eq = meta.find('='); eq != std::string::npos) {
                    if (strip(meta.substr(0, eq)) == "device") {
                        file.device_label = strip(meta.substr(eq + 1));
                    }
                }
                continue;
            }
            if (strip(line) != kMeasurementHeader) {
                throw parse_error("expected header '" + std::string(kMeasurementHeader) + "'",
                                  line_no);
            }
            header_seen = true;
            continue;
        }
        if (strip(line).empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            throw parse_error("expected 4 fields, got " + std::to_string(fields.size()), line_no);
        }
        LatencySample sample;
        sample.layer_id = fields[0];
        sample.out_channels = parse_int_field(fields[1], "out_channels", line_no);
        sample.run_index = parse_int_field(fields[2], "run_index", line_no);
        sample.latency_ms = parse_double_field(fields[3], "latency_ms", line_no);
        if (sample.layer_id.empty()) {
            throw parse_error("empty layer_id", line_no);
        }
        if (sample.out_channels < 1) {
            throw validation_error("out_channels must be >= 1 (line " + std::to_string(line_no) +
                                   ")");
        }
        if (sample.run_index < 0) {
            throw validation_error("run_index must be >= 0 (line " + std::to_string(line_no) +
                                   ")");
        }
        if (!(sample.latency_ms > 0.0) || !std::isfinite(sample.latency_ms)) {
            throw validation_error("latency_ms must be finite and > 0 (line " +
                                   std::to_string(line_no) + ")");
        }
        file.samples.push_back(std::move(sample));
    }
    if (!header_seen) {
        throw parse_error("measurement file has no header", line_no);
    }
    return file;
}

MeasurementFile load_measurements(const std::filesystem::path& path) {
    return parse_measurements(read_file(path));
}

std::string serialize_measurements(const MeasurementFile& file) {
    std::string out = "# device=" + file.device_label + "\n";
    out += kMeasurementHeader;
    out += '\n';
    for (const auto& sample : file.samples) {
        out += sample.layer_id;
        out += ',';
        out += std::to_string(sample.out_channels);
        out += ',';
        out += std::to_string(sample.run_index);
        out += ',';
        out += format_double(sample.latency_ms);
        out += '\n';
    }
    return out;
}

std::vector<LatencyCurve> parse_curves(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::vector<LatencyCurve> curves;
    std::map<std::string, std::size_t> index;

    while (std::getline(in, line)) {
        ++line_no;
        if (!header_seen) {
            if (line.starts_with('#')) continue;
            if (strip(line) != kCurveHeader) {
                throw parse_error("expected header '" + std::string(kCurveHeader) + "'", line_no);
            }
            header_seen = true;
            continue;
        }
        if (strip(line).empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != 3) {
            throw parse_error("expected 3 fields, got " + std::to_string(fields.size()), line_no);
        }
        const std::string& layer_id = fields[0];
        const int channels = parse_int_field(fields[1], "out_channels", line_no);
        const double latency = parse_double_field(fields[2], "latency_ms", line_no);

        auto [it, inserted] = index.try_emplace(layer_id, curves.size());
        if (inserted) {
            curves.push_back(LatencyCurve{layer_id, {}});
        }
        auto& points = curves[it->second].points;
        if (points.contains(channels)) {
            throw parse_error("duplicate point for layer '" + layer_id + "' at " +
                                  std::to_string(channels) + " channels",
                              line_no);
        }
        points[channels] = latency;
    }
    if (!header_seen || curves.empty()) {
        throw analysis_error("curve file holds no curve points");
    }
    for (const auto& curve : curves) {
        validate_curve(curve);
    }
    return curves;
}

std::vector<LatencyCurve> load_curves(const std::filesystem::path& path) {
    return parse_curves(read_file(path));
}

std::string serialize_curves(const std::vector<LatencyCurve>& curves) {
    std::string out = kCurveHeader;
    out += '\n';
    for (const auto& curve : curves) {
        for (const auto& [channels, latency] : curve.points) {
            out += curve.layer_id;
            out += ',';
            out += std::to_string(channels);
            out += ',';
            out += format_double(latency);
            out += '\n';
        }
    }
    return out;
}

std::string configs_to_json(const std::vector<ConvLayerSpec>& configs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& spec : configs) {
        j.push_back(nlohmann::json{{"layer_id", spec.layer_id},
                                   {"in_channels", spec.in_channels},
                                   {"out_channels", spec.out_channels},
                                   {"kernel_h", spec.kernel_h},
                                   {"kernel_w", spec.kernel_w},
                                   {"input_h", spec.input_h},
                                   {"input_w", spec.input_w},
                                   {"stride", spec.stride},
                                   {"padding", spec.padding}});
    }
    return j.dump(2);
}

std::vector<ConvLayerSpec> configs_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("invalid config JSON: ") + e.what());
    }
    try {
        std::vector<ConvLayerSpec> configs;
        for (const auto& item : j) {
            configs.push_back(make_layer_spec(
                item.at("layer_id").get<std::string>(), item.at("in_channels").get<int>(),
                item.at("out_channels").get<int>(), item.at("kernel_h").get<int>(),
                item.at("kernel_w").get<int>(), item.at("input_h").get<int>(),
                item.at("input_w").get<int>(), item.at("stride").get<int>(),
                item.at("padding").get<int>()));
        }
        return configs;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("config JSON schema mismatch: ") + e.what());
    }
}

namespace {

WorkGroupSize parse_workgroup_size(const std::string& value, std::size_t line_no) {
    std::istringstream in(value);
    WorkGroupSize wg;
    if (!(in >> wg.x >> wg.y >> wg.z)) {
        throw parse_error("work-group size must be three integers, got '" + value + "'", line_no);
    }
    std::string rest;
    if (in >> rest) {
        throw parse_error("trailing tokens after work-group size '" + value + "'", line_no);
    }
    return wg;
}

// Shape key "2x1x8" as used by penalty entries.
WorkGroupSize parse_shape_key(const std::string& key, std::size_t line_no) {
    WorkGroupSize wg;
    const auto first = key.find('x');
    const auto second = key.find('x', first + 1);
    if (first == std::string::npos || second == std::string::npos) {
        throw parse_error("penalty shape key must look like '2x1x8', got '" + key + "'", line_no);
    }
    wg.x = parse_int_field(key.substr(0, first), "shape x", line_no);
    wg.y = parse_int_field(key.substr(first + 1, second - first - 1), "shape y", line_no);
    wg.z = parse_int_field(key.substr(second + 1), "shape z", line_no);
    return wg;
}

bool parse_bool_field(const std::string& value, std::size_t line_no) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw parse_error("expected true/false, got '" + value + "'", line_no);
}

} // namespace

ProfileConfig parse_profile(const std::string& text) {
    ProfileConfig config;
    GemmCostCoefficients gemm;
    DirectCostModel direct;
    bool has_gemm = false;
    bool has_direct = false;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = strip(line);
        if (stripped.empty() || stripped.starts_with('#')) continue;

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw parse_error("expected 'key = value'", line_no);
        }
        const std::string key = strip(stripped.substr(0, eq));
        const std::string value = strip(stripped.substr(eq + 1));

        if (key == "device.label") {
            config.device_label = value;
        } else if (key == "device.ns_per_arith_instr") {
            config.device.ns_per_arith_instr = parse_double_field(value, key.c_str(), line_no);
        } else if (key == "device.ns_per_mem_instr") {
            config.device.ns_per_mem_instr = parse_double_field(value, key.c_str(), line_no);
        } else if (key == "device.job_overhead_ms") {
            config.device.job_overhead_ms = parse_double_field(value, key.c_str(), line_no);
        } else if (key == "device.tvm_direct_channels") {
            std::istringstream channels(value);
            int c = 0;
            while (channels >> c) config.device.tvm_direct_channels.insert(c);
        } else if (key == "workgroup.default") {
            config.device.workgroup_policy.fallback = parse_workgroup_size(value, line_no);
        } else if (key.starts_with("workgroup.channels.")) {
            const int channels =
                parse_int_field(key.substr(std::string("workgroup.channels.").size()),
                                "workgroup channel count", line_no);
            config.device.workgroup_policy.by_channels[channels] =
                parse_workgroup_size(value, line_no);
        } else if (key.starts_with("workgroup.penalty.")) {
            const WorkGroupSize shape =
                parse_shape_key(key.substr(std::string("workgroup.penalty.").size()), line_no);
            config.device.workgroup_policy.penalty[shape] =
                parse_double_field(value, key.c_str(), line_no);
        } else if (key == "split.vector_width") {
            config.cost.split.vector_width = parse_int_field(value, key.c_str(), line_no);
        } else if (key == "split.main_tile") {
            config.cost.split.main_tile = parse_int_field(value, key.c_str(), line_no);
        } else if (key == "split.merge_full_tile_remainder") {
            config.cost.split.merge_full_tile_remainder = parse_bool_field(value, line_no);
        } else if (key == "gemm.im2col_arith_slope") {
            gemm.im2col_arith_slope = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.im2col_arith_intercept") {
            gemm.im2col_arith_intercept = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.im2col_mem_slope") {
            gemm.im2col_mem_slope = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.im2col_mem_intercept") {
            gemm.im2col_mem_intercept = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.reshape_arith_const") {
            gemm.reshape_arith_const = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.reshape_mem_const") {
            gemm.reshape_mem_const = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.gemm_arith_unit") {
            gemm.gemm_arith_unit = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "gemm.gemm_mem_unit") {
            gemm.gemm_mem_unit = parse_u64_field(value, key.c_str(), line_no);
            has_gemm = true;
        } else if (key == "direct.base_arith_instr") {
            direct.base_arith_instr = parse_u64_field(value, key.c_str(), line_no);
            has_direct = true;
        } else if (key == "direct.base_mem_instr") {
            direct.base_mem_instr = parse_u64_field(value, key.c_str(), line_no);
            has_direct = true;
        } else if (key == "direct.ref_channels") {
            direct.ref_channels = parse_int_field(value, key.c_str(), line_no);
            has_direct = true;
        } else {
            throw parse_error("unknown profile key '" + key + "'", line_no);
        }
    }

    if (has_gemm) config.cost.gemm = gemm;
    if (has_direct) config.cost.direct = direct;

    validate_device_profile(config.device);
    if (config.cost.direct && config.cost.direct->ref_channels < 1) {
        throw validation_error("profile: direct.ref_channels must be >= 1");
    }
    return config;
}

ProfileConfig load_profile(const std::filesystem::path& path) {
    return parse_profile(read_file(path));
}

const std::vector<int>& default_heatmap_distances() {
    static const std::vector<int> distances = {1, 4, 8, 16, 32, 64, 96, 128, 192, 256, 384, 512};
    return distances;
}

HeatmapGrid build_heatmap(const std::vector<std::pair<std::string, SpeedupMap>>& maps,
                          const std::vector<int>& distances) {
    HeatmapGrid grid;
    grid.distances = distances;
    for (const auto& [layer_id, map] : maps) {
        grid.layer_ids.push_back(layer_id);
        std::vector<std::optional<double>> row;
        row.reserve(distances.size());
        for (int distance : distances) {
            if (auto it = map.entries.find(distance); it != map.entries.end()) {
                row.push_back(it->second);
            } else {
                row.push_back(std::nullopt);
            }
        }
        grid.cells.push_back(std::move(row));
    }
    return grid;
}

std::string heatmap_to_csv(const HeatmapGrid& grid) {
    std::string out = "layer_id";
    for (int distance : grid.distances) {
        out += ',';
        out += std::to_string(distance);
    }
    out += '\n';
    for (std::size_t row = 0; row < grid.layer_ids.size(); ++row) {
        out += grid.layer_ids[row];
        for (std::size_t col = 0; col < grid.distances.size(); ++col) {
            out += ',';
            if (grid.cells[row][col]) {
                out += format_double(*grid.cells[row][col]);
            }
        }
        out += '\n';
    }
    return out;
}

HeatmapGrid heatmap_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;

    HeatmapGrid grid;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!header_seen) {
            if (fields.empty() || fields[0] != "layer_id") {
                throw parse_error("heatmap header must start with 'layer_id'", line_no);
            }
            for (std::size_t i = 1; i < fields.size(); ++i) {
                grid.distances.push_back(parse_int_field(fields[i], "distance", line_no));
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != grid.distances.size() + 1) {
            throw parse_error("row width does not match header", line_no);
        }
        grid.layer_ids.push_back(fields[0]);
        std::vector<std::optional<double>> row;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            if (fields[i].empty()) {
                row.push_back(std::nullopt);
            } else {
                row.push_back(parse_double_field(fields[i], "speedup", line_no));
            }
        }
        grid.cells.push_back(std::move(row));
    }
    if (!header_seen) {
        throw parse_error("heatmap CSV has no header", line_no);
    }
    return grid;
}

namespace {

struct Rgb {
    int r, g, b;
};

std::string to_hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
    auto mix = [t](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * t)); };
    return Rgb{mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

} // namespace

std::string heatmap_to_svg(const HeatmapGrid& grid) {
    constexpr int kCellW = 36;
    constexpr int kCellH = 22;
    constexpr int kLabelW = 110;
    constexpr int kHeaderH = 24;
    const int width = kLabelW + kCellW * static_cast<int>(grid.distances.size()) + 10;
    const int height = kHeaderH + kCellH * static_cast<int>(grid.layer_ids.size()) + 10;

    // Log-scale color range, symmetric around speedup 1.
    double limit = 0.0;
    for (const auto& row : grid.cells) {
        for (const auto& cell : row) {
            if (cell && *cell > 0.0) {
                limit = std::max(limit, std::abs(std::log2(*cell)));
            }
        }
    }
    if (limit == 0.0) limit = 1.0;

    const Rgb neutral{247, 247, 247};
    const Rgb fast{33, 102, 172};  // speedup
    const Rgb slow{178, 24, 43};   // slowdown

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

    for (std::size_t col = 0; col < grid.distances.size(); ++col) {
        const int x = kLabelW + static_cast<int>(col) * kCellW + kCellW / 2;
        svg += "<text x=\"" + std::to_string(x) + "\" y=\"16\" font-family=\"sans-serif\" "
               "font-size=\"11\" text-anchor=\"middle\">" +
               std::to_string(grid.distances[col]) + "</text>\n";
    }

    for (std::size_t row = 0; row < grid.layer_ids.size(); ++row) {
        const int y = kHeaderH + static_cast<int>(row) * kCellH;
        svg += "<text x=\"" + std::to_string(kLabelW - 6) + "\" y=\"" +
               std::to_string(y + kCellH - 7) + "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"end\">" +
               grid.layer_ids[row] + "</text>\n";
        for (std::size_t col = 0; col < grid.distances.size(); ++col) {
            const auto& cell = grid.cells[row][col];
            if (!cell) continue;
            const double t =
                std::clamp(std::log2(std::max(*cell, 1e-12)) / limit, -1.0, 1.0);
            const Rgb color = t >= 0.0 ? lerp(neutral, fast, t) : lerp(neutral, slow, -t);
            const int x = kLabelW + static_cast<int>(col) * kCellW;
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(kCellW - 2) + "\" height=\"" +
                   std::to_string(kCellH - 2) + "\" fill=\"" + to_hex(color) + "\">" +
                   "<title>" + grid.layer_ids[row] + " d=" + std::to_string(grid.distances[col]) +
                   ": " + format_double(*cell) + "x</title></rect>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace stairs
