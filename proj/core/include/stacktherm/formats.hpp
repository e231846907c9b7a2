#pragma once

// Text formats: floorplans (.flp), layer configuration (.lcf), power traces
// (.ptrace) and result outputs. Parsers throw ParseError with a 1-based line
// number; writers emit LF line endings and `%.6e` numbers unless noted.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stacktherm/model.hpp"
#include "stacktherm/report.hpp"
#include "stacktherm/solver.hpp"

namespace stacktherm {

/// `<name> <width> <height> <left-x> <bottom-y>` per line, `#` comments.
/// The die is the bounding box of all blocks.
Floorplan parse_flp(std::string_view text);
std::string write_flp(const Floorplan& fp);

/// One layer as written in a layer configuration file.
struct LayerRecord {
    int number = 0;
    bool lateral = true;
    bool power = false;
    double specific_heat = 0.0;
    double resistivity = 0.0;
    double thickness = 0.0;
    std::string floorplan_path;

    bool operator==(const LayerRecord&) const = default;
};

/// Seven records per layer (number, lateral Y/N, power Y/N, specific heat,
/// resistivity, thickness, floorplan file), sorted by layer number.
std::vector<LayerRecord> parse_lcf(std::string_view text);
std::string write_lcf(const std::vector<LayerRecord>& records);

/// Reads a layer configuration file and every floorplan it names, resolving
/// floorplan paths against the file's directory.
std::vector<Layer> load_layers(const std::filesystem::path& lcf_path);

/// Header of unit names, then one row of powers per sample. The steady-state
/// map is the per-unit mean over all rows.
PowerMap parse_ptrace(std::string_view text);
std::string write_ptrace(const PowerMap& pm);

std::string read_text_file(const std::filesystem::path& path, const std::string& role);
Floorplan load_flp(const std::filesystem::path& path);
PowerMap load_ptrace(const std::filesystem::path& path);

enum class ReportFormat { Csv, Json };

/// csv: `unit,max_K,mean_K`, one row per block with 2-decimal kelvin, then
/// `__hotspot__,<temp>,<layer>/<row>/<col>`. json keeps full precision.
std::string write_block_report(const BlockReport& report, ReportFormat format);
BlockReport read_block_report_json(std::string_view text);

/// Per layer a `# layer <i>` line followed by rows x cols kelvin values.
std::string write_grid_field(const TemperatureField& field);
TemperatureField read_grid_field(std::string_view text);

struct SweepPoint {
    double param = 0.0;
    double hotspot = 0.0;
    std::vector<std::string> units;
};

/// `param,hotspot_K,hotspot_units`; units joined by `;` in lexical order.
/// Throws std::invalid_argument for an empty sweep.
std::string write_sweep(const std::vector<SweepPoint>& points);

/// Two whitespace-separated columns (parameter, hotspot kelvin) for plotting.
std::string write_plot_data(const std::vector<SweepPoint>& points);

}  // namespace stacktherm
