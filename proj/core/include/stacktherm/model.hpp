#pragma once

// Domain types for stacked-die thermal models: floorplans, layers, the
// heat-removal package, power maps and the built-in powering scenarios.
// Everything here is geometry and bookkeeping; no numerics.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stacktherm {

/// Axis-aligned rectangular functional unit. Lengths in meters.
struct Block {
    std::string name;
    double width = 0.0;
    double height = 0.0;
    double left_x = 0.0;
    double bottom_y = 0.0;

    double right_x() const { return left_x + width; }
    double top_y() const { return bottom_y + height; }
    double area() const { return width * height; }

    bool operator==(const Block&) const = default;
};

/// Area of the intersection of two blocks (zero when disjoint or touching).
/// Symmetric in its arguments.
double overlap_area(const Block& a, const Block& b);

struct Floorplan {
    std::vector<Block> blocks;
    double die_width = 0.0;
    double die_height = 0.0;

    const Block* find(std::string_view name) const;
    double die_area() const { return die_width * die_height; }

    bool operator==(const Floorplan&) const = default;
};

/// Builds a floorplan whose die is the tight bounding box of its blocks
/// (anchored at the origin).
Floorplan floorplan_from_blocks(std::vector<Block> blocks);

/// Left-right mirror image of a floorplan about the die's vertical center line.
Floorplan mirrored_left_right(const Floorplan& fp);

struct Violation {
    enum class Kind { OutOfBounds, Overlap, DuplicateName, BadDimension };
    Kind kind;
    std::string first;
    std::string second;  // only for Overlap / DuplicateName
    double overlap = 0.0;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Blocks whose intersection exceeds this area (m^2) count as overlapping.
inline constexpr double kOverlapTolerance = 1e-12;

ValidationReport validate_floorplan(const Floorplan& fp);

/// Reciprocal of a thermal resistivity. Throws std::domain_error for r <= 0.
double resistivity_to_conductivity(double resistivity);

struct Layer {
    int index = 0;
    bool has_lateral_flow = true;
    bool dissipates_power = false;
    double volumetric_heat_capacity = 0.0;  // J/(m^3 K); steady state ignores it
    double resistivity = 0.0;                // m K / W
    double thickness = 0.0;                  // m
    Floorplan floorplan;

    double conductivity() const { return resistivity_to_conductivity(resistivity); }

    bool operator==(const Layer&) const = default;
};

struct PackageParams {
    double tim2_thickness = 2e-5;
    double tim2_resistivity = 0.25;
    double spreader_thickness = 1e-3;
    double spreader_conductivity = 400.0;
    double sink_thickness = 6.9e-3;
    double sink_conductivity = 400.0;
    double convection_resistance = 0.1;  // K/W, sink to ambient
    double ambient = 318.15;             // K

    bool operator==(const PackageParams&) const = default;
};

/// User layers (bottom to top) plus the package chain above them.
class LayerStack {
public:
    const std::vector<Layer>& layers() const { return layers_; }
    const PackageParams& package() const { return package_; }
    double die_width() const { return layers_.front().floorplan.die_width; }
    double die_height() const { return layers_.front().floorplan.die_height; }

    /// User layers followed by TIM2, spreader and sink, each covering the die.
    std::vector<Layer> solvable_layers() const;

    bool operator==(const LayerStack&) const = default;

private:
    friend LayerStack build_stack(std::vector<Layer>, const PackageParams&);
    std::vector<Layer> layers_;
    PackageParams package_;
};

/// Validates layers and package and assembles a stack. Layers are ordered by
/// index, which must run contiguously from 0. Throws ConfigError.
LayerStack build_stack(std::vector<Layer> user_layers, const PackageParams& pkg);

/// Block name -> dissipated power (W).
using PowerMap = std::map<std::string, double>;

double total_power(const PowerMap& pm);

/// Throws ConfigError when a name is missing from every power-dissipating
/// layer or a power is negative.
void check_power_map(const PowerMap& pm, const LayerStack& stack);

enum class ScenarioId { S1, S2, S3, S4, S5, Flat2DProc, Flat2DMem };

struct Scenario {
    ScenarioId id;
    std::string description;
    PowerMap power_map;
};

std::string_view to_string(ScenarioId id);
std::optional<ScenarioId> parse_scenario_id(std::string_view text);
const std::vector<ScenarioId>& stacked_scenarios();  // S1..S5
const std::vector<ScenarioId>& all_scenarios();

// Reference design: eight 50.9 W processors below four 1.3 W L2 banks.
inline constexpr double kProcessorPower = 50.9;
inline constexpr double kMemoryPower = 1.3;
inline constexpr double kDieSize = 16e-3;
inline constexpr double kDeviceThickness = 1.5e-4;
inline constexpr double kSiliconResistivity = 0.01;
inline constexpr double kSiliconHeatCapacity = 1.75e6;
inline constexpr double kTimThickness = 2e-5;
inline constexpr double kTimResistivity = 0.25;
inline constexpr double kTimHeatCapacity = 4e6;

Floorplan processor_floorplan();
Floorplan memory_floorplan();
/// Single block covering the die; used by layers without functional units.
Floorplan uniform_floorplan(std::string name, double width = kDieSize,
                            double height = kDieSize);

Layer processor_layer(int index = 0);
Layer tim_layer(int index = 1, double thickness = kTimThickness,
                double resistivity = kTimResistivity);
Layer memory_layer(int index = 2);

/// processor / TIM / memory with the default package.
LayerStack reference_stack(const PackageParams& pkg = {});
LayerStack single_layer_stack(const Layer& layer, const PackageParams& pkg = {});

PowerMap scenario_power_map(ScenarioId id);
Scenario scenario(ScenarioId id);

}  // namespace stacktherm
