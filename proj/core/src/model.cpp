#include "stacktherm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>

#include "stacktherm/errors.hpp"

namespace stacktherm {

double overlap_area(const Block& a, const Block& b) {
    const double w = std::min(a.right_x(), b.right_x()) - std::max(a.left_x, b.left_x);
    const double h = std::min(a.top_y(), b.top_y()) - std::max(a.bottom_y, b.bottom_y);
    if (w <= 0.0 || h <= 0.0) return 0.0;
    return w * h;
}

const Block* Floorplan::find(std::string_view name) const {
    for (const auto& b : blocks)
        if (b.name == name) return &b;
    return nullptr;
}

Floorplan floorplan_from_blocks(std::vector<Block> blocks) {
    Floorplan fp;
    for (const auto& b : blocks) {
        fp.die_width = std::max(fp.die_width, b.right_x());
        fp.die_height = std::max(fp.die_height, b.top_y());
    }
    fp.blocks = std::move(blocks);
    return fp;
}

Floorplan mirrored_left_right(const Floorplan& fp) {
    Floorplan out = fp;
    for (auto& b : out.blocks) b.left_x = fp.die_width - b.right_x();
    return out;
}

ValidationReport validate_floorplan(const Floorplan& fp) {
    ValidationReport report;
    auto& v = report.violations;
    // Relative slack for blocks that touch the die edge after decimal rounding.
    const double slack = 1e-12 * std::max(fp.die_width, fp.die_height);

    for (const auto& b : fp.blocks) {
        if (b.name.empty())
            v.push_back({Violation::Kind::BadDimension, b.name, {}, 0.0, "empty block name"});
        if (!(b.width > 0.0) || !(b.height > 0.0) || !(b.left_x >= 0.0) ||
            !(b.bottom_y >= 0.0)) {
            v.push_back({Violation::Kind::BadDimension, b.name, {}, 0.0,
                         "block '" + b.name + "' has non-positive size or negative origin"});
            continue;
        }
        if (b.right_x() > fp.die_width + slack || b.top_y() > fp.die_height + slack) {
            v.push_back({Violation::Kind::OutOfBounds, b.name, {}, 0.0,
                         "block '" + b.name + "' extends outside the die"});
        }
    }

    for (std::size_t i = 0; i < fp.blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < fp.blocks.size(); ++j) {
            const auto& a = fp.blocks[i];
            const auto& b = fp.blocks[j];
            if (a.name == b.name) {
                v.push_back({Violation::Kind::DuplicateName, a.name, b.name, 0.0,
                             "duplicate block name '" + a.name + "'"});
            }
            const double ov = overlap_area(a, b);
            if (ov > kOverlapTolerance) {
                v.push_back({Violation::Kind::Overlap, a.name, b.name, ov,
                             "blocks '" + a.name + "' and '" + b.name + "' overlap"});
            }
        }
    }
    return report;
}

double resistivity_to_conductivity(double resistivity) {
    if (!(resistivity > 0.0))
        throw std::domain_error("thermal resistivity must be positive");
    return 1.0 / resistivity;
}

std::vector<Layer> LayerStack::solvable_layers() const {
    std::vector<Layer> out = layers_;
    const double w = die_width();
    const double h = die_height();
    int next = static_cast<int>(out.size());

    auto package_layer = [&](std::string name, double resistivity, double thickness) {
        Layer l;
        l.index = next++;
        l.has_lateral_flow = true;
        l.dissipates_power = false;
        l.resistivity = resistivity;
        l.thickness = thickness;
        l.floorplan = uniform_floorplan(std::move(name), w, h);
        out.push_back(std::move(l));
    };
    package_layer("tim2", package_.tim2_resistivity, package_.tim2_thickness);
    package_layer("spreader", 1.0 / package_.spreader_conductivity, package_.spreader_thickness);
    package_layer("sink", 1.0 / package_.sink_conductivity, package_.sink_thickness);
    return out;
}

namespace {

void check_package(const PackageParams& p) {
    const std::pair<const char*, double> fields[] = {
        {"tim2_thickness", p.tim2_thickness},
        {"tim2_resistivity", p.tim2_resistivity},
        {"spreader_thickness", p.spreader_thickness},
        {"spreader_conductivity", p.spreader_conductivity},
        {"sink_thickness", p.sink_thickness},
        {"sink_conductivity", p.sink_conductivity},
        {"convection_resistance", p.convection_resistance},
        {"ambient", p.ambient},
    };
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value))
            throw ConfigError(std::string("package parameter ") + name + " must be positive");
    }
}

}  // namespace

LayerStack build_stack(std::vector<Layer> user_layers, const PackageParams& pkg) {
    if (user_layers.empty()) throw ConfigError("layer stack needs at least one layer");
    check_package(pkg);

    std::stable_sort(user_layers.begin(), user_layers.end(),
                     [](const Layer& a, const Layer& b) { return a.index < b.index; });

    const auto& ref = user_layers.front().floorplan;
    const double tol = 1e-12 * std::max(ref.die_width, ref.die_height);
    std::set<std::string> powered_names;

    for (std::size_t i = 0; i < user_layers.size(); ++i) {
        const auto& l = user_layers[i];
        const std::string where = "layer " + std::to_string(l.index);
        if (l.index != static_cast<int>(i))
            throw ConfigError("layer indices must be contiguous from 0 (found " +
                              std::to_string(l.index) + " at position " + std::to_string(i) + ")");
        if (!(l.thickness > 0.0)) throw ConfigError(where + ": thickness must be positive");
        if (!(l.resistivity > 0.0)) throw ConfigError(where + ": resistivity must be positive");
        if (l.floorplan.blocks.empty()) throw ConfigError(where + ": empty floorplan");
        if (std::abs(l.floorplan.die_width - ref.die_width) > tol ||
            std::abs(l.floorplan.die_height - ref.die_height) > tol)
            throw ConfigError(where + ": die dimensions differ from layer 0");
        auto report = validate_floorplan(l.floorplan);
        if (!report.ok()) throw ConfigError(where + ": " + report.violations.front().message);
        if (l.dissipates_power) {
            for (const auto& b : l.floorplan.blocks) {
                if (!powered_names.insert(b.name).second)
                    throw ConfigError("block name '" + b.name +
                                      "' appears in more than one power-dissipating layer");
            }
        }
    }

    LayerStack stack;
    stack.layers_ = std::move(user_layers);
    stack.package_ = pkg;
    return stack;
}

double total_power(const PowerMap& pm) {
    double sum = 0.0;
    for (const auto& [name, watts] : pm) sum += watts;
    return sum;
}

void check_power_map(const PowerMap& pm, const LayerStack& stack) {
    for (const auto& [name, watts] : pm) {
        if (!(watts >= 0.0)) throw ConfigError("negative power for block '" + name + "'");
        bool found = false;
        for (const auto& l : stack.layers())
            if (l.dissipates_power && l.floorplan.find(name)) found = true;
        if (!found) throw ConfigError("power assigned to unknown block '" + name + "'");
    }
}

std::string_view to_string(ScenarioId id) {
    switch (id) {
        case ScenarioId::S1: return "S1";
        case ScenarioId::S2: return "S2";
        case ScenarioId::S3: return "S3";
        case ScenarioId::S4: return "S4";
        case ScenarioId::S5: return "S5";
        case ScenarioId::Flat2DProc: return "FLAT2D_PROC";
        case ScenarioId::Flat2DMem: return "FLAT2D_MEM";
    }
    return "?";
}

std::optional<ScenarioId> parse_scenario_id(std::string_view text) {
    for (auto id : all_scenarios())
        if (to_string(id) == text) return id;
    return std::nullopt;
}

const std::vector<ScenarioId>& stacked_scenarios() {
    static const std::vector<ScenarioId> ids = {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                                                ScenarioId::S4, ScenarioId::S5};
    return ids;
}

const std::vector<ScenarioId>& all_scenarios() {
    static const std::vector<ScenarioId> ids = {
        ScenarioId::S1, ScenarioId::S2,         ScenarioId::S3,        ScenarioId::S4,
        ScenarioId::S5, ScenarioId::Flat2DProc, ScenarioId::Flat2DMem};
    return ids;
}

// 16 mm die. Processors are 3.5 mm x 7 mm in two rows of four, inset 1 mm
// from the left and right die edges, with the crossbar strip between rows.
Floorplan processor_floorplan() {
    return floorplan_from_blocks({
        {"P1", 3.5e-3, 7e-3, 1e-3, 9e-3},
        {"P2", 3.5e-3, 7e-3, 4.5e-3, 9e-3},
        {"P3", 3.5e-3, 7e-3, 8e-3, 9e-3},
        {"P4", 3.5e-3, 7e-3, 11.5e-3, 9e-3},
        {"Cb1", 16e-3, 2e-3, 0.0, 7e-3},
        {"P5", 3.5e-3, 7e-3, 1e-3, 0.0},
        {"P6", 3.5e-3, 7e-3, 4.5e-3, 0.0},
        {"P7", 3.5e-3, 7e-3, 8e-3, 0.0},
        {"P8", 3.5e-3, 7e-3, 11.5e-3, 0.0},
    });
}

// Four 7 mm banks in the corners; cb is the vertical arm of the channel
// between them (the horizontal arm is left as bare, unnamed silicon).
Floorplan memory_floorplan() {
    return floorplan_from_blocks({
        {"M1", 7e-3, 7e-3, 0.0, 9e-3},
        {"M2", 7e-3, 7e-3, 9e-3, 9e-3},
        {"M3", 7e-3, 7e-3, 0.0, 0.0},
        {"M4", 7e-3, 7e-3, 9e-3, 0.0},
        {"cb", 2e-3, 16e-3, 7e-3, 0.0},
    });
}

Floorplan uniform_floorplan(std::string name, double width, double height) {
    return floorplan_from_blocks({{std::move(name), width, height, 0.0, 0.0}});
}

Layer processor_layer(int index) {
    return {index, true, true, kSiliconHeatCapacity, kSiliconResistivity, kDeviceThickness,
            processor_floorplan()};
}

Layer tim_layer(int index, double thickness, double resistivity) {
    return {index, true, false, kTimHeatCapacity, resistivity, thickness, uniform_floorplan("TIM")};
}

Layer memory_layer(int index) {
    return {index, true, true, kSiliconHeatCapacity, kSiliconResistivity, kDeviceThickness,
            memory_floorplan()};
}

LayerStack reference_stack(const PackageParams& pkg) {
    return build_stack({processor_layer(0), tim_layer(1), memory_layer(2)}, pkg);
}

LayerStack single_layer_stack(const Layer& layer, const PackageParams& pkg) {
    Layer l = layer;
    l.index = 0;
    return build_stack({std::move(l)}, pkg);
}

PowerMap scenario_power_map(ScenarioId id) {
    const std::vector<std::string> processors = {"P1", "P2", "P3", "P4", "P5", "P6", "P7", "P8"};
    const std::vector<std::string> memories = {"M1", "M2", "M3", "M4"};
    const std::vector<std::string> corners = {"P1", "P4", "P5", "P8"};
    const std::vector<std::string> inner = {"P2", "P3", "P6", "P7"};

    PowerMap pm;
    const bool has_proc_layer = id != ScenarioId::Flat2DMem;
    const bool has_mem_layer = id != ScenarioId::Flat2DProc;
    if (has_proc_layer) {
        for (const auto& p : processors) pm[p] = 0.0;
        pm["Cb1"] = 0.0;
    }
    if (has_mem_layer) {
        for (const auto& m : memories) pm[m] = 0.0;
        pm["cb"] = 0.0;
    }

    auto power = [&pm](const std::vector<std::string>& names, double watts) {
        for (const auto& n : names) pm[n] = watts;
    };
    switch (id) {
        case ScenarioId::S1:
        case ScenarioId::Flat2DProc: power(processors, kProcessorPower); break;
        case ScenarioId::S2:
        case ScenarioId::Flat2DMem: power(memories, kMemoryPower); break;
        case ScenarioId::S3:
            power(processors, kProcessorPower);
            power(memories, kMemoryPower);
            break;
        case ScenarioId::S4:
            power(corners, kProcessorPower);
            power(memories, kMemoryPower);
            break;
        case ScenarioId::S5:
            power(inner, kProcessorPower);
            power(memories, kMemoryPower);
            break;
    }
    return pm;
}

Scenario scenario(ScenarioId id) {
    std::string description;
    switch (id) {
        case ScenarioId::S1: description = "processor layer powered only"; break;
        case ScenarioId::S2: description = "memory layer powered only"; break;
        case ScenarioId::S3: description = "both layers powered"; break;
        case ScenarioId::S4: description = "memory + corner processors P1,P4,P5,P8"; break;
        case ScenarioId::S5: description = "memory + inner processors P2,P3,P6,P7"; break;
        case ScenarioId::Flat2DProc: description = "processor die alone"; break;
        case ScenarioId::Flat2DMem: description = "memory die alone"; break;
    }
    return {id, std::move(description), scenario_power_map(id)};
}

}  // namespace stacktherm
