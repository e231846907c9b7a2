#pragma once

#include <string>
#include <vector>

namespace stacktherm {

struct GridModel;
struct TemperatureField;

struct BlockTemperature {
    std::string unit;
    int layer = 0;
    double max = 0.0;   // over cells whose center lies inside the block
    double mean = 0.0;  // overlap-fraction weighted
};

struct HotspotLocation {
    double temperature = 0.0;
    int layer = 0;
    int row = 0;
    int col = 0;
};

/// Blocks whose max is within this many kelvin of the global hotspot form the
/// hotspot unit set.
inline constexpr double kHotspotTolerance = 1e-6;

struct BlockReport {
    std::vector<BlockTemperature> blocks;  // floorplan order, bottom layer first
    HotspotLocation hotspot;
    std::vector<HotspotLocation> layer_hotspots;

    const BlockTemperature* find(const std::string& unit) const;
    /// Sorted names of the blocks attaining the global hotspot.
    std::vector<std::string> hotspot_units(double tolerance = kHotspotTolerance) const;
};

/// Reports every block of the power-dissipating user layers. Ties for the
/// hotspot go to the lowest node index.
BlockReport block_report(const TemperatureField& field, const GridModel& gm);

}  // namespace stacktherm
