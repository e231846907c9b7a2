#include "stacktherm/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stacktherm/grid.hpp"
#include "stacktherm/solver.hpp"

namespace stacktherm {

const BlockTemperature* BlockReport::find(const std::string& unit) const {
    for (const auto& b : blocks)
        if (b.unit == unit) return &b;
    return nullptr;
}

std::vector<std::string> BlockReport::hotspot_units(double tolerance) const {
    std::vector<std::string> out;
    for (const auto& b : blocks)
        if (b.max >= hotspot.temperature - tolerance) out.push_back(b.unit);
    std::sort(out.begin(), out.end());
    return out;
}

BlockReport block_report(const TemperatureField& field, const GridModel& gm) {
    BlockReport rep;
    const int rows = gm.spec.rows;
    const int cols = gm.spec.cols;
    const int plane = rows * cols;

    for (const auto& o : gm.overlaps) {
        if (!gm.layers[o.layer].dissipates_power) continue;
        const double* t = field.values.data() + static_cast<std::size_t>(o.layer) * plane;
        const double ex = 1e-9 * gm.dx;
        const double ey = 1e-9 * gm.dy;

        double max_inside = -std::numeric_limits<double>::infinity();
        double max_any = -std::numeric_limits<double>::infinity();
        double weighted = 0.0;
        double weight = 0.0;
        for (const auto& cf : o.cells) {
            const double temp = t[cf.cell];
            const double cx = (cf.cell % cols + 0.5) * gm.dx;
            const double cy = (cf.cell / cols + 0.5) * gm.dy;
            if (cx >= o.block.left_x - ex && cx <= o.block.right_x() + ex &&
                cy >= o.block.bottom_y - ey && cy <= o.block.top_y() + ey)
                max_inside = std::max(max_inside, temp);
            max_any = std::max(max_any, temp);
            weighted += cf.fraction * temp;
            weight += cf.fraction;
        }
        // Blocks narrower than a cell may contain no cell center.
        const double mx = std::isinf(max_inside) ? max_any : max_inside;
        const double mean = weight > 0.0 ? weighted / weight : mx;
        // Partially covered edge cells can pull the weighted mean above the
        // center-cell max.
        rep.blocks.push_back({o.name, o.layer, mx, std::min(mean, mx)});
    }

    rep.layer_hotspots.resize(field.layers);
    rep.hotspot.temperature = -std::numeric_limits<double>::infinity();
    for (int l = 0; l < field.layers; ++l) {
        auto& lh = rep.layer_hotspots[l];
        lh.temperature = -std::numeric_limits<double>::infinity();
        lh.layer = l;
        for (int i = 0; i < plane; ++i) {
            const double temp = field.values[static_cast<std::size_t>(l) * plane + i];
            if (temp > lh.temperature) lh = {temp, l, i / cols, i % cols};
        }
        if (lh.temperature > rep.hotspot.temperature) rep.hotspot = lh;
    }
    return rep;
}

}  // namespace stacktherm
