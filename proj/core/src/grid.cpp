#include "stacktherm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stacktherm/errors.hpp"

namespace stacktherm {

const BlockOverlap* GridModel::find_powered(const std::string& name) const {
    for (const auto& o : overlaps)
        if (o.name == name && layers[o.layer].dissipates_power) return &o;
    return nullptr;
}

std::vector<CellFraction> block_cell_fractions(const Block& block, double die_width,
                                               double die_height, const GridSpec& spec) {
    const double dx = die_width / spec.cols;
    const double dy = die_height / spec.rows;
    const double cell_area = dx * dy;

    auto clamp_index = [](double v, int n) {
        return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1);
    };
    const int c0 = clamp_index(block.left_x / dx, spec.cols);
    const int c1 = clamp_index(block.right_x() / dx, spec.cols);
    const int r0 = clamp_index(block.bottom_y / dy, spec.rows);
    const int r1 = clamp_index(block.top_y() / dy, spec.rows);

    std::vector<CellFraction> out;
    for (int r = r0; r <= r1; ++r) {
        const double y0 = r * dy;
        const double h = std::min(block.top_y(), y0 + dy) - std::max(block.bottom_y, y0);
        if (h <= 0.0) continue;
        for (int c = c0; c <= c1; ++c) {
            const double x0 = c * dx;
            const double w = std::min(block.right_x(), x0 + dx) - std::max(block.left_x, x0);
            if (w <= 0.0) continue;
            out.push_back({r * spec.cols + c, std::min(1.0, (w * h) / cell_area)});
        }
    }
    return out;
}

GridModel discretize(const LayerStack& stack, const GridSpec& spec) {
    if (!spec.valid())
        throw ConfigError("grid must be between 8x8 and 1024x1024 (got " +
                          std::to_string(spec.rows) + "x" + std::to_string(spec.cols) + ")");

    GridModel gm;
    gm.spec = spec;
    gm.die_width = stack.die_width();
    gm.die_height = stack.die_height();
    gm.dx = gm.die_width / spec.cols;
    gm.dy = gm.die_height / spec.rows;
    gm.convection_resistance = stack.package().convection_resistance;
    gm.ambient = stack.package().ambient;
    gm.user_layers = static_cast<int>(stack.layers().size());

    for (const auto& l : stack.solvable_layers())
        gm.layers.push_back({l.conductivity(), l.thickness, l.has_lateral_flow, l.dissipates_power});

    for (const auto& l : stack.layers()) {
        for (const auto& b : l.floorplan.blocks) {
            if (b.width < gm.dx || b.height < gm.dy) {
                char buf[160];
                std::snprintf(buf, sizeof buf,
                              "block %s (layer %d) is smaller than one grid cell", b.name.c_str(),
                              l.index);
                gm.warnings.emplace_back(buf);
            }
            gm.overlaps.push_back(
                {b.name, l.index, b, block_cell_fractions(b, gm.die_width, gm.die_height, spec)});
        }
    }
    return gm;
}

double ConductanceMatrix::at(std::size_t i, std::size_t j) const {
    const auto begin = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto end = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return 0.0;
    return val[static_cast<std::size_t>(it - col.begin())];
}

void ConductanceMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
        y[i] = s;
    }
}

std::vector<double> ConductanceMatrix::diagonal() const {
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i] = at(i, i);
    return d;
}

double vertical_conductance(double area, double t_lower, double k_lower, double t_upper,
                            double k_upper) {
    return area / (t_lower / (2.0 * k_lower) + t_upper / (2.0 * k_upper));
}

ConductanceMatrix assemble_conductances(const GridModel& gm) {
    const int rows = gm.spec.rows;
    const int cols = gm.spec.cols;
    const int nl = gm.n_layers();
    const double area = gm.cell_area();

    ConductanceMatrix G;
    G.n = gm.n_nodes();
    G.row_ptr.reserve(G.n + 1);
    G.row_ptr.push_back(0);
    G.col.reserve(G.n * 7);
    G.val.reserve(G.n * 7);
    G.g_amb.assign(G.n, 0.0);

    // Per-layer couplings: lateral x, lateral y, vertical to the layer above.
    std::vector<double> gx(nl), gy(nl), gz(nl, 0.0);
    for (int l = 0; l < nl; ++l) {
        const auto& m = gm.layers[l];
        gx[l] = m.has_lateral_flow ? m.conductivity * (gm.dy * m.thickness) / gm.dx : 0.0;
        gy[l] = m.has_lateral_flow ? m.conductivity * (gm.dx * m.thickness) / gm.dy : 0.0;
        if (l + 1 < nl) {
            const auto& up = gm.layers[l + 1];
            gz[l] = vertical_conductance(area, m.thickness, m.conductivity, up.thickness,
                                         up.conductivity);
        }
    }
    const auto& sink = gm.layers.back();
    const double g_top = 1.0 / (sink.thickness / (2.0 * sink.conductivity * area) +
                                gm.convection_resistance * gm.die_area() / area);

    const std::size_t plane = static_cast<std::size_t>(rows) * cols;
    for (int l = 0; l < nl; ++l) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const std::size_t i = gm.idx(l, r, c);
                double diag = 0.0;
                auto off = [&](std::size_t j, double g) {
                    if (g == 0.0) return;
                    G.col.push_back(j);
                    G.val.push_back(-g);
                    diag += g;
                    G.half_bandwidth = std::max(G.half_bandwidth, i > j ? i - j : j - i);
                };
                // Columns are emitted in increasing order.
                if (l > 0) off(i - plane, gz[l - 1]);
                if (r > 0) off(i - cols, gy[l]);
                if (c > 0) off(i - 1, gx[l]);
                const std::size_t diag_pos = G.col.size();
                G.col.push_back(i);
                G.val.push_back(0.0);
                if (c + 1 < cols) off(i + 1, gx[l]);
                if (r + 1 < rows) off(i + cols, gy[l]);
                if (l + 1 < nl) off(i + plane, gz[l]);
                if (l == nl - 1) {
                    G.g_amb[i] = g_top;
                    diag += g_top;
                }
                G.val[diag_pos] = diag;
                G.row_ptr.push_back(G.col.size());
            }
        }
    }
    return G;
}

std::vector<double> power_vector(const GridModel& gm, const PowerMap& pm) {
    std::vector<double> q(gm.n_nodes(), 0.0);
    const double cell_area = gm.cell_area();
    for (const auto& [name, watts] : pm) {
        const BlockOverlap* o = gm.find_powered(name);
        if (!o) throw ConfigError("power assigned to unknown block '" + name + "'");
        if (!(watts >= 0.0)) throw ConfigError("negative power for block '" + name + "'");
        if (watts == 0.0) continue;
        const double per_area = watts / o->block.area();
        const std::size_t base = static_cast<std::size_t>(o->layer) * gm.cells_per_layer();
        for (const auto& cf : o->cells) q[base + cf.cell] += per_area * cf.fraction * cell_area;
    }
    return q;
}

}  // namespace stacktherm
