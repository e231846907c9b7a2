#pragma once

// Discretization of a layer stack into a structured 3D conductance network.
//
// Nodes sit at cell centers on each layer's mid-plane and are numbered
// layer-major: idx(layer, row, col) = layer*rows*cols + row*cols + col,
// with row 0 at the bottom edge (y = 0) and col 0 at the left edge (x = 0).
// The bottom face and all side faces are adiabatic; heat leaves only through
// the top (sink) layer into ambient.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stacktherm/model.hpp"

namespace stacktherm {

struct GridSpec {
    int rows = 64;
    int cols = 64;

    static constexpr int kMin = 8;
    static constexpr int kMax = 1024;

    bool valid() const { return rows >= kMin && cols >= kMin && rows <= kMax && cols <= kMax; }
    bool operator==(const GridSpec&) const = default;
};

/// Material of one solvable layer as seen by the grid.
struct LayerMaterial {
    double conductivity = 0.0;  // W/(m K)
    double thickness = 0.0;     // m
    bool has_lateral_flow = true;
    bool dissipates_power = false;
};

struct CellFraction {
    int cell = 0;           // row*cols + col within the layer
    double fraction = 0.0;  // overlap area / cell area, in [0, 1]
};

struct BlockOverlap {
    std::string name;
    int layer = 0;
    Block block;
    std::vector<CellFraction> cells;
};

struct GridModel {
    GridSpec spec;
    double die_width = 0.0;
    double die_height = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    std::vector<LayerMaterial> layers;  // solvable layers, bottom to top
    int user_layers = 0;
    std::vector<BlockOverlap> overlaps;  // blocks of all user layers
    double convection_resistance = 0.0;
    double ambient = 0.0;
    std::vector<std::string> warnings;

    int n_layers() const { return static_cast<int>(layers.size()); }
    int cells_per_layer() const { return spec.rows * spec.cols; }
    std::size_t n_nodes() const {
        return static_cast<std::size_t>(n_layers()) * static_cast<std::size_t>(cells_per_layer());
    }
    std::size_t idx(int layer, int row, int col) const {
        return static_cast<std::size_t>(layer) * cells_per_layer() +
               static_cast<std::size_t>(row) * spec.cols + col;
    }
    double cell_area() const { return dx * dy; }
    double die_area() const { return die_width * die_height; }

    /// Overlap record for a block in a power-dissipating layer, or nullptr.
    const BlockOverlap* find_powered(const std::string& name) const;
};

/// Cells of a (rows x cols) grid over a die intersected by a block. Degenerate
/// (zero-area) intersections are dropped.
std::vector<CellFraction> block_cell_fractions(const Block& block, double die_width,
                                               double die_height, const GridSpec& spec);

/// Throws ConfigError for an invalid grid spec.
GridModel discretize(const LayerStack& stack, const GridSpec& spec);

/// Symmetric conductance matrix in CSR form (both triangles stored, columns
/// sorted within each row) plus the ambient coupling of every node.
struct ConductanceMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;
    std::vector<double> g_amb;
    /// Largest |i - j| over stored entries; node layout gives rows*cols.
    std::size_t half_bandwidth = 0;

    /// G[i][j], zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    /// y = G x
    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    std::vector<double> diagonal() const;
};

/// Vertical conductance between two stacked cells of area `area` whose
/// centers sit at the mid-planes of their layers.
double vertical_conductance(double area, double t_lower, double k_lower, double t_upper,
                            double k_upper);

ConductanceMatrix assemble_conductances(const GridModel& gm);

/// Heat injected at each node (W). Throws ConfigError for unknown blocks or
/// negative powers.
std::vector<double> power_vector(const GridModel& gm, const PowerMap& pm);

}  // namespace stacktherm
