#pragma once

#include <span>
#include <vector>

#include "stacktherm/model.hpp"

namespace stacktherm {

/// Closed-form 1D series-resistance solution for power spread uniformly over
/// the bottom layer of a laterally uniform stack. Each layer is one lumped
/// node at its mid-plane:
///
///   dT_i = P * (R_conv + t_i / (2 k_i A) + sum_{j > i} t_j / (k_j A))
///
/// Uses no grid; it checks the discretized solver.
std::vector<double> analytic_uniform_stack(double total_power, std::span<const Layer> layers,
                                           double footprint_area, double convection_resistance);

/// Same, over the solvable layers of a stack (package included).
std::vector<double> analytic_uniform_stack(double total_power, const LayerStack& stack);

}  // namespace stacktherm
