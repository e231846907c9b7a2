#include "stacktherm/oracle.hpp"

namespace stacktherm {

std::vector<double> analytic_uniform_stack(double total_power, std::span<const Layer> layers,
                                           double footprint_area, double convection_resistance) {
    std::vector<double> dt(layers.size(), 0.0);
    double above = convection_resistance;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const double r_full = layers[i].thickness * layers[i].resistivity / footprint_area;
        dt[i] = total_power * (above + 0.5 * r_full);
        above += r_full;
    }
    return dt;
}

std::vector<double> analytic_uniform_stack(double total_power, const LayerStack& stack) {
    const auto layers = stack.solvable_layers();
    return analytic_uniform_stack(total_power, layers, stack.die_width() * stack.die_height(),
                                  stack.package().convection_resistance);
}

}  // namespace stacktherm
