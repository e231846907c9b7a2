#include <algorithm>
#include <cmath>

#include "cli.hpp"
#include "stacktherm/model.hpp"
#include "stacktherm/oracle.hpp"
#include "stacktherm/solver.hpp"

namespace stacktherm::cli {
namespace {

LayerStack uniform_heater_stack() {
    Layer heater{0, true, true, kSiliconHeatCapacity, kSiliconResistivity, kDeviceThickness,
                 uniform_floorplan("heater")};
    Layer cap{2, true, false, kSiliconHeatCapacity, kSiliconResistivity, kDeviceThickness,
              uniform_floorplan("cap")};
    return build_stack({heater, tim_layer(1), cap}, {});
}

LayerStack mirrored(const LayerStack& stack) {
    auto layers = stack.layers();
    for (auto& l : layers) l.floorplan = mirrored_left_right(l.floorplan);
    return build_stack(std::move(layers), stack.package());
}

double max_abs_diff_of_rises(const SolveResult& a, const SolveResult& b, double scale_b,
                             const SolveResult* c = nullptr) {
    const double amb = a.model.ambient;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.field.size(); ++i) {
        double rhs = scale_b * (b.field.values[i] - amb);
        if (c) rhs += c->field.values[i] - amb;
        worst = std::max(worst, std::abs((a.field.values[i] - amb) - rhs));
    }
    return worst;
}

double mirror_mismatch(const TemperatureField& a, const TemperatureField& b) {
    double worst = 0.0;
    for (int l = 0; l < a.layers; ++l)
        for (int r = 0; r < a.rows; ++r)
            for (int c = 0; c < a.cols; ++c)
                worst = std::max(worst, std::abs(a.at(l, r, c) - b.at(l, r, a.cols - 1 - c)));
    return worst;
}

}  // namespace

std::vector<CheckOutcome> run_validation(int rows, int cols, bool corrupt) {
    const GridSpec grid{rows, cols};
    SolveOptions opts;
    std::vector<CheckOutcome> out;
    double worst_balance = 0.0;
    bool any_cg = false;

    auto solve = [&](const LayerStack& stack, const PowerMap& pm) {
        auto r = steady_state(stack, pm, grid, opts);
        worst_balance = std::max(worst_balance, r.energy_residual);
        any_cg = any_cg || r.stats.method == SolveMethod::Cg;
        return r;
    };
    // Looser limits when the grid is too large for the direct path.
    auto limit = [&](const SolveResult& r, double direct, double cg) {
        return r.stats.method == SolveMethod::Direct ? direct : cg;
    };

    {
        const auto stack = uniform_heater_stack();
        const double watts = 100.0;
        const auto r = solve(stack, {{"heater", watts}});
        auto layers = stack.solvable_layers();
        double r_conv = stack.package().convection_resistance;
        if (corrupt) r_conv *= 1.01;
        const auto expected = analytic_uniform_stack(
            watts, layers, stack.die_width() * stack.die_height(), r_conv);
        const int plane = rows * cols;
        double rel = 0.0, spread = 0.0;
        for (int l = 0; l < r.field.layers; ++l) {
            const auto first = r.field.values.begin() + static_cast<std::ptrdiff_t>(l) * plane;
            const auto [lo, hi] = std::minmax_element(first, first + plane);
            spread = std::max(spread, *hi - *lo);
            for (auto it = first; it != first + plane; ++it)
                rel = std::max(rel, std::abs((*it - r.model.ambient) - expected[l]) / expected[l]);
        }
        out.push_back({"oracle-uniform-stack", rel, 1e-6, rel <= 1e-6});
        const double spread_limit = limit(r, 1e-9, 1e-6);
        out.push_back({"lateral-flatness", spread, spread_limit, spread <= spread_limit});
    }

    const auto ref = reference_stack();
    const auto s1 = solve(ref, scenario_power_map(ScenarioId::S1));
    const auto s2 = solve(ref, scenario_power_map(ScenarioId::S2));
    const auto s3 = solve(ref, scenario_power_map(ScenarioId::S3));
    {
        const double d = max_abs_diff_of_rises(s3, s1, 1.0, &s2);
        const double lim = limit(s3, 1e-8, 1e-5);
        out.push_back({"superposition", d, lim, d <= lim});

        auto doubled = scenario_power_map(ScenarioId::S3);
        for (auto& [name, watts] : doubled) watts *= 2.0;
        const auto s3x2 = solve(ref, doubled);
        const double ds = max_abs_diff_of_rises(s3x2, s3, 2.0);
        out.push_back({"power-scaling", ds, lim, ds <= lim});
    }
    {
        const auto zero = solve(ref, {});
        double d = 0.0;
        for (double t : zero.field.values) d = std::max(d, std::abs(t - zero.model.ambient));
        out.push_back({"zero-power-ambient", d, 1e-12, d <= 1e-12});
    }
    {
        const PowerMap lopsided = {{"P1", 50.9}, {"P6", 20.0}, {"M2", 1.3}};
        const auto a = solve(ref, lopsided);
        const auto b = solve(mirrored(ref), lopsided);
        const double d = mirror_mismatch(a.field, b.field);
        const double lim = limit(a, 1e-9, 1e-6);
        out.push_back({"mirror-symmetry", d, lim, d <= lim});

        const double self = mirror_mismatch(s3.field, s3.field);
        out.push_back({"s3-left-right-symmetry", self, lim, self <= lim});
    }

    const double balance_limit = any_cg ? 10.0 * opts.tolerance : 1e-9;
    out.push_back({"energy-balance", worst_balance, balance_limit, worst_balance <= balance_limit});
    return out;
}

}  // namespace stacktherm::cli
