#include "stacktherm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <stdexcept>

#include "stacktherm/errors.hpp"

namespace stacktherm {
namespace {

// Evaluates fn(0..n-1) with up to `jobs` concurrent tasks, results in order.
template <class T>
std::vector<T> evaluate(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out;
    out.reserve(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
        return out;
    }
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(jobs)) {
        std::vector<std::future<T>> batch;
        const std::size_t stop = std::min(n, start + static_cast<std::size_t>(jobs));
        for (std::size_t i = start; i < stop; ++i)
            batch.push_back(std::async(std::launch::async, fn, i));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

}  // namespace

SolveResult run_2d_layer(LayerChoice choice, const ExperimentConfig& cfg) {
    if (choice == LayerChoice::Processor)
        return steady_state(single_layer_stack(processor_layer(), cfg.package),
                            scenario_power_map(ScenarioId::Flat2DProc), cfg.grid, cfg.solve);
    return steady_state(single_layer_stack(memory_layer(), cfg.package),
                        scenario_power_map(ScenarioId::Flat2DMem), cfg.grid, cfg.solve);
}

std::vector<ScenarioRun> run_five_simulations(const ExperimentConfig& cfg,
                                              const std::optional<LayerStack>& stack) {
    const LayerStack base = stack ? *stack : reference_stack(cfg.package);
    const auto& ids = stacked_scenarios();
    return evaluate<ScenarioRun>(ids.size(), cfg.jobs, [&](std::size_t i) {
        return ScenarioRun{ids[i],
                           steady_state(base, scenario_power_map(ids[i]), cfg.grid, cfg.solve)};
    });
}

std::string_view to_string(SweepParameter p) {
    return p == SweepParameter::TimThickness ? "tim_thickness" : "tim_resistivity";
}

void validate_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep needs at least one value");
    for (double v : spec.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError("sweep values must be positive (got " + std::to_string(v) + ")");
    auto sorted = spec.values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("sweep values must be distinct");
}

TrendReport check_trends(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 2) throw std::invalid_argument("trend check needs at least two points");
    for (std::size_t i = 1; i < pairs.size(); ++i)
        if (!(pairs[i].first > pairs[i - 1].first))
            throw std::invalid_argument("trend check needs strictly increasing x");

    TrendReport t;
    const double n = static_cast<double>(pairs.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pairs) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : pairs) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    t.slope = sxy / sxx;
    t.intercept = my - t.slope * mx;

    t.strictly_increasing = true;
    double lo = pairs.front().second, hi = lo;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [x, y] = pairs[i];
        t.max_deviation = std::max(t.max_deviation, std::abs(y - (t.intercept + t.slope * x)));
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        if (i > 0 && !(y > pairs[i - 1].second)) t.strictly_increasing = false;
    }
    t.range = hi - lo;

    if (pairs.size() >= 3) {
        const double first = pairs[1].second - pairs[0].second;
        const double last = pairs.back().second - pairs[pairs.size() - 2].second;
        if (first != 0.0) t.growth_ratio = last / first;
    }
    return t;
}

std::vector<SweepPoint> SweepResult::points() const {
    std::vector<SweepPoint> out;
    for (const auto& r : runs)
        out.push_back({r.value, r.report.hotspot.temperature, r.report.hotspot_units()});
    return out;
}

int tim_layer_index(const LayerStack& stack) {
    for (const auto& l : stack.layers())
        if (!l.dissipates_power) return l.index;
    throw ConfigError("stack has no TIM (non-dissipating) layer to sweep");
}

LayerStack with_tim_parameter(const LayerStack& stack, SweepParameter parameter, double value) {
    const int tim = tim_layer_index(stack);
    auto layers = stack.layers();
    if (parameter == SweepParameter::TimThickness)
        layers[tim].thickness = value;
    else
        layers[tim].resistivity = value;
    return build_stack(std::move(layers), stack.package());
}

SweepResult run_sweep(const SweepSpec& spec, const ExperimentConfig& cfg,
                      const std::optional<LayerStack>& stack, const std::optional<PowerMap>& power) {
    validate_sweep(spec);
    const LayerStack base = stack ? *stack : reference_stack(cfg.package);
    tim_layer_index(base);
    const PowerMap pm = power ? *power : scenario_power_map(spec.base);

    SweepResult res;
    res.spec = spec;
    std::sort(res.spec.values.begin(), res.spec.values.end());

    auto solve_at = [&](double value) {
        auto r = steady_state(with_tim_parameter(base, spec.parameter, value), pm, cfg.grid,
                              cfg.solve);
        return SweepRun{value, std::move(r.report), r.stats, r.energy_residual};
    };
    const auto& values = res.spec.values;
    res.runs = evaluate<SweepRun>(values.size(), cfg.jobs,
                                  [&](std::size_t i) { return solve_at(values[i]); });

    if (res.runs.size() >= 2) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& r : res.runs) pairs.emplace_back(r.value, r.report.hotspot.temperature);
        res.trend = check_trends(pairs);

        if (spec.parameter == SweepParameter::TimThickness) {
            PlateauProbe probe;
            probe.probe_value = values.front() / 2.0;
            probe.probe_hotspot = solve_at(probe.probe_value).report.hotspot.temperature;
            const auto n = res.runs.size();
            const double last_step = res.runs[n - 1].report.hotspot.temperature -
                                     res.runs[n - 2].report.hotspot.temperature;
            const double low_step = res.runs.front().report.hotspot.temperature - probe.probe_hotspot;
            probe.ratio = last_step != 0.0 ? low_step / last_step : 0.0;
            res.plateau = probe;
        }
    }
    return res;
}

SweepResult sweep_tim_thickness(std::vector<double> values, const ExperimentConfig& cfg) {
    return run_sweep({SweepParameter::TimThickness, std::move(values), ScenarioId::S3}, cfg);
}

SweepResult sweep_tim_resistivity(std::vector<double> values, const ExperimentConfig& cfg) {
    return run_sweep({SweepParameter::TimResistivity, std::move(values), ScenarioId::S3}, cfg);
}

}  // namespace stacktherm
