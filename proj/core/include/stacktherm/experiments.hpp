#pragma once

// The reference experiment suite: single-die runs, the five powering
// scenarios on the processor/TIM/memory stack, and sweeps over the TIM
// layer's thickness and resistivity.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stacktherm/formats.hpp"
#include "stacktherm/model.hpp"
#include "stacktherm/solver.hpp"

namespace stacktherm {

struct ExperimentConfig {
    PackageParams package;
    GridSpec grid;
    SolveOptions solve;
    int jobs = 1;  // concurrent solves; results do not depend on it
};

enum class LayerChoice { Processor, Memory };

SolveResult run_2d_layer(LayerChoice choice, const ExperimentConfig& cfg = {});

struct ScenarioRun {
    ScenarioId id;
    SolveResult result;
};

/// S1..S5 on `stack` (the reference stack when omitted).
std::vector<ScenarioRun> run_five_simulations(const ExperimentConfig& cfg = {},
                                              const std::optional<LayerStack>& stack = {});

enum class SweepParameter { TimThickness, TimResistivity };

std::string_view to_string(SweepParameter p);

struct SweepSpec {
    SweepParameter parameter = SweepParameter::TimThickness;
    std::vector<double> values;
    ScenarioId base = ScenarioId::S3;
};

/// Throws ConfigError unless values are nonempty, positive and distinct.
void validate_sweep(const SweepSpec& spec);

struct TrendReport {
    bool strictly_increasing = false;
    double slope = 0.0;
    double intercept = 0.0;
    double max_deviation = 0.0;  // max |y - fit| over the points
    double range = 0.0;          // max y - min y
    std::optional<double> growth_ratio;  // last increment / first increment, 3+ points

    /// max_deviation as a fraction of range (0 when the range is 0).
    double deviation_fraction() const { return range > 0.0 ? max_deviation / range : 0.0; }
};

/// Least-squares line and monotonicity over (x, hotspot) pairs. Requires at
/// least two pairs with strictly increasing x; throws std::invalid_argument.
TrendReport check_trends(std::span<const std::pair<double, double>> pairs);

struct SweepRun {
    double value = 0.0;
    BlockReport report;
    SolveStats stats;
    double energy_residual = 0.0;
};

/// Sensitivity at the thin end of a thickness sweep: the hotspot change from
/// halving the smallest thickness, relative to the last sampled increment.
struct PlateauProbe {
    double probe_value = 0.0;
    double probe_hotspot = 0.0;
    double ratio = 0.0;
    static constexpr double kThreshold = 0.1;
    bool flat() const { return ratio < kThreshold; }
};

struct SweepResult {
    SweepSpec spec;               // values in ascending order
    std::vector<SweepRun> runs;   // same order
    std::optional<TrendReport> trend;
    std::optional<PlateauProbe> plateau;

    std::vector<SweepPoint> points() const;
};

/// The TIM layer is the lowest user layer that does not dissipate power.
/// Throws ConfigError when the stack has none.
int tim_layer_index(const LayerStack& stack);

/// Copy of `stack` with one TIM parameter replaced; everything else is
/// carried over unchanged.
LayerStack with_tim_parameter(const LayerStack& stack, SweepParameter parameter, double value);

/// Solves the base scenario's power map (or `power`, when given) on `stack`
/// (the reference stack when omitted) once per value.
SweepResult run_sweep(const SweepSpec& spec, const ExperimentConfig& cfg = {},
                      const std::optional<LayerStack>& stack = {},
                      const std::optional<PowerMap>& power = {});

SweepResult sweep_tim_thickness(std::vector<double> values, const ExperimentConfig& cfg = {});
SweepResult sweep_tim_resistivity(std::vector<double> values, const ExperimentConfig& cfg = {});

}  // namespace stacktherm
