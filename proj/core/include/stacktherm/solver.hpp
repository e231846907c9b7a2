#pragma once

#include <cstddef>
#include <vector>

#include "stacktherm/grid.hpp"
#include "stacktherm/model.hpp"
#include "stacktherm/report.hpp"

namespace stacktherm {

/// Node temperatures in kelvin, laid out like GridModel::idx.
struct TemperatureField {
    int layers = 0;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;

    double at(int layer, int row, int col) const {
        return values[(static_cast<std::size_t>(layer) * rows + row) * cols + col];
    }
    std::size_t size() const { return values.size(); }
};

enum class SolveMethod { Direct, Cg, Auto };

struct SolveOptions {
    SolveMethod method = SolveMethod::Auto;
    double tolerance = 1e-8;      // relative residual for cg, in (0, 1e-2]
    std::size_t max_iterations = 0;  // 0 means 10 * N

    bool valid() const { return tolerance > 0.0 && tolerance <= 1e-2; }
};

struct SolveStats {
    SolveMethod method = SolveMethod::Direct;
    std::size_t iterations = 0;
    double residual = 0.0;  // relative residual of the temperature-rise system
    double wall_seconds = 0.0;
};

/// Largest system the banded Cholesky path accepts.
inline constexpr std::size_t kDirectLimit = 4096;

/// Cholesky solve of G (T - ambient) = q, equivalently
/// G T = q + g_amb * ambient. Throws SolverError (TooLarge, FloatingNetwork).
TemperatureField solve_direct(const ConductanceMatrix& G, const std::vector<double>& q,
                              double ambient, const GridModel& gm, SolveStats* stats = nullptr);

/// Jacobi-preconditioned conjugate gradient on the same system, started from
/// ambient. Stops when ||r|| / ||q|| <= tolerance. Throws SolverError
/// (NotConverged carries the best iterate seen).
TemperatureField solve_cg(const ConductanceMatrix& G, const std::vector<double>& q,
                          double ambient, const GridModel& gm, const SolveOptions& opts,
                          SolveStats* stats = nullptr);

/// |sum_i g_amb[i] (T[i] - ambient) - sum q| / max(sum q, 1e-12)
double energy_balance_residual(const ConductanceMatrix& G, const std::vector<double>& q,
                               double ambient, const TemperatureField& field);

/// ||G T - q - g_amb * ambient||_inf / max(||q||_inf, 1)
double solve_residual(const ConductanceMatrix& G, const std::vector<double>& q, double ambient,
                      const TemperatureField& field);

struct SolveResult {
    GridModel model;
    ConductanceMatrix matrix;
    std::vector<double> power;
    TemperatureField field;
    BlockReport report;
    SolveStats stats;
    double energy_residual = 0.0;
};

SolveResult steady_state(const LayerStack& stack, const PowerMap& pm, const GridSpec& spec,
                         const SolveOptions& opts = {});

}  // namespace stacktherm
