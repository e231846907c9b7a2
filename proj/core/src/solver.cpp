#include "stacktherm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "stacktherm/errors.hpp"

namespace stacktherm {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

TemperatureField make_field(const GridModel& gm, const std::vector<double>& rise, double ambient) {
    TemperatureField f;
    f.layers = gm.n_layers();
    f.rows = gm.spec.rows;
    f.cols = gm.spec.cols;
    f.values.resize(rise.size());
    for (std::size_t i = 0; i < rise.size(); ++i) f.values[i] = ambient + rise[i];
    return f;
}

void require_ambient_path(const ConductanceMatrix& G) {
    const double total = std::accumulate(G.g_amb.begin(), G.g_amb.end(), 0.0);
    if (!(total > 0.0))
        throw SolverError(SolverError::Kind::FloatingNetwork,
                          "floating network: no node is coupled to ambient");
}

// Lower-triangular band factor, row i holding columns [i - b, i].
class BandCholesky {
public:
    BandCholesky(const ConductanceMatrix& G) : n_(G.n), b_(G.half_bandwidth), l_(n_ * (b_ + 1), 0.0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t k = G.row_ptr[i]; k < G.row_ptr[i + 1]; ++k)
                if (G.col[k] <= i) ref(i, G.col[k]) = G.val[k];

        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t first = i > b_ ? i - b_ : 0;
            for (std::size_t j = first; j <= i; ++j) {
                const std::size_t kfirst = std::max(first, j > b_ ? j - b_ : 0);
                const double* li = &ref(i, kfirst);
                const double* lj = &ref(j, kfirst);
                double s = ref(i, j);
                for (std::size_t k = 0; k < j - kfirst; ++k) s -= li[k] * lj[k];
                if (i == j) {
                    if (!(s > 0.0))
                        throw SolverError(SolverError::Kind::FloatingNetwork,
                                          "floating network: matrix is not positive definite");
                    ref(i, i) = std::sqrt(s);
                } else {
                    ref(i, j) = s / ref(j, j);
                }
            }
        }
    }

    std::vector<double> solve(std::vector<double> x) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t first = i > b_ ? i - b_ : 0;
            double s = x[i];
            for (std::size_t k = first; k < i; ++k) s -= ref(i, k) * x[k];
            x[i] = s / ref(i, i);
        }
        for (std::size_t ii = n_; ii-- > 0;) {
            x[ii] /= ref(ii, ii);
            const double xi = x[ii];
            const std::size_t first = ii > b_ ? ii - b_ : 0;
            for (std::size_t k = first; k < ii; ++k) x[k] -= ref(ii, k) * xi;
        }
        return x;
    }

private:
    double& ref(std::size_t i, std::size_t j) { return l_[i * (b_ + 1) + (j + b_ - i)]; }
    const double& ref(std::size_t i, std::size_t j) const { return l_[i * (b_ + 1) + (j + b_ - i)]; }

    std::size_t n_;
    std::size_t b_;
    std::vector<double> l_;
};

}  // namespace

TemperatureField solve_direct(const ConductanceMatrix& G, const std::vector<double>& q,
                              double ambient, const GridModel& gm, SolveStats* stats) {
    const auto start = Clock::now();
    if (G.n > kDirectLimit)
        throw SolverError(SolverError::Kind::TooLarge,
                          "system has " + std::to_string(G.n) +
                              " nodes; the direct solver is limited to " +
                              std::to_string(kDirectLimit) + ", use the cg method");
    require_ambient_path(G);

    const BandCholesky factor(G);
    const auto rise = factor.solve(q);
    auto field = make_field(gm, rise, ambient);

    if (stats) {
        std::vector<double> r;
        G.multiply(rise, r);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = q[i] - r[i];
        const double qn = norm2(q);
        stats->method = SolveMethod::Direct;
        stats->iterations = 1;
        stats->residual = qn > 0.0 ? norm2(r) / qn : norm2(r);
        stats->wall_seconds = seconds_since(start);
    }
    return field;
}

TemperatureField solve_cg(const ConductanceMatrix& G, const std::vector<double>& q,
                          double ambient, const GridModel& gm, const SolveOptions& opts,
                          SolveStats* stats) {
    const auto start = Clock::now();
    if (!opts.valid()) throw ConfigError("cg tolerance must lie in (0, 1e-2]");
    require_ambient_path(G);

    const std::size_t n = G.n;
    const std::size_t max_iter = opts.max_iterations ? opts.max_iterations : 10 * n;
    const auto diag = G.diagonal();

    std::vector<double> x(n, 0.0), r = q, z(n), p(n), ap(n);
    const double qn = norm2(q);
    double rel = 0.0;
    std::size_t iter = 0;

    auto finish = [&](const std::vector<double>& rise) {
        if (stats) {
            stats->method = SolveMethod::Cg;
            stats->iterations = iter;
            stats->residual = rel;
            stats->wall_seconds = seconds_since(start);
        }
        return make_field(gm, rise, ambient);
    };
    if (qn == 0.0) return finish(x);

    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    p = z;
    double rz = dot(r, z);
    std::vector<double> best = x;
    double best_rel = 1.0;
    rel = 1.0;

    while (iter < max_iter) {
        G.multiply(p, ap);
        const double alpha = rz / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ++iter;
        rel = norm2(r) / qn;
        if (rel < best_rel) {
            best_rel = rel;
            best = x;
        }
        if (rel <= opts.tolerance) return finish(x);

        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }

    auto best_field = make_field(gm, best, ambient);
    throw SolverError(SolverError::Kind::NotConverged,
                      "conjugate gradient did not converge in " + std::to_string(max_iter) +
                          " iterations (relative residual " + std::to_string(best_rel) + ")",
                      std::move(best_field.values), best_rel);
}

double energy_balance_residual(const ConductanceMatrix& G, const std::vector<double>& q,
                               double ambient, const TemperatureField& field) {
    double out = 0.0;
    for (std::size_t i = 0; i < G.n; ++i)
        if (G.g_amb[i] != 0.0) out += G.g_amb[i] * (field.values[i] - ambient);
    const double in = std::accumulate(q.begin(), q.end(), 0.0);
    return std::abs(out - in) / std::max(in, 1e-12);
}

double solve_residual(const ConductanceMatrix& G, const std::vector<double>& q, double ambient,
                      const TemperatureField& field) {
    std::vector<double> gt;
    G.multiply(field.values, gt);
    double worst = 0.0;
    double qmax = 0.0;
    for (std::size_t i = 0; i < G.n; ++i) {
        worst = std::max(worst, std::abs(gt[i] - q[i] - G.g_amb[i] * ambient));
        qmax = std::max(qmax, std::abs(q[i]));
    }
    return worst / std::max(qmax, 1.0);
}

SolveResult steady_state(const LayerStack& stack, const PowerMap& pm, const GridSpec& spec,
                         const SolveOptions& opts) {
    if (!opts.valid()) throw ConfigError("cg tolerance must lie in (0, 1e-2]");
    check_power_map(pm, stack);

    SolveResult res;
    res.model = discretize(stack, spec);
    res.matrix = assemble_conductances(res.model);
    res.power = power_vector(res.model, pm);
    const double ambient = res.model.ambient;

    SolveMethod method = opts.method;
    if (method == SolveMethod::Auto)
        method = res.matrix.n <= kDirectLimit ? SolveMethod::Direct : SolveMethod::Cg;

    if (method == SolveMethod::Direct)
        res.field = solve_direct(res.matrix, res.power, ambient, res.model, &res.stats);
    else
        res.field = solve_cg(res.matrix, res.power, ambient, res.model, opts, &res.stats);

    res.report = block_report(res.field, res.model);
    res.energy_residual = energy_balance_residual(res.matrix, res.power, ambient, res.field);
    return res;
}

}  // namespace stacktherm
