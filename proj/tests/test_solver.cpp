#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stacktherm/errors.hpp"
#include "stacktherm/oracle.hpp"
#include "stacktherm/solver.hpp"
#include "test_util.hpp"

using namespace stacktherm;

namespace {

// Dense Gaussian elimination with partial pivoting; test-only reference.
std::vector<double> dense_solve(const ConductanceMatrix& G, std::vector<double> b) {
    const std::size_t n = G.n;
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = G.row_ptr[i]; k < G.row_ptr[i + 1]; ++k) a[i * n + G.col[k]] = G.val[k];
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            if (f == 0.0) continue;
            for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
        x[i] = s / a[i * n + i];
    }
    return x;
}

LayerStack uniform_heater_stack() {
    Layer heater{0, true, true, 0, 0.01, 1.5e-4, uniform_floorplan("heater")};
    Layer cap{2, true, true, 0, 0.01, 1.5e-4, uniform_floorplan("cap")};
    return build_stack({heater, tim_layer(1), cap}, {});
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

SolveOptions direct() {
    SolveOptions o;
    o.method = SolveMethod::Direct;
    return o;
}

PowerMap random_power_map() {
    PowerMap pm;
    for (const auto& [name, watts] : scenario_power_map(ScenarioId::S3)) {
        (void)watts;
        pm[name] = testutil::uniform_int(0, 2) == 0 ? 0.0 : testutil::uniform(0.0, 60.0);
    }
    return pm;
}

}  // namespace

TEST_CASE("single-column stack matches the series resistance chain") {
    const auto stack = reference_stack();
    GridModel gm = discretize(stack, {8, 8});
    gm.spec = {1, 1};
    gm.dx = gm.die_width;
    gm.dy = gm.die_height;
    const auto G = assemble_conductances(gm);
    REQUIRE(G.n == 6);

    const double watts = 37.5;
    std::vector<double> q(6, 0.0);
    q[0] = watts;
    const auto field = solve_direct(G, q, 318.15, gm);

    const auto layers = stack.solvable_layers();
    const double area = gm.die_area();
    double r = stack.package().convection_resistance;
    r += layers.back().thickness * layers.back().resistivity / (2.0 * area);
    for (std::size_t l = 0; l + 1 < layers.size(); ++l)
        r += (layers[l].thickness * layers[l].resistivity +
              layers[l + 1].thickness * layers[l + 1].resistivity) / (2.0 * area);
    CHECK(field.values[0] - 318.15 == doctest::Approx(watts * r).epsilon(1e-12));
}

TEST_CASE("direct solve matches dense elimination") {
    const auto stack = reference_stack();
    const auto gm = discretize(stack, {8, 9});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S4));
    const auto field = solve_direct(G, q, 318.15, gm);
    const auto rise = dense_solve(G, q);
    for (std::size_t i = 0; i < G.n; ++i)
        CHECK(field.values[i] - 318.15 == doctest::Approx(rise[i]).epsilon(1e-10));
    CHECK(solve_residual(G, q, 318.15, field) <= 1e-10);
}

TEST_CASE("zero power gives exactly ambient") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    const std::vector<double> q(G.n, 0.0);
    for (const auto& f : {solve_direct(G, q, 300.0, gm), solve_cg(G, q, 300.0, gm, {})})
        for (double t : f.values) CHECK(std::abs(t - 300.0) <= 1e-12);

    SolveStats stats;
    solve_cg(G, q, 300.0, gm, {}, &stats);
    CHECK(stats.iterations <= 1);
}

TEST_CASE("doubling power doubles the temperature rise") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    const auto a = solve_direct(G, q, 318.15, gm);
    for (auto& v : q) v *= 2.0;
    const auto b = solve_direct(G, q, 318.15, gm);
    for (std::size_t i = 0; i < G.n; ++i)
        CHECK(std::abs((b.values[i] - 318.15) - 2.0 * (a.values[i] - 318.15)) <= 1e-8);
}

TEST_CASE("direct solver refuses large and floating systems") {
    const auto big = discretize(reference_stack(), {64, 64});
    const auto Gbig = assemble_conductances(big);
    const std::vector<double> q(Gbig.n, 1.0);
    try {
        solve_direct(Gbig, q, 318.15, big);
        FAIL("expected TooLarge");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::TooLarge);
        CHECK(std::string(e.what()).find("cg") != std::string::npos);
    }

    const auto gm = discretize(reference_stack(), {8, 8});
    auto G = assemble_conductances(gm);
    for (std::size_t i = 0; i < G.n; ++i) {
        if (G.g_amb[i] == 0.0) continue;
        for (std::size_t k = G.row_ptr[i]; k < G.row_ptr[i + 1]; ++k)
            if (G.col[k] == i) G.val[k] -= G.g_amb[i];
        G.g_amb[i] = 0.0;
    }
    const std::vector<double> q2(G.n, 1.0);
    try {
        solve_direct(G, q2, 318.15, gm);
        FAIL("expected FloatingNetwork");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::FloatingNetwork);
        CHECK(std::string(e.what()).find("floating network") != std::string::npos);
    }
    CHECK_THROWS_AS(solve_cg(G, q2, 318.15, gm, {}), SolverError);
}

TEST_CASE("cg agrees with the direct solve") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    REQUIRE(G.n == 1536);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    const auto d = solve_direct(G, q, 318.15, gm);
    SolveStats stats;
    const auto c = solve_cg(G, q, 318.15, gm, {}, &stats);
    CHECK(max_diff(d.values, c.values) <= 1e-6);
    CHECK(stats.method == SolveMethod::Cg);
    CHECK(stats.residual <= 1e-8);
    CHECK(energy_balance_residual(G, q, 318.15, c) <= 1e-7);
}

TEST_CASE("tighter cg tolerance never increases the final residual") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S5));
    double previous = 1.0;
    for (double tol : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        SolveOptions o;
        o.tolerance = tol;
        SolveStats s;
        solve_cg(G, q, 318.15, gm, o, &s);
        CHECK(s.residual <= tol);
        CHECK(s.residual <= previous);
        previous = s.residual;
    }
}

TEST_CASE("cg reports non-convergence with its best iterate") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    SolveOptions o;
    o.max_iterations = 3;
    try {
        solve_cg(G, q, 318.15, gm, o);
        FAIL("expected NotConverged");
    } catch (const SolverError& e) {
        CHECK(e.kind() == SolverError::Kind::NotConverged);
        CHECK(e.best_iterate().size() == G.n);
        CHECK(e.residual() > 1e-8);
    }
    o.tolerance = 0.5;
    CHECK_THROWS_AS(solve_cg(G, q, 318.15, gm, o), ConfigError);
}

TEST_CASE("energy balance residual") {
    const auto gm = discretize(reference_stack(), {16, 16});
    const auto G = assemble_conductances(gm);
    const auto q = power_vector(gm, scenario_power_map(ScenarioId::S3));
    const auto field = solve_direct(G, q, 318.15, gm);
    CHECK(energy_balance_residual(G, q, 318.15, field) <= 1e-9);

    TemperatureField flat = field;
    std::fill(flat.values.begin(), flat.values.end(), 318.15);
    CHECK(energy_balance_residual(G, q, 318.15, flat) == doctest::Approx(1.0));
    CHECK(energy_balance_residual(G, std::vector<double>(G.n, 0.0), 318.15, flat) == 0.0);
}

TEST_CASE("analytic uniform stack examples") {
    const auto zero = analytic_uniform_stack(0.0, reference_stack());
    CHECK(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }));

    Layer spreader{0, true, true, 0, 1.0 / 400.0, 1e-3, uniform_floorplan("s")};
    const std::vector<Layer> one = {spreader};
    const auto dt = analytic_uniform_stack(10.0, one, 2.56e-4, 0.1);
    REQUIRE(dt.size() == 1);
    CHECK(dt[0] == doctest::Approx(10.0 * (0.1 + 1e-3 / (2 * 400 * 2.56e-4))).epsilon(1e-12));
    CHECK(dt[0] == doctest::Approx(1.0488).epsilon(1e-4));
}

TEST_CASE("uniform bottom power reproduces the analytic stack") {
    const auto stack = uniform_heater_stack();
    const double watts = 120.0;
    const auto expected = analytic_uniform_stack(watts, stack);
    for (int n : {8, 64}) {
        const auto res = steady_state(stack, {{"heater", watts}}, {n, n});
        const int plane = n * n;
        for (int l = 0; l < res.field.layers; ++l) {
            double lo = 1e300, hi = -1e300;
            for (int i = 0; i < plane; ++i) {
                const double t = res.field.values[static_cast<std::size_t>(l) * plane + i];
                lo = std::min(lo, t);
                hi = std::max(hi, t);
                CHECK(std::abs((t - 318.15) - expected[l]) / expected[l] <= 1e-6);
            }
            if (res.stats.method == SolveMethod::Direct) CHECK(hi - lo <= 1e-9);
        }
    }
}

TEST_CASE("superposition holds for random power maps") {
    const auto stack = reference_stack();
    for (int trial = 0; trial < 5; ++trial) {
        const auto p1 = random_power_map();
        const auto p2 = random_power_map();
        PowerMap sum = p1;
        for (const auto& [name, watts] : p2) sum[name] += watts;
        const auto a = steady_state(stack, p1, {16, 16}, direct());
        const auto b = steady_state(stack, p2, {16, 16}, direct());
        const auto c = steady_state(stack, sum, {16, 16}, direct());
        for (std::size_t i = 0; i < c.field.size(); ++i) {
            const double lhs = c.field.values[i] - 318.15;
            const double rhs = (a.field.values[i] - 318.15) + (b.field.values[i] - 318.15);
            CHECK(std::abs(lhs - rhs) <= 1e-8);
        }
    }
}

TEST_CASE("nonnegative power never cools below ambient") {
    const auto stack = reference_stack();
    for (int trial = 0; trial < 5; ++trial) {
        const auto res = steady_state(stack, random_power_map(), {16, 16}, direct());
        for (double t : res.field.values) CHECK(t >= 318.15 - 1e-9);
        CHECK(res.energy_residual <= 1e-9);
    }
}

TEST_CASE("mirrored inputs give the mirrored field") {
    const auto stack = reference_stack();
    auto layers = stack.layers();
    for (auto& l : layers) l.floorplan = mirrored_left_right(l.floorplan);
    const auto mirror = build_stack(layers, stack.package());
    const PowerMap pm = {{"P1", 50.9}, {"P7", 10.0}, {"M4", 1.3}};
    const auto a = steady_state(stack, pm, {16, 16}, direct());
    const auto b = steady_state(mirror, pm, {16, 16}, direct());
    double worst = 0.0;
    for (int l = 0; l < a.field.layers; ++l)
        for (int r = 0; r < 16; ++r)
            for (int c = 0; c < 16; ++c)
                worst = std::max(worst, std::abs(a.field.at(l, r, c) - b.field.at(l, r, 15 - c)));
    CHECK(worst <= 1e-9);
}

TEST_CASE("hotspot never decreases with TIM resistivity") {
    double previous = 0.0;
    for (double rho : {0.01, 0.05, 0.125, 0.25, 0.5, 1.0}) {
        auto layers = reference_stack().layers();
        layers[1].resistivity = rho;
        const auto res = steady_state(build_stack(layers, {}), scenario_power_map(ScenarioId::S1),
                                      {16, 16}, direct());
        CHECK(res.report.hotspot.temperature >= previous);
        previous = res.report.hotspot.temperature;
    }
}

TEST_CASE("steady_state picks the solver by size") {
    const auto small = steady_state(reference_stack(), scenario_power_map(ScenarioId::S2), {16, 16});
    CHECK(small.stats.method == SolveMethod::Direct);
    const auto large = steady_state(reference_stack(), scenario_power_map(ScenarioId::S2), {32, 32});
    CHECK(large.stats.method == SolveMethod::Cg);
    CHECK(large.energy_residual <= 1e-7);

    const auto zero = steady_state(reference_stack(), {}, {16, 16});
    for (const auto& b : zero.report.blocks) {
        CHECK(b.max == doctest::Approx(318.15).epsilon(1e-14));
        CHECK(b.mean == doctest::Approx(318.15).epsilon(1e-14));
    }
    CHECK_THROWS_AS(steady_state(reference_stack(), {{"P9", 1.0}}, {16, 16}), ConfigError);
}

TEST_CASE("S1 and S2 hotspot patterns") {
    const auto s1 = steady_state(reference_stack(), scenario_power_map(ScenarioId::S1), {16, 16});
    CHECK(s1.report.hotspot_units() == std::vector<std::string>{"P2", "P3", "P6", "P7"});

    const auto s2 = steady_state(reference_stack(), scenario_power_map(ScenarioId::S2), {16, 16});
    CHECK(s2.report.hotspot.temperature - 318.15 < 3.0);
    const double mem = s2.report.find("M1")->max;
    for (const auto& b : s2.report.blocks) CHECK(b.max <= mem + 1e-9);
}
