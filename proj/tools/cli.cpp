#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "stacktherm/errors.hpp"
#include "stacktherm/experiments.hpp"
#include "stacktherm/formats.hpp"

namespace fs = std::filesystem;

namespace stacktherm::cli {
namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string grid = "64x64";
    std::string format = "csv";
    std::string output;
    std::string method = "auto";
    double tolerance = 1e-8;
    int jobs = 1;
    PackageParams package;
};

void add_common(CLI::App& cmd, CommonFlags& f) {
    cmd.add_option("--grid", f.grid, "Grid resolution RxC (8..1024 each)")->capture_default_str();
    cmd.add_option("--format", f.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd.add_option("-o,--output", f.output, "Write the report here instead of stdout");
    cmd.add_option("--method", f.method, "Linear solver")
        ->check(CLI::IsMember({"auto", "direct", "cg"}))
        ->capture_default_str();
    cmd.add_option("--tol", f.tolerance, "cg relative residual tolerance")->capture_default_str();
    cmd.add_option("--jobs", f.jobs, "Concurrent solves")->check(CLI::Range(1, 64));

    auto& p = f.package;
    cmd.add_option("--ambient", p.ambient, "Ambient temperature (K)")->capture_default_str();
    cmd.add_option("--r-convec", p.convection_resistance, "Sink-to-ambient resistance (K/W)")
        ->capture_default_str();
    cmd.add_option("--spreader-k", p.spreader_conductivity, "Spreader conductivity (W/mK)")
        ->capture_default_str();
    cmd.add_option("--spreader-t", p.spreader_thickness, "Spreader thickness (m)")
        ->capture_default_str();
    cmd.add_option("--sink-k", p.sink_conductivity, "Sink conductivity (W/mK)")
        ->capture_default_str();
    cmd.add_option("--sink-t", p.sink_thickness, "Sink thickness (m)")->capture_default_str();
    cmd.add_option("--tim2-t", p.tim2_thickness, "Die-to-spreader TIM thickness (m)")
        ->capture_default_str();
    cmd.add_option("--tim2-r", p.tim2_resistivity, "Die-to-spreader TIM resistivity (mK/W)")
        ->capture_default_str();
}

GridSpec parse_grid(const std::string& text) {
    const auto x = text.find_first_of("xX");
    GridSpec g{0, 0};
    try {
        std::size_t used_r = 0, used_c = 0;
        if (x == std::string::npos) throw std::invalid_argument("no separator");
        const std::string rs = text.substr(0, x), cs = text.substr(x + 1);
        g.rows = std::stoi(rs, &used_r);
        g.cols = std::stoi(cs, &used_c);
        if (used_r != rs.size() || used_c != cs.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw UsageError("--grid expects RxC, got '" + text + "'");
    }
    if (!g.valid())
        throw UsageError("--grid " + text + ": rows and cols must each be in [8, 1024]");
    return g;
}

ExperimentConfig make_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    cfg.package = f.package;
    cfg.grid = parse_grid(f.grid);
    cfg.solve.tolerance = f.tolerance;
    cfg.solve.method = f.method == "direct" ? SolveMethod::Direct
                       : f.method == "cg"   ? SolveMethod::Cg
                                            : SolveMethod::Auto;
    if (!cfg.solve.valid()) throw UsageError("--tol must lie in (0, 1e-2]");
    cfg.jobs = f.jobs;
    return cfg;
}

ReportFormat report_format(const CommonFlags& f) {
    return f.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
}

std::optional<fs::path> config_dir() {
    if (const char* env = std::getenv(kConfigDirEnv); env && *env) return fs::path(env);
    return std::nullopt;
}

fs::path resolve_input(const std::string& path) {
    const fs::path p(path);
    if (fs::exists(p)) return p;
    if (p.is_relative()) {
        if (auto dir = config_dir(); dir && fs::exists(*dir / p)) return *dir / p;
    }
    throw UsageError("input file not found: " + path);
}

LayerStack load_stack(const std::string& lcf, const PackageParams& pkg) {
    return build_stack(load_layers(resolve_input(lcf)), pkg);
}

/// --lcf when given, else $STACKTHERM_CONFIG_DIR/stack3.lcf when present,
/// else the built-in reference stack.
LayerStack default_stack(const std::string& lcf, const PackageParams& pkg) {
    if (!lcf.empty()) return load_stack(lcf, pkg);
    if (auto dir = config_dir(); dir && fs::exists(*dir / "stack3.lcf"))
        return build_stack(load_layers(*dir / "stack3.lcf"), pkg);
    return reference_stack(pkg);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw UsageError("cannot write " + path);
    file << text;
}

std::string num(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw UsageError("sweep value '" + item + "' is not a number");
        }
        if (used != item.size()) throw UsageError("sweep value '" + item + "' is not a number");
        if (!(v > 0.0)) throw UsageError("sweep values must be positive (got " + item + ")");
        values.push_back(v);
    }
    if (values.empty()) throw UsageError("no sweep values given");
    return values;
}

std::string trend_summary(const SweepResult& res) {
    std::string s;
    if (!res.trend) return "# trend: n/a (single point)\n";
    const auto& t = *res.trend;
    s += "# trend: strictly_increasing=" + std::string(t.strictly_increasing ? "yes" : "no");
    s += " slope=" + num("%.6e", t.slope);
    s += " max_fit_deviation_K=" + num("%.6f", t.max_deviation);
    s += " deviation_fraction=" + num("%.6f", t.deviation_fraction());
    s += " growth_ratio=" + (t.growth_ratio ? num("%.6f", *t.growth_ratio) : std::string("n/a"));
    s += "\n";
    if (res.plateau) {
        const auto& p = *res.plateau;
        s += "# plateau: probe=" + num("%.6e", p.probe_value) +
             " hotspot_K=" + num("%.6f", p.probe_hotspot) + " ratio=" + num("%.6f", p.ratio) +
             " threshold=" + num("%.2f", PlateauProbe::kThreshold) +
             " flat=" + (p.flat() ? "yes" : "no") + "\n";
    }
    return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady-state thermal simulator for stacked dies", "stacktherm"};
    app.require_subcommand(1);

    CommonFlags common;

    std::string run_lcf, run_ptrace, run_field;
    auto* run_cmd = app.add_subcommand("run", "Solve one stack/power-trace pair");
    run_cmd->add_option("--lcf", run_lcf, "Layer configuration file")->required();
    run_cmd->add_option("--ptrace", run_ptrace, "Power trace file")->required();
    run_cmd->add_option("--field", run_field, "Also write the full temperature grid (csv)");
    add_common(*run_cmd, common);

    std::string only, sc_lcf;
    auto* sc_cmd = app.add_subcommand("scenarios", "Run the five stacked scenarios and both single-die runs");
    sc_cmd->add_option("--only", only, "Run a single scenario (S1..S5, FLAT2D_PROC, FLAT2D_MEM)");
    sc_cmd->add_option("--lcf", sc_lcf, "Stack to use instead of the built-in reference stack");
    add_common(*sc_cmd, common);

    std::string param, values_text, sw_lcf, sw_ptrace, plot_path, base = "S3";
    auto* sw_cmd = app.add_subcommand("sweep", "Sweep a TIM parameter");
    sw_cmd->add_option("parameter", param, "thickness | resistivity")
        ->required()
        ->check(CLI::IsMember({"thickness", "resistivity"}));
    sw_cmd->add_option("values", values_text, "Comma-separated values (m or mK/W)")->required();
    sw_cmd->add_option("--lcf", sw_lcf, "Stack to sweep (default: built-in reference stack)");
    sw_cmd->add_option("--ptrace", sw_ptrace, "Power trace (default: the --scenario map)");
    sw_cmd->add_option("--scenario", base, "Scenario whose power map is used")->capture_default_str();
    sw_cmd->add_option("--plot", plot_path, "Write plot data here instead of after the csv");
    add_common(*sw_cmd, common);

    bool self_test_fail = false;
    std::string val_grid = "16x16";
    auto* val_cmd = app.add_subcommand("validate", "Run the oracle and conservation checks");
    val_cmd->add_option("--grid", val_grid, "Grid resolution RxC")->capture_default_str();
    val_cmd->add_flag("--self-test-fail", self_test_fail, "Corrupt a fixture; the run must fail");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*run_cmd) {
            const auto cfg = make_config(common);
            const auto stack = load_stack(run_lcf, cfg.package);
            const auto pm = load_ptrace(resolve_input(run_ptrace));
            const auto res = steady_state(stack, pm, cfg.grid, cfg.solve);
            for (const auto& w : res.model.warnings) err << "warning: " << w << "\n";
            emit(write_block_report(res.report, report_format(common)), common.output, out);
            if (!run_field.empty()) emit(write_grid_field(res.field), run_field, out);
            return kExitOk;
        }

        if (*sc_cmd) {
            const auto cfg = make_config(common);
            std::vector<ScenarioId> ids = all_scenarios();
            if (!only.empty()) {
                const auto id = parse_scenario_id(only);
                if (!id) throw UsageError("unknown scenario '" + only + "'");
                ids = {*id};
            }
            const auto stack = default_stack(sc_lcf, cfg.package);

            std::vector<std::pair<ScenarioId, SolveResult>> runs;
            for (auto id : ids) {
                if (id == ScenarioId::Flat2DProc)
                    runs.emplace_back(id, run_2d_layer(LayerChoice::Processor, cfg));
                else if (id == ScenarioId::Flat2DMem)
                    runs.emplace_back(id, run_2d_layer(LayerChoice::Memory, cfg));
                else
                    runs.emplace_back(id, steady_state(stack, scenario_power_map(id), cfg.grid, cfg.solve));
            }

            std::vector<std::pair<double, ScenarioId>> stacked;
            for (const auto& [id, r] : runs)
                if (id != ScenarioId::Flat2DProc && id != ScenarioId::Flat2DMem)
                    stacked.emplace_back(r.report.hotspot.temperature, id);
            std::stable_sort(stacked.begin(), stacked.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            std::string ordering;
            for (const auto& [t, id] : stacked)
                ordering += (ordering.empty() ? "" : ">") + std::string(to_string(id));

            std::string text;
            if (report_format(common) == ReportFormat::Json) {
                nlohmann::json doc = {{"runs", nlohmann::json::array()}};
                for (const auto& [id, r] : runs)
                    doc["runs"].push_back(
                        {{"scenario", to_string(id)},
                         {"description", scenario(id).description},
                         {"report", nlohmann::json::parse(write_block_report(r.report, ReportFormat::Json))}});
                if (stacked.size() > 1) doc["ordering"] = ordering;
                text = doc.dump(2) + "\n";
            } else {
                for (const auto& [id, r] : runs) {
                    text += "# scenario " + std::string(to_string(id)) + ": " +
                            scenario(id).description + "\n";
                    text += write_block_report(r.report, ReportFormat::Csv);
                }
                if (stacked.size() > 1) text += "# ordering " + ordering + "\n";
            }
            emit(text, common.output, out);
            return kExitOk;
        }

        if (*sw_cmd) {
            const auto cfg = make_config(common);
            SweepSpec spec;
            spec.parameter = param == "thickness" ? SweepParameter::TimThickness
                                                  : SweepParameter::TimResistivity;
            spec.values = parse_values(values_text);
            const auto id = parse_scenario_id(base);
            if (!id) throw UsageError("unknown scenario '" + base + "'");
            spec.base = *id;

            std::optional<LayerStack> stack;
            if (!sw_lcf.empty()) stack = load_stack(sw_lcf, cfg.package);
            std::optional<PowerMap> power;
            if (!sw_ptrace.empty()) power = load_ptrace(resolve_input(sw_ptrace));

            const auto res = run_sweep(spec, cfg, stack, power);
            const auto points = res.points();
            std::string text = write_sweep(points);
            if (plot_path.empty())
                text += "\n" + write_plot_data(points);
            else
                emit(write_plot_data(points), plot_path, out);
            text += trend_summary(res);
            emit(text, common.output, out);
            return kExitOk;
        }

        if (*val_cmd) {
            const auto grid = parse_grid(val_grid);
            const auto checks = run_validation(grid.rows, grid.cols, self_test_fail);
            bool all = true;
            for (const auto& c : checks) {
                out << (c.pass ? "PASS " : "FAIL ") << c.name << " value=" << num("%.3e", c.value)
                    << " limit=" << num("%.1e", c.limit) << "\n";
                all = all && c.pass;
            }
            out << (all ? "all checks passed\n" : "validation FAILED\n");
            return all ? kExitOk : kExitCheckFailed;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitUsage;
}

}  // namespace stacktherm::cli
