#include "stacktherm/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "stacktherm/errors.hpp"

namespace stacktherm {
namespace {

struct Line {
    std::size_t number;
    std::vector<std::string_view> fields;
    std::string_view text;  // comment-stripped, trimmed
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// Non-blank lines with `#` comments removed.
std::vector<Line> content_lines(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view raw = text.substr(pos, end - pos);
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        raw = trim(raw);
        if (!raw.empty()) out.push_back({number, split_fields(raw), raw});
        if (end == text.size()) break;
        pos = end + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string sci(double v) { return fmt("%.6e", v); }
std::string kelvin2(double v) { return fmt("%.2f", v); }

}  // namespace

Floorplan parse_flp(std::string_view text) {
    const std::string role = "flp";
    std::vector<Block> blocks;
    std::vector<std::size_t> lines;
    std::set<std::string, std::less<>> names;

    for (const auto& line : content_lines(text)) {
        const auto& f = line.fields;
        if (f.size() == 6 || f.size() == 7)
            throw ParseError(role, line.number,
                             "per-block specific heat/resistivity fields are not supported; "
                             "expected 5 fields");
        if (f.size() != 5)
            throw ParseError(role, line.number,
                             "expected 5 fields (name width height left-x bottom-y), got " +
                                 std::to_string(f.size()));
        Block b;
        b.name = std::string(f[0]);
        double* targets[] = {&b.width, &b.height, &b.left_x, &b.bottom_y};
        for (int k = 0; k < 4; ++k) {
            if (!parse_double(f[k + 1], *targets[k]))
                throw ParseError(role, line.number,
                                 "non-numeric field '" + std::string(f[k + 1]) + "'");
            if (*targets[k] < 0.0)
                throw ParseError(role, line.number, "negative dimension for block " + b.name);
        }
        if (b.width == 0.0 || b.height == 0.0)
            throw ParseError(role, line.number, "zero-size block " + b.name);
        if (!names.insert(b.name).second)
            throw ParseError(role, line.number, "duplicate block name " + b.name);
        blocks.push_back(std::move(b));
        lines.push_back(line.number);
    }
    if (blocks.empty()) throw ParseError(role, 1, "floorplan has no blocks");

    Floorplan fp = floorplan_from_blocks(std::move(blocks));
    for (const auto& v : validate_floorplan(fp).violations) {
        // Report the later of the offending lines.
        std::size_t at = 1;
        for (std::size_t i = 0; i < fp.blocks.size(); ++i)
            if (fp.blocks[i].name == v.first || fp.blocks[i].name == v.second)
                at = std::max(at, lines[i]);
        throw ParseError(role, at, v.message);
    }
    return fp;
}

std::string write_flp(const Floorplan& fp) {
    std::string out;
    for (const auto& b : fp.blocks) {
        out += b.name;
        for (double v : {b.width, b.height, b.left_x, b.bottom_y}) out += '\t' + sci(v);
        out += '\n';
    }
    return out;
}

std::vector<LayerRecord> parse_lcf(std::string_view text) {
    const std::string role = "lcf";
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError(role, 1, "no layers");
    if (lines.size() % 7 != 0)
        throw ParseError(role, lines[lines.size() / 7 * 7].number,
                         "incomplete layer block: " + std::to_string(lines.size() % 7) +
                             " of 7 records");

    auto flag = [&](const Line& l) {
        if (l.text == "Y" || l.text == "y") return true;
        if (l.text == "N" || l.text == "n") return false;
        throw ParseError(role, l.number, "expected Y or N, got '" + std::string(l.text) + "'");
    };
    auto number = [&](const Line& l, const char* what, bool strictly_positive) {
        double v = 0.0;
        if (l.fields.size() != 1 || !parse_double(l.text, v))
            throw ParseError(role, l.number,
                             std::string("non-numeric ") + what + " '" + std::string(l.text) + "'");
        if (strictly_positive ? !(v > 0.0) : v < 0.0)
            throw ParseError(role, l.number, std::string(what) + " must be positive");
        return v;
    };

    std::vector<LayerRecord> records;
    std::set<int> seen;
    for (std::size_t i = 0; i < lines.size(); i += 7) {
        LayerRecord r;
        if (lines[i].fields.size() != 1 || !parse_int(lines[i].text, r.number) || r.number < 0)
            throw ParseError(role, lines[i].number,
                             "invalid layer number '" + std::string(lines[i].text) + "'");
        if (!seen.insert(r.number).second)
            throw ParseError(role, lines[i].number,
                             "duplicate layer number " + std::to_string(r.number));
        r.lateral = flag(lines[i + 1]);
        r.power = flag(lines[i + 2]);
        r.specific_heat = number(lines[i + 3], "specific heat", false);
        r.resistivity = number(lines[i + 4], "resistivity", true);
        r.thickness = number(lines[i + 5], "thickness", true);
        r.floorplan_path = std::string(lines[i + 6].text);
        records.push_back(std::move(r));
    }
    std::sort(records.begin(), records.end(),
              [](const LayerRecord& a, const LayerRecord& b) { return a.number < b.number; });
    return records;
}

std::string write_lcf(const std::vector<LayerRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        out += "# layer " + std::to_string(r.number) + "\n";
        out += std::to_string(r.number) + "\n";
        out += r.lateral ? "Y\n" : "N\n";
        out += r.power ? "Y\n" : "N\n";
        out += sci(r.specific_heat) + "\n";
        out += sci(r.resistivity) + "\n";
        out += sci(r.thickness) + "\n";
        out += r.floorplan_path + "\n\n";
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path, const std::string& role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(role, 1, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <class F>
auto with_path(const std::filesystem::path& path, F&& parse) {
    try {
        return parse();
    } catch (const ParseError& e) {
        throw ParseError(e.role(), e.line(), path.string() + ": " + e.message());
    }
}

}  // namespace

Floorplan load_flp(const std::filesystem::path& path) {
    return with_path(path, [&] { return parse_flp(read_text_file(path, "flp")); });
}

PowerMap load_ptrace(const std::filesystem::path& path) {
    return with_path(path, [&] { return parse_ptrace(read_text_file(path, "ptrace")); });
}

std::vector<Layer> load_layers(const std::filesystem::path& lcf_path) {
    const auto records =
        with_path(lcf_path, [&] { return parse_lcf(read_text_file(lcf_path, "lcf")); });
    const auto base = lcf_path.parent_path();
    std::vector<Layer> layers;
    for (const auto& r : records) {
        std::filesystem::path fp_path = r.floorplan_path;
        if (fp_path.is_relative()) fp_path = base / fp_path;
        layers.push_back({r.number, r.lateral, r.power, r.specific_heat, r.resistivity,
                          r.thickness, load_flp(fp_path)});
    }
    return layers;
}

PowerMap parse_ptrace(std::string_view text) {
    const std::string role = "ptrace";
    const auto lines = content_lines(text);
    if (lines.empty()) throw ParseError(role, 1, "missing header line");

    const auto& header = lines.front();
    std::set<std::string_view> names;
    for (auto n : header.fields)
        if (!names.insert(n).second)
            throw ParseError(role, header.number, "duplicate unit " + std::string(n));
    if (lines.size() < 2) throw ParseError(role, header.number, "no data rows");

    std::vector<std::vector<double>> columns(header.fields.size());
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        if (l.fields.size() != header.fields.size())
            throw ParseError(role, l.number,
                             "row has " + std::to_string(l.fields.size()) + " values for " +
                                 std::to_string(header.fields.size()) + " units");
        for (std::size_t k = 0; k < l.fields.size(); ++k) {
            double v = 0.0;
            if (!parse_double(l.fields[k], v))
                throw ParseError(role, l.number,
                                 "non-numeric power '" + std::string(l.fields[k]) + "'");
            if (v < 0.0)
                throw ParseError(role, l.number,
                                 "negative power for " + std::string(header.fields[k]));
            columns[k].push_back(v);
        }
    }

    PowerMap pm;
    for (std::size_t k = 0; k < columns.size(); ++k) {
        // Sorted summation keeps the mean independent of row order.
        auto& c = columns[k];
        std::sort(c.begin(), c.end());
        double sum = 0.0;
        for (double v : c) sum += v;
        pm[std::string(header.fields[k])] = sum / static_cast<double>(c.size());
    }
    return pm;
}

std::string write_ptrace(const PowerMap& pm) {
    std::string names, values;
    for (const auto& [name, watts] : pm) {
        if (!names.empty()) {
            names += '\t';
            values += '\t';
        }
        names += name;
        values += sci(watts);
    }
    return names + "\n" + values + "\n";
}

std::string write_block_report(const BlockReport& report, ReportFormat format) {
    const auto& h = report.hotspot;
    if (format == ReportFormat::Csv) {
        std::string out = "unit,max_K,mean_K\n";
        for (const auto& b : report.blocks)
            out += b.unit + "," + kelvin2(b.max) + "," + kelvin2(b.mean) + "\n";
        out += "__hotspot__," + kelvin2(h.temperature) + "," + std::to_string(h.layer) + "/" +
               std::to_string(h.row) + "/" + std::to_string(h.col) + "\n";
        return out;
    }

    using nlohmann::json;
    auto loc = [](const HotspotLocation& l) {
        return json{{"temp_K", l.temperature}, {"layer", l.layer}, {"row", l.row}, {"col", l.col}};
    };
    json units = json::array();
    for (const auto& b : report.blocks)
        units.push_back({{"unit", b.unit}, {"layer", b.layer}, {"max_K", b.max}, {"mean_K", b.mean}});
    json layers = json::array();
    for (const auto& l : report.layer_hotspots) layers.push_back(loc(l));
    json doc = {{"units", units},
                {"hotspot", loc(h)},
                {"hotspot_units", report.hotspot_units()},
                {"layer_hotspots", layers}};
    return doc.dump(2) + "\n";
}

BlockReport read_block_report_json(std::string_view text) {
    using nlohmann::json;
    BlockReport rep;
    try {
        const json doc = json::parse(text);
        auto loc = [](const json& j) {
            return HotspotLocation{j.at("temp_K").get<double>(), j.at("layer").get<int>(),
                                   j.at("row").get<int>(), j.at("col").get<int>()};
        };
        for (const auto& u : doc.at("units"))
            rep.blocks.push_back({u.at("unit").get<std::string>(), u.at("layer").get<int>(),
                                  u.at("max_K").get<double>(), u.at("mean_K").get<double>()});
        rep.hotspot = loc(doc.at("hotspot"));
        for (const auto& l : doc.at("layer_hotspots")) rep.layer_hotspots.push_back(loc(l));
    } catch (const json::exception& e) {
        throw ParseError("report-json", 1, e.what());
    }
    return rep;
}

std::string write_grid_field(const TemperatureField& field) {
    std::string out;
    for (int l = 0; l < field.layers; ++l) {
        out += "# layer " + std::to_string(l) + "\n";
        for (int r = 0; r < field.rows; ++r) {
            for (int c = 0; c < field.cols; ++c) {
                if (c) out += ',';
                out += sci(field.at(l, r, c));
            }
            out += '\n';
        }
    }
    return out;
}

TemperatureField read_grid_field(std::string_view text) {
    const std::string role = "grid";
    TemperatureField f;
    std::size_t number = 0;
    std::size_t pos = 0;
    int rows_in_layer = 0;
    auto close_layer = [&](std::size_t at) {
        if (f.layers == 0) return;
        if (f.layers == 1) f.rows = rows_in_layer;
        if (rows_in_layer != f.rows) throw ParseError(role, at, "layers differ in row count");
    };
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = trim(text.substr(pos, end - pos));
        ++number;
        pos = end + 1;
        if (line.empty()) continue;
        if (line.rfind("# layer", 0) == 0) {
            close_layer(number);
            ++f.layers;
            rows_in_layer = 0;
            continue;
        }
        if (f.layers == 0) throw ParseError(role, number, "data before the first layer header");
        int count = 0;
        std::size_t p = 0;
        while (p <= line.size()) {
            const std::size_t comma = std::min(line.find(',', p), line.size());
            double v = 0.0;
            if (!parse_double(trim(line.substr(p, comma - p)), v))
                throw ParseError(role, number, "non-numeric value");
            f.values.push_back(v);
            ++count;
            p = comma + 1;
            if (comma == line.size()) break;
        }
        if (f.cols == 0) f.cols = count;
        if (count != f.cols) throw ParseError(role, number, "ragged row");
        ++rows_in_layer;
    }
    close_layer(number);
    return f;
}

std::string write_sweep(const std::vector<SweepPoint>& points) {
    if (points.empty()) throw std::invalid_argument("sweep has no points");
    std::string out = "param,hotspot_K,hotspot_units\n";
    for (const auto& p : points) {
        auto units = p.units;
        std::sort(units.begin(), units.end());
        std::string joined;
        for (const auto& u : units) joined += (joined.empty() ? "" : ";") + u;
        out += sci(p.param) + "," + kelvin2(p.hotspot) + "," + joined + "\n";
    }
    return out;
}

std::string write_plot_data(const std::vector<SweepPoint>& points) {
    std::string out = "# param hotspot_K\n";
    for (const auto& p : points) out += sci(p.param) + " " + fmt("%.6f", p.hotspot) + "\n";
    return out;
}

}  // namespace stacktherm
