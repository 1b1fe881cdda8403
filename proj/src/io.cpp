#include "freegeo/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace freegeo::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << content;
    if (!out) throw ValidationError("write to '" + path + "' failed");
}

std::string trim(std::string s) {
    auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

json measure_metadata(const Measure& m) {
    json atoms = json::array();
    for (const Atom& a : m.atoms())
        atoms.push_back({{"location", a.location}, {"mass", a.mass}});
    json notes = json::object();
    for (const auto& [k, v] : m.notes()) notes[k] = v;
    json meta = {
        {"atoms", atoms},
        {"atom_mass", m.atom_mass()},
        {"mass_check", m.total_mass()},
        {"notes", notes},
    };
    if (m.has_density() || !m.atoms().empty())
        meta["support"] = {m.min_support(), m.max_support()};
    return meta;
}

}  // namespace

std::string format_double(double x) {
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& s) {
    std::string t = trim(s);
    double v = 0.0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw ValidationError("cannot parse number '" + s + "'");
    return v;
}

MeasureSpec parse_measure_spec(const std::string& path) {
    std::istringstream in(read_file(path));
    MeasureSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "family") {
            spec.family = family_from_string(value);
        } else if (key == "param") {
            auto inner = value.find('=');
            if (inner != std::string::npos) value = trim(value.substr(inner + 1));
            spec.param = parse_double(value);
        } else if (key == "atoms") {
            std::string v = value;
            if (v.size() < 2 || v.front() != '[' || v.back() != ']')
                throw ValidationError(path + ": atoms must look like [(loc,mass),...]");
            v = v.substr(1, v.size() - 2);
            std::size_t pos = 0;
            while ((pos = v.find('(', pos)) != std::string::npos) {
                auto close = v.find(')', pos);
                auto comma = v.find(',', pos);
                if (close == std::string::npos || comma == std::string::npos || comma > close)
                    throw ValidationError(path + ": malformed atom tuple");
                double loc = parse_double(v.substr(pos + 1, comma - pos - 1));
                double mass = parse_double(v.substr(comma + 1, close - comma - 1));
                spec.atoms.push_back({loc, mass});
                pos = close + 1;
            }
        } else if (key == "density_csv") {
            auto base = std::filesystem::path(path).parent_path();
            spec.density_csv = (base / value).string();
        } else {
            throw ValidationError(path + ": unknown key '" + key + "'");
        }
    }
    if (spec.family && (!spec.atoms.empty() || spec.density_csv))
        throw ValidationError(path + ": give either a family or atoms/density_csv, not both");
    if (!spec.family && spec.atoms.empty() && !spec.density_csv)
        throw ValidationError(path + ": empty measure spec");
    return spec;
}

Measure build_measure(const MeasureSpec& spec, const EvalConfig& cfg) {
    if (spec.family) {
        Family fam = *spec.family;
        bool needs_param = fam != Family::quarter_circle_squared;
        if (needs_param && !spec.param)
            throw ValidationError(std::string("family ") + family_name(fam) +
                                  " needs param " + family_param_name(fam));
        return make_named(fam, spec.param.value_or(0.0), cfg);
    }
    std::vector<double> grid, dens;
    if (spec.density_csv) {
        std::istringstream in(read_file(*spec.density_csv));
        std::string line;
        bool first = true;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            if (first) {  // header row
                first = false;
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw ValidationError(*spec.density_csv + ": expected two comma-separated columns");
            grid.push_back(parse_double(line.substr(0, comma)));
            dens.push_back(parse_double(line.substr(comma + 1)));
        }
    }
    Measure m(spec.atoms, std::move(grid), std::move(dens));
    auto violations = m.validate();
    if (!violations.empty())
        throw ValidationError("measure spec invalid: " + violations.front());
    return m;
}

Measure load_measure_spec(const std::string& path, const EvalConfig& cfg) {
    return build_measure(parse_measure_spec(path), cfg);
}

void write_measure_csv(const std::string& path, const Measure& m) {
    std::string out = "t,density\n";
    for (std::size_t i = 0; i < m.grid().size(); ++i)
        out += format_double(m.grid()[i]) + "," + format_double(m.density()[i]) + "\n";
    write_file(path, out);
    write_file(path + ".meta.json", measure_metadata(m).dump(2) + "\n");
}

void write_measure_json(const std::string& path, const Measure& m) {
    json j = {
        {"kind", "measure"},
        {"density", {{"t", m.grid()}, {"f", m.density()}}},
        {"metadata", measure_metadata(m)},
    };
    write_file(path, j.dump(2) + "\n");
}

Measure read_measure_output(const std::string& path) {
    std::string content = read_file(path);
    auto first = content.find_first_not_of(" \t\r\n");
    std::vector<Atom> atoms;
    std::vector<double> grid, dens;
    std::map<std::string, std::string> notes;
    if (first != std::string::npos && content[first] == '{') {
        try {
            json j = json::parse(content);
            for (const auto& a : j.at("metadata").at("atoms"))
                atoms.push_back({a.at("location").get<double>(), a.at("mass").get<double>()});
            grid = j.at("density").at("t").get<std::vector<double>>();
            dens = j.at("density").at("f").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw ValidationError(path + ": not a valid measure file (" + e.what() + ")");
        }
    } else {
        std::istringstream in(content);
        std::string line;
        bool first_line = true;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            if (first_line) {
                first_line = false;
                continue;
            }
            auto comma = line.find(',');
            if (comma == std::string::npos)
                throw ValidationError(path + ": expected (t,density) rows");
            grid.push_back(parse_double(line.substr(0, comma)));
            dens.push_back(parse_double(line.substr(comma + 1)));
        }
        std::string sidecar = path + ".meta.json";
        if (std::filesystem::exists(sidecar)) {
            try {
                json j = json::parse(read_file(sidecar));
                for (const auto& a : j.at("atoms"))
                    atoms.push_back({a.at("location").get<double>(), a.at("mass").get<double>()});
            } catch (const json::exception& e) {
                throw ValidationError(sidecar + ": not a valid metadata file (" + e.what() + ")");
            }
        }
    }
    return Measure(std::move(atoms), std::move(grid), std::move(dens));
}

namespace {

json config_echo(const rmt::SimConfig& c) {
    return {
        {"dim", c.dim},
        {"n_factors", c.n_factors},
        {"trials", c.trials},
        {"seed", c.seed},
        {"method", rmt::method_name(c.method)},
        {"measure_spec", c.measure_spec},
    };
}

}  // namespace

void write_sample_csv(const std::string& path, const rmt::SpectrumSample& s) {
    std::string out = "eigenvalue\n";
    for (double v : s.values) out += format_double(v) + "\n";
    write_file(path, out);
    write_file(path + ".meta.json", config_echo(s.config).dump(2) + "\n");
}

void write_sample_json(const std::string& path, const rmt::SpectrumSample& s) {
    json j = {{"kind", "spectrum_sample"},
              {"config", config_echo(s.config)},
              {"eigenvalue", s.values}};
    write_file(path, j.dump(2) + "\n");
}

std::vector<double> read_sample_csv(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<double> out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        out.push_back(parse_double(line));
    }
    if (out.empty()) throw ValidationError(path + ": no sample values");
    std::sort(out.begin(), out.end());
    return out;
}

void write_gof_csv(const std::string& path, const rmt::GofReport& r) {
    std::string out = "x,ecdf,cdf\n";
    for (const auto& row : r.table)
        out += format_double(row.x) + "," + format_double(row.ecdf) + "," +
               format_double(row.cdf) + "\n";
    write_file(path, out);
}

void write_gof_json(const std::string& path, const rmt::GofReport& r) {
    json rows = json::array();
    for (const auto& row : r.table)
        rows.push_back({{"x", row.x}, {"ecdf", row.ecdf}, {"cdf", row.cdf}});
    json j = {{"kind", "gof_report"}, {"ks_distance", r.ks_distance}, {"table", rows}};
    write_file(path, j.dump(2) + "\n");
}

}  // namespace freegeo::io
