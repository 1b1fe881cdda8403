#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freegeo/measure.hpp"
#include "freegeo/rmt.hpp"

namespace freegeo::io {

// Shortest round-trip decimal representation of a double.
std::string format_double(double x);
double parse_double(const std::string& s);

// Parsed contents of a measure spec file.  Either a named family with one
// parameter, or an explicit atom list plus an optional density CSV:
//
//   family = marchenko_pastur
//   param = c=1.0            # or just "param = 1.0"
//
//   atoms = [(0,0.5),(1,0.5)]
//   density_csv = table.csv  # two columns (t, f) with a header row
struct MeasureSpec {
    std::optional<Family> family;
    std::optional<double> param;
    std::vector<Atom> atoms;
    std::optional<std::string> density_csv;  // resolved relative to the spec file
};

MeasureSpec parse_measure_spec(const std::string& path);
Measure build_measure(const MeasureSpec& spec, const EvalConfig& cfg);
Measure load_measure_spec(const std::string& path, const EvalConfig& cfg);

// Measure output: CSV with columns (t, density) plus a JSON metadata sidecar
// at <path>.meta.json, or a single self-contained JSON file.
void write_measure_csv(const std::string& path, const Measure& m);
void write_measure_json(const std::string& path, const Measure& m);
// Reads either format back (sniffs JSON by leading '{'; CSV picks up the
// sidecar for atoms when present).
Measure read_measure_output(const std::string& path);

// Eigenvalue samples: single-column CSV with header `eigenvalue`, plus a JSON
// config-echo sidecar; or single JSON.
void write_sample_csv(const std::string& path, const rmt::SpectrumSample& s);
void write_sample_json(const std::string& path, const rmt::SpectrumSample& s);
std::vector<double> read_sample_csv(const std::string& path);

// Goodness-of-fit report, CSV (x, ecdf, cdf) or JSON.
void write_gof_csv(const std::string& path, const rmt::GofReport& r);
void write_gof_json(const std::string& path, const rmt::GofReport& r);

}  // namespace freegeo::io
