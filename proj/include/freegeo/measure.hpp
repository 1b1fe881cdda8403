#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "freegeo/errors.hpp"

namespace freegeo {

// Tolerance on the total mass of a probability measure.
inline constexpr double kMassTolerance = 1e-6;

struct Atom {
    double location = 0.0;
    double mass = 0.0;
};

// Numerical knobs shared by the transform machinery.
struct EvalConfig {
    // Extra grid refinement applied to the outermost density segments of the
    // named families (they carry square-root edges or an integrable
    // singularity, so the edge cells need denser sampling than the bulk).
    int quad_points = 8;
    // Residual tolerance for the bracketed inversion of psi.
    double root_tol = 1e-12;
    // Number of points in F-tables and tabulated named densities.
    int grid_size = 4096;
    // Offset from open interval endpoints, e.g. evaluation starts at beta + eps.
    double eps_boundary = 1e-9;

    void require_valid() const;
};

enum class Family {
    point_mass,
    projection,
    marchenko_pastur,
    quarter_circle_squared,
};

const char* family_name(Family f);
Family family_from_string(const std::string& name);
// Name of the family's parameter ("lambda", "alpha", "c"), or "" if none.
const char* family_param_name(Family f);

// A compactly supported probability measure: a finite set of atoms plus a
// piecewise-linear density tabulated on a strictly increasing grid.  The
// density is linear between grid points and zero outside [grid.front(),
// grid.back()].  Inputs live on [0, inf); the Lyapunov image reuses the same
// representation on the log axis, where the nonnegative-support invariant is
// intentionally not asserted.  The numerical content is immutable after
// construction (notes are advisory annotations); all queries are const and
// safe for concurrent use.
class Measure {
public:
    Measure() = default;
    Measure(std::vector<Atom> atoms,
            std::vector<double> grid,
            std::vector<double> density);

    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& density() const { return density_; }
    // Per-cell density slopes, cached for the transform integrals.
    const std::vector<double>& cell_slopes() const { return slopes_; }
    bool has_density() const { return grid_.size() >= 2; }

    // Mass of the atom at exactly `location` (0 if there is none).
    double atom_mass_at(double location) const;
    // beta = mu({0}).
    double atom_at_zero() const { return atom_mass_at(0.0); }

    double atom_mass() const;     // sum of atom masses
    double density_mass() const;  // trapezoid integral of the density table
    double total_mass() const { return atom_mass() + density_mass(); }

    // True iff the measure is a single atom carrying all mass (a Dirac delta).
    bool is_point_mass() const;

    double min_support() const;
    double max_support() const;

    // Piecewise-linear density value at x (0 outside the grid).
    double density_at(double x) const;

    // integral of t^p dmu, atoms plus the exact per-cell integral of the
    // piecewise-linear density.  Throws InfiniteMomentError when the integral
    // diverges (negative p against mass at or adjacent to 0).
    double moment(double p) const;

    // Right-continuous CDF, clamped to [0, 1].
    double cdf(double x) const;
    // CDF left limit at x, i.e. cdf(x) minus the atom mass at exactly x.
    double cdf_left(double x) const;

    // Generalized inverse: inf { x : cdf(x) >= q }, q in (0, 1).
    // Returns atom locations exactly when q falls inside an atom's jump.
    double quantile(double q) const;

    // Invariant check.  Returns human-readable violations; empty when valid.
    std::vector<std::string> validate() const;

    // Free-form provenance/diagnostic annotations (renormalization scales,
    // truncation records, conventions applied).  Not part of the math.
    const std::map<std::string, std::string>& notes() const { return notes_; }
    void add_note(const std::string& key, const std::string& value) { notes_[key] = value; }

private:
    struct Breakpoint {
        double x = 0.0;
        double atom = 0.0;  // atom mass sitting exactly at x
        double cum = 0.0;   // right-continuous CDF at x
    };

    void build_cumulative();

    std::vector<Atom> atoms_;      // sorted by location
    std::vector<double> grid_;     // strictly increasing abscissae
    std::vector<double> density_;  // nonnegative ordinates, same length as grid_
    std::vector<double> slopes_;   // (f[i+1]-f[i])/(t[i+1]-t[i]) per cell
    std::vector<double> cell_cum_; // cumulative density mass at each grid node
    std::vector<Breakpoint> breakpoints_;
    bool structurally_sound_ = false;
    std::map<std::string, std::string> notes_;
};

// True when integral of t^-1 dmu = +inf: an atom at 0, or a density that is
// positive at abscissa 0.  Measures with this property have essential lower
// spectral bound 0.
bool inverse_moment_diverges(const Measure& m);

// Named families.
Measure point_mass(double lambda);
Measure projection(double alpha);
Measure marchenko_pastur(double c, const EvalConfig& cfg = {});
Measure quarter_circle_squared(const EvalConfig& cfg = {});
Measure make_named(Family f, double param, const EvalConfig& cfg = {});

}  // namespace freegeo
