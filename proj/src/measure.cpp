#include "freegeo/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace freegeo {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// integral of t^q over [u, v], 0 <= u < v.  Caller rules out divergent cases.
double power_integral(double u, double v, double q) {
    if (q == -1.0) return std::log(v / u);
    return (std::pow(v, q + 1.0) - std::pow(u, q + 1.0)) / (q + 1.0);
}

}  // namespace

void EvalConfig::require_valid() const {
    if (quad_points <= 0 || grid_size <= 1 || root_tol <= 0.0 || eps_boundary <= 0.0)
        throw ValidationError("EvalConfig: all fields must be strictly positive (grid_size > 1)");
}

const char* family_name(Family f) {
    switch (f) {
        case Family::point_mass: return "point_mass";
        case Family::projection: return "projection";
        case Family::marchenko_pastur: return "marchenko_pastur";
        case Family::quarter_circle_squared: return "quarter_circle_squared";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    if (name == "point_mass") return Family::point_mass;
    if (name == "projection") return Family::projection;
    if (name == "marchenko_pastur") return Family::marchenko_pastur;
    if (name == "quarter_circle_squared") return Family::quarter_circle_squared;
    throw ValidationError("unknown family '" + name + "'");
}

const char* family_param_name(Family f) {
    switch (f) {
        case Family::point_mass: return "lambda";
        case Family::projection: return "alpha";
        case Family::marchenko_pastur: return "c";
        case Family::quarter_circle_squared: return "";
    }
    return "";
}

Measure::Measure(std::vector<Atom> atoms,
                 std::vector<double> grid,
                 std::vector<double> density)
    : atoms_(std::move(atoms)), grid_(std::move(grid)), density_(std::move(density)) {
    if (grid_.size() != density_.size())
        throw ValidationError("Measure: density grid and ordinates differ in length");
    if (grid_.size() == 1)
        throw ValidationError("Measure: a density table needs at least two points");
    std::sort(atoms_.begin(), atoms_.end(),
              [](const Atom& a, const Atom& b) { return a.location < b.location; });

    structurally_sound_ = true;
    for (const Atom& a : atoms_)
        if (!std::isfinite(a.location) || !std::isfinite(a.mass)) structurally_sound_ = false;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]) || !std::isfinite(density_[i])) structurally_sound_ = false;
        if (i > 0 && !(grid_[i] > grid_[i - 1])) structurally_sound_ = false;
    }
    if (structurally_sound_) build_cumulative();
}

void Measure::build_cumulative() {
    cell_cum_.assign(grid_.size(), 0.0);
    slopes_.assign(grid_.size() >= 1 ? grid_.size() - 1 : 0, 0.0);
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        cell_cum_[i + 1] = cell_cum_[i] +
            0.5 * (density_[i] + density_[i + 1]) * (grid_[i + 1] - grid_[i]);
        slopes_[i] = (density_[i + 1] - density_[i]) / (grid_[i + 1] - grid_[i]);
    }

    // Breakpoints: merged atom locations and grid nodes with running CDF.
    std::vector<double> xs;
    xs.reserve(atoms_.size() + grid_.size());
    for (const Atom& a : atoms_) xs.push_back(a.location);
    for (double t : grid_) xs.push_back(t);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    breakpoints_.clear();
    breakpoints_.reserve(xs.size());
    std::size_t ai = 0;
    double atom_cum = 0.0;
    for (double x : xs) {
        double here = 0.0;
        while (ai < atoms_.size() && atoms_[ai].location <= x) {
            if (atoms_[ai].location == x) here += atoms_[ai].mass;
            atom_cum += atoms_[ai].mass;
            ++ai;
        }
        double dens = 0.0;
        if (has_density() && x > grid_.front()) {
            if (x >= grid_.back()) {
                dens = cell_cum_.back();
            } else {
                auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
                std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
                double u = grid_[k], w = x - u;
                double slope = (density_[k + 1] - density_[k]) / (grid_[k + 1] - u);
                dens = cell_cum_[k] + density_[k] * w + 0.5 * slope * w * w;
            }
        }
        breakpoints_.push_back({x, here, atom_cum + dens});
    }
}

double Measure::atom_mass_at(double location) const {
    double m = 0.0;
    for (const Atom& a : atoms_)
        if (a.location == location) m += a.mass;
    return m;
}

double Measure::atom_mass() const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.mass;
    return m;
}

double Measure::density_mass() const {
    if (!structurally_sound_ || cell_cum_.empty()) return 0.0;
    return cell_cum_.back();
}

bool Measure::is_point_mass() const {
    return atoms_.size() == 1 && density_mass() == 0.0 &&
           std::abs(atoms_[0].mass - 1.0) <= kMassTolerance;
}

double Measure::min_support() const {
    if (atoms_.empty() && !has_density())
        throw ValidationError("min_support: empty measure");
    double lo = std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) lo = atoms_.front().location;
    if (has_density()) lo = std::min(lo, grid_.front());
    return lo;
}

double Measure::max_support() const {
    if (atoms_.empty() && !has_density())
        throw ValidationError("max_support: empty measure");
    double hi = -std::numeric_limits<double>::infinity();
    if (!atoms_.empty()) hi = atoms_.back().location;
    if (has_density()) hi = std::max(hi, grid_.back());
    return hi;
}

double Measure::density_at(double x) const {
    if (!has_density() || x < grid_.front() || x > grid_.back()) return 0.0;
    if (x == grid_.back()) return density_.back();
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t k = static_cast<std::size_t>(it - grid_.begin());
    if (k == 0) return density_.front();
    --k;
    double w = grid_[k + 1] - grid_[k];
    double s = (x - grid_[k]) / w;
    return density_[k] * (1.0 - s) + density_[k + 1] * s;
}

double Measure::moment(double p) const {
    if (!structurally_sound_)
        throw ValidationError("moment: measure is structurally invalid");
    double total = 0.0;
    for (const Atom& a : atoms_) {
        if (a.location == 0.0) {
            if (p < 0.0)
                throw InfiniteMomentError("moment: negative power against an atom at 0");
            total += (p == 0.0) ? a.mass : 0.0;
        } else {
            total += a.mass * std::pow(a.location, p);
        }
    }
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        double u = grid_[i], v = grid_[i + 1];
        double fu = density_[i], fv = density_[i + 1];
        double slope = (fv - fu) / (v - u);
        double a0 = fu - slope * u;  // density = a0 + slope * t on [u, v]
        if (u == 0.0) {
            if (fu != 0.0 && p <= -1.0)
                throw InfiniteMomentError("moment: density positive at 0, integral of t^p diverges");
            if (p <= -2.0 && (fu != 0.0 || fv != 0.0))
                throw InfiniteMomentError("moment: integral of t^p diverges at 0");
        }
        if (a0 != 0.0) total += a0 * power_integral(u, v, p);
        if (slope != 0.0) total += slope * power_integral(u, v, p + 1.0);
    }
    return total;
}

double Measure::cdf(double x) const {
    if (!structurally_sound_)
        throw ValidationError("cdf: measure is structurally invalid");
    double c = 0.0;
    for (const Atom& a : atoms_) {
        if (a.location <= x) c += a.mass;
    }
    if (has_density() && x > grid_.front()) {
        if (x >= grid_.back()) {
            c += cell_cum_.back();
        } else {
            auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
            std::size_t k = static_cast<std::size_t>(it - grid_.begin()) - 1;
            double u = grid_[k], w = x - u;
            double slope = (density_[k + 1] - density_[k]) / (grid_[k + 1] - u);
            c += cell_cum_[k] + density_[k] * w + 0.5 * slope * w * w;
        }
    }
    return std::clamp(c, 0.0, 1.0);
}

double Measure::cdf_left(double x) const {
    return std::clamp(cdf(x) - atom_mass_at(x), 0.0, 1.0);
}

double Measure::quantile(double q) const {
    if (!(q > 0.0 && q < 1.0))
        throw ValidationError("quantile: q must lie in (0, 1)");
    if (!structurally_sound_ || breakpoints_.empty())
        throw ValidationError("quantile: measure is structurally invalid or empty");

    auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), q,
                               [](const Breakpoint& b, double v) { return b.cum < v; });
    if (it == breakpoints_.end()) return breakpoints_.back().x;  // mass shy of 1 by tolerance
    std::size_t k = static_cast<std::size_t>(it - breakpoints_.begin());
    const Breakpoint& bk = breakpoints_[k];
    if (q > bk.cum - bk.atom || k == 0) return bk.x;  // inside the atom's jump

    const Breakpoint& prev = breakpoints_[k - 1];
    double r = q - prev.cum;
    double increase = (bk.cum - bk.atom) - prev.cum;
    if (r >= increase) return bk.x;  // lands exactly on the cell end
    double w = bk.x - prev.x;
    double fa = density_at(prev.x);
    double fb = density_at(bk.x);
    double slope = (fb - fa) / w;
    double s;
    if (std::abs(slope) * w < 1e-14 * std::max(fa, 1e-300)) {
        s = r / fa;
    } else {
        double disc = std::max(fa * fa + 2.0 * slope * r, 0.0);
        double denom = fa + std::sqrt(disc);
        s = (denom > 0.0) ? 2.0 * r / denom : w;
    }
    return prev.x + std::clamp(s, 0.0, w);
}

std::vector<std::string> Measure::validate() const {
    std::vector<std::string> out;
    for (const Atom& a : atoms_) {
        if (!std::isfinite(a.location) || !std::isfinite(a.mass))
            out.push_back("non-finite atom");
        if (a.location < 0.0)
            out.push_back("negative support: atom at " + fmt(a.location));
        if (!(a.mass > 0.0 && a.mass <= 1.0))
            out.push_back("atom mass " + fmt(a.mass) + " outside (0, 1]");
    }
    for (std::size_t i = 0; i + 1 < atoms_.size(); ++i)
        if (atoms_[i].location == atoms_[i + 1].location)
            out.push_back("duplicate atom location " + fmt(atoms_[i].location));
    if (!grid_.empty() && grid_.front() < 0.0)
        out.push_back("negative support: density abscissa " + fmt(grid_.front()));
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(grid_[i]) || !std::isfinite(density_[i])) {
            out.push_back("non-finite density table entry");
            break;
        }
    }
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (!(grid_[i] < grid_[i + 1])) {
            out.push_back("density abscissae not strictly increasing");
            break;
        }
    }
    for (double f : density_) {
        if (f < 0.0) {
            out.push_back("negative density ordinate");
            break;
        }
    }
    if (structurally_sound_) {
        double m = total_mass();
        if (!(std::abs(m - 1.0) <= kMassTolerance))
            out.push_back("total mass " + fmt(m) + " differs from 1 beyond 1e-6");
    }
    return out;
}

bool inverse_moment_diverges(const Measure& m) {
    if (m.atom_at_zero() > 0.0) return true;
    if (m.has_density() && m.grid().front() == 0.0 && m.density().front() > 0.0) return true;
    return false;
}

Measure point_mass(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw ValidationError("point_mass: lambda must be a finite nonnegative real");
    Measure m({{lambda, 1.0}}, {}, {});
    m.add_note("family", "point_mass");
    m.add_note("param.lambda", fmt(lambda));
    return m;
}

Measure projection(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ValidationError("projection: alpha must lie in (0, 1)");
    Measure m({{0.0, 1.0 - alpha}, {1.0, alpha}}, {}, {});
    m.add_note("family", "projection");
    m.add_note("param.alpha", fmt(alpha));
    return m;
}

namespace {

// Mass of the Marchenko-Pastur c=1 density over [0, T]:
// (1/2pi) * integral of sqrt((4-t)/t), via t = 4 sin^2(theta).
double mp1_mass_below(double T) {
    double theta = std::asin(std::sqrt(std::clamp(T / 4.0, 0.0, 1.0)));
    return (4.0 * theta + 2.0 * std::sin(2.0 * theta)) / (2.0 * M_PI);
}

double mp_density(double t, double a, double b) {
    if (t <= a || t >= b) return 0.0;
    return std::sqrt((t - a) * (b - t)) / (2.0 * M_PI * t);
}

// Second derivative of the MP density via its log-derivative.
double mp_density_dd(double t, double a, double b) {
    double f = mp_density(t, a, b);
    if (f == 0.0) return 0.0;
    double l1 = 0.5 / (t - a) - 0.5 / (b - t) - 1.0 / t;
    double l2 = -0.5 / ((t - a) * (t - a)) - 0.5 / ((b - t) * (b - t)) + 1.0 / (t * t);
    return f * (l2 + l1 * l1);
}

}  // namespace

Measure marchenko_pastur(double c, const EvalConfig& cfg) {
    if (!(c > 0.0) || !std::isfinite(c))
        throw ValidationError("marchenko_pastur: c must be a finite positive real");
    cfg.require_valid();

    const double sc = std::sqrt(c);
    const double a = (c == 1.0) ? 0.0 : (sc - 1.0) * (sc - 1.0);
    const double b = (sc + 1.0) * (sc + 1.0);
    const int m = std::max(cfg.grid_size, 16);

    // Grid clustered at both endpoints (the density has square-root edges),
    // with the outermost cells further refined quad_points-fold.  For c = 1 the
    // left edge is an integrable t^{-1/2} singularity instead: there the grid
    // descends geometrically to 1e-12 and the ordinate at t = 0 is chosen so
    // the first cell carries the exact analytic mass.
    std::vector<double> base(m);
    for (int i = 0; i < m; ++i) {
        double s = std::sin(M_PI_2 * static_cast<double>(i) / (m - 1));
        base[i] = a + (b - a) * s * s;
    }
    base.front() = a;
    base.back() = b;

    std::vector<double> grid;
    grid.reserve(base.size() + static_cast<std::size_t>(m) / 4 + 2 * cfg.quad_points);
    auto subdivide = [&](double lo, double hi, std::vector<double>& into) {
        for (int j = 1; j < cfg.quad_points; ++j)
            into.push_back(lo + (hi - lo) * static_cast<double>(j) / cfg.quad_points);
    };
    if (a == 0.0) {
        const double t_min = 1e-12;
        const int k0 = std::max(8, m / 8);
        const int n_geo = std::max(5 * m / 8, 256);
        const double ratio = std::pow(base[k0] / t_min, 1.0 / n_geo);
        grid.push_back(0.0);
        double t = t_min;
        for (int j = 0; j < n_geo && t < base[k0]; ++j, t *= ratio) grid.push_back(t);
        grid.insert(grid.end(), base.begin() + k0, base.end());
    } else {
        grid = base;
        std::vector<double> extra;
        subdivide(grid[0], grid[1], extra);
        grid.insert(grid.end(), extra.begin(), extra.end());
    }
    {
        std::vector<double> extra;
        subdivide(base[m - 2], base[m - 1], extra);
        grid.insert(grid.end(), extra.begin(), extra.end());
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = mp_density(grid[i], a, b);

    // Counteract the trapezoid bias of the piecewise-linear contract: shifting
    // each interior ordinate by (w_l^2 f''_l + w_r^2 f''_r)/24, with f''
    // evaluated at the adjacent cell midpoints, makes the per-cell mass match
    // the analytic integral two orders beyond plain node sampling.
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        if (f[i] == 0.0) continue;
        double wl = grid[i] - grid[i - 1];
        double wr = grid[i + 1] - grid[i];
        double fdd_l = mp_density_dd(0.5 * (grid[i - 1] + grid[i]), a, b);
        double fdd_r = mp_density_dd(0.5 * (grid[i] + grid[i + 1]), a, b);
        double corr = (wl * wl * fdd_l + wr * wr * fdd_r) / 24.0;
        f[i] = std::max(0.0, f[i] - corr);
    }

    if (a == 0.0) {
        double t1 = grid[1];
        f[0] = std::max(0.0, 2.0 * mp1_mass_below(t1) / t1 - f[1]);
    }

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
    const double target = std::min(c, 1.0);
    const double scale = target / mass;
    for (double& v : f) v *= scale;

    std::vector<Atom> atoms;
    if (c < 1.0) atoms.push_back({0.0, 1.0 - c});

    Measure out(std::move(atoms), std::move(grid), std::move(f));
    out.add_note("family", "marchenko_pastur");
    out.add_note("param.c", fmt(c));
    out.add_note("density_renormalization", fmt(scale));
    return out;
}

Measure quarter_circle_squared(const EvalConfig& cfg) {
    // Law of h^2 for quarter-circular h; change of variables gives MP(1).
    Measure out = marchenko_pastur(1.0, cfg);
    out.add_note("family", "quarter_circle_squared");
    return out;
}

Measure make_named(Family f, double param, const EvalConfig& cfg) {
    switch (f) {
        case Family::point_mass: return point_mass(param);
        case Family::projection: return projection(param);
        case Family::marchenko_pastur: return marchenko_pastur(param, cfg);
        case Family::quarter_circle_squared: return quarter_circle_squared(cfg);
    }
    throw ValidationError("make_named: unknown family");
}

}  // namespace freegeo
