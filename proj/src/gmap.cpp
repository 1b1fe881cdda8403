#include "freegeo/gmap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace freegeo {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

namespace detail {

Measure measure_from_quantile_table(const std::vector<double>& cdf_vals,
                                    const std::vector<double>& absc,
                                    double atom0,
                                    double target) {
    const std::size_t k = absc.size();
    if (k < 4 || cdf_vals.size() != k)
        throw NumericalError("quantile table too small to differentiate");

    std::vector<double> mid(k - 1), dd(k - 1);
    for (std::size_t i = 0; i + 1 < k; ++i) {
        double ds = absc[i + 1] - absc[i];
        if (!(ds > 0.0))
            throw NumericalError("quantile table abscissae not strictly increasing");
        mid[i] = 0.5 * (absc[i] + absc[i + 1]);
        dd[i] = (cdf_vals[i + 1] - cdf_vals[i]) / ds;
    }

    std::vector<double> grid;
    grid.reserve(k + 1);
    grid.push_back(absc.front());
    grid.insert(grid.end(), mid.begin(), mid.end());
    grid.push_back(absc.back());

    std::vector<double> f;
    f.reserve(k + 1);
    double left = dd[0] + (dd[0] - dd[1]) * (mid[0] - absc.front()) / (mid[1] - mid[0]);
    f.push_back(std::max(0.0, left));
    f.insert(f.end(), dd.begin(), dd.end());
    double right = dd[k - 2] +
                   (dd[k - 2] - dd[k - 3]) * (absc.back() - mid[k - 2]) / (mid[k - 2] - mid[k - 3]);
    f.push_back(std::max(0.0, right));

    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
    if (!(mass > 0.0))
        throw NumericalError("quantile table produced a vanishing density");
    double scale = target / mass;
    for (double& v : f) v *= scale;

    std::vector<Atom> atoms;
    if (atom0 > 0.0) atoms.push_back({0.0, atom0});
    Measure out(std::move(atoms), std::move(grid), std::move(f));
    out.add_note("density_renormalization", fmt(scale));
    return out;
}

}  // namespace detail

namespace {

using detail::measure_from_quantile_table;

void carry_input_notes(const Measure& mu, Measure& out) {
    auto it = mu.notes().find("family");
    if (it != mu.notes().end()) out.add_note("input.family", it->second);
}

}  // namespace

Measure gmap(const Measure& mu, const EvalConfig& cfg) {
    cfg.require_valid();
    if (mu.is_point_mass()) {
        double lambda = mu.atoms().front().location;
        Measure out = point_mass(std::sqrt(lambda));
        out.add_note("op", "gmap");
        if (lambda == 0.0) out.add_note("convention", "G(delta_0) = delta_0");
        carry_input_notes(mu, out);
        return out;
    }

    FTable ft = f_table(mu, cfg);
    Measure out = measure_from_quantile_table(ft.probabilities, ft.values,
                                              ft.beta, 1.0 - ft.beta);
    out.add_note("op", "gmap");
    out.add_note("atom_mass", fmt(ft.beta));
    out.add_note("support_lo", fmt(ft.values.front()));
    out.add_note("support_hi", fmt(ft.values.back()));
    auto [lo, hi] = support_bounds(mu);
    out.add_note("support_bound_lower", fmt(lo));
    out.add_note("support_bound_upper", fmt(hi));
    carry_input_notes(mu, out);
    return out;
}

Measure gmap_closed_form(Family fam, double param, const EvalConfig& cfg) {
    cfg.require_valid();
    const int n = std::max(cfg.grid_size, 16);
    switch (fam) {
        case Family::point_mass: {
            if (!(param >= 0.0))
                throw ValidationError("gmap_closed_form: lambda must be nonnegative");
            Measure out = point_mass(std::sqrt(param));
            out.add_note("op", "gmap_closed_form");
            return out;
        }
        case Family::quarter_circle_squared:
            param = 1.0;
            [[fallthrough]];
        case Family::marchenko_pastur: {
            if (!(param > 0.0))
                throw ValidationError("gmap_closed_form: c must be positive");
            double lo = std::sqrt(std::max(param - 1.0, 0.0));
            double hi = std::sqrt(param);
            std::vector<double> grid(n), f(n);
            for (int i = 0; i < n; ++i) {
                grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
                f[i] = 2.0 * grid[i];
            }
            grid.back() = hi;
            std::vector<Atom> atoms;
            if (param < 1.0) atoms.push_back({0.0, 1.0 - param});
            Measure out(std::move(atoms), std::move(grid), std::move(f));
            out.add_note("op", "gmap_closed_form");
            out.add_note("input.family", "marchenko_pastur");
            return out;
        }
        case Family::projection: {
            if (!(param > 0.0 && param < 1.0))
                throw ValidationError("gmap_closed_form: alpha must lie in (0, 1)");
            double hi = std::sqrt(param);
            std::vector<double> grid(n), f(n);
            for (int i = 0; i < n; ++i) {
                double t = hi * static_cast<double>(i) / (n - 1);
                double d = t * t - 1.0;
                grid[i] = t;
                f[i] = 2.0 * t * (1.0 - param) / (d * d);
            }
            grid.back() = hi;
            double mass = 0.0;
            for (int i = 0; i + 1 < n; ++i)
                mass += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
            double scale = param / mass;
            for (double& v : f) v *= scale;
            Measure out({{0.0, 1.0 - param}}, std::move(grid), std::move(f));
            out.add_note("op", "gmap_closed_form");
            out.add_note("input.family", "projection");
            out.add_note("density_renormalization", fmt(scale));
            return out;
        }
    }
    throw ValidationError("gmap_closed_form: unknown family");
}

Measure gmap_boxplus_power(const Measure& mu, int n, const EvalConfig& cfg) {
    if (n < 1) throw ValidationError("gmap_boxplus_power: n must be >= 1");
    if (n == 1) return gmap(mu, cfg);
    cfg.require_valid();
    if (mu.is_point_mass()) {
        // delta_lambda^{boxplus n} = delta_{n lambda}
        double lambda = mu.atoms().front().location;
        Measure out = point_mass(std::sqrt(n * lambda));
        out.add_note("op", "gmap_boxplus_power");
        out.add_note("power.n", std::to_string(n));
        carry_input_notes(mu, out);
        return out;
    }

    const double beta = mu.atom_at_zero();
    const double beta_n = std::max(0.0, n * beta - (n - 1));
    const double cut = (beta_n + n - 1) / static_cast<double>(n);  // = max(beta, (n-1)/n)
    const double root_n = std::sqrt(static_cast<double>(n));

    FTable ft = f_table(mu, cfg);
    std::vector<double> cdf_vals, absc;
    cdf_vals.reserve(ft.probabilities.size() + 1);
    absc.reserve(ft.probabilities.size() + 1);
    const bool cutting = cut > ft.probabilities.front();
    if (cutting) {
        // The atom dissolves and the lower part of the density is cut off at
        // the exact quantile level (n-1)/n.
        double F_cut = 1.0 / std::sqrt(s_transform(mu, cut - 1.0, cfg));
        cdf_vals.push_back(beta_n);
        absc.push_back(root_n * F_cut);
    }
    for (std::size_t i = 0; i < ft.probabilities.size(); ++i) {
        double t = ft.probabilities[i];
        if (cutting && t <= cut + 1e-12) continue;
        cdf_vals.push_back(beta_n + n * (t - cut));
        absc.push_back(root_n * ft.values[i]);
    }

    Measure out = measure_from_quantile_table(cdf_vals, absc, beta_n, 1.0 - beta_n);
    out.add_note("op", "gmap_boxplus_power");
    out.add_note("power.n", std::to_string(n));
    out.add_note("atom_mass", fmt(beta_n));
    out.add_note("support_lo", fmt(absc.front()));
    out.add_note("support_hi", fmt(absc.back()));
    carry_input_notes(mu, out);
    return out;
}

Measure gmap_boxtimes_power(const Measure& mu, int n, const EvalConfig& cfg) {
    if (n < 1) throw ValidationError("gmap_boxtimes_power: n must be >= 1");
    if (n == 1) return gmap(mu, cfg);
    cfg.require_valid();
    if (mu.is_point_mass()) {
        // delta_lambda^{boxtimes n} = delta_{lambda^n}
        double lambda = mu.atoms().front().location;
        Measure out = point_mass(std::pow(lambda, 0.5 * n));
        out.add_note("op", "gmap_boxtimes_power");
        out.add_note("power.n", std::to_string(n));
        carry_input_notes(mu, out);
        return out;
    }

    const double beta = mu.atom_at_zero();
    FTable ft = f_table(mu, cfg);
    std::vector<double> absc(ft.values.size());
    for (std::size_t i = 0; i < absc.size(); ++i)
        absc[i] = std::pow(ft.values[i], static_cast<double>(n));

    Measure out = measure_from_quantile_table(ft.probabilities, absc, beta, 1.0 - beta);
    double mass = out.total_mass();
    if (std::abs(mass - 1.0) > kMassTolerance)
        throw NumericalError("gmap_boxtimes_power: mass check failed: " + fmt(mass));
    out.add_note("op", "gmap_boxtimes_power");
    out.add_note("power.n", std::to_string(n));
    out.add_note("atom_mass", fmt(beta));
    out.add_note("support_lo", fmt(absc.front()));
    out.add_note("support_hi", fmt(absc.back()));
    carry_input_notes(mu, out);
    return out;
}

std::pair<double, double> support_bounds(const Measure& mu) {
    double upper = std::sqrt(mu.moment(1.0));
    double lower = 0.0;
    if (!inverse_moment_diverges(mu)) lower = 1.0 / std::sqrt(mu.moment(-1.0));
    return {lower, upper};
}

}  // namespace freegeo
