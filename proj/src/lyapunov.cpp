#include "freegeo/lyapunov.hpp"

#include <cmath>
#include <cstdio>

#include "freegeo/gmap.hpp"
#include "freegeo/xform.hpp"

namespace freegeo {

namespace {

constexpr double kTailMass = 1e-6;

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Measure lyapunov_distribution(const Measure& mu, const EvalConfig& cfg) {
    cfg.require_valid();
    if (mu.atom_at_zero() > 0.0)
        throw ValidationError("lyapunov_distribution: requires mu({0}) = 0 "
                              "(the exponent law assumes no mass at 0)");

    if (mu.is_point_mass()) {
        double lambda = mu.atoms().front().location;
        Measure out = point_mass(0.5 * std::log(lambda));
        out.add_note("op", "lyapunov");
        return out;
    }

    // CDF_nu(F(t)) = t, so gamma = log-pushforward of nu satisfies
    // CDF_gamma(ln F(t)) = t: the same quantile table with log abscissae.
    FTable ft = f_table(mu, cfg);
    const bool unbounded_below = inverse_moment_diverges(mu);

    // Truncate where the remaining tail mass drops under 1e-6 (the image is
    // unbounded below when the support of nu reaches 0).
    std::size_t start = 0;
    while (start + 4 < ft.probabilities.size() && ft.probabilities[start + 1] <= kTailMass)
        ++start;
    double dropped = ft.probabilities[start];

    std::vector<double> cdf_vals(ft.probabilities.begin() + start, ft.probabilities.end());
    std::vector<double> absc;
    absc.reserve(ft.values.size() - start);
    for (std::size_t i = start; i < ft.values.size(); ++i)
        absc.push_back(std::log(ft.values[i]));

    Measure out = detail::measure_from_quantile_table(cdf_vals, absc, 0.0, 1.0);
    out.add_note("op", "lyapunov");
    out.add_note("support_lo", fmt(out.grid().front()));
    out.add_note("support_hi", fmt(out.grid().back()));
    if (unbounded_below) {
        out.add_note("unbounded_below", "true");
        out.add_note("truncation_point", fmt(out.grid().front()));
        out.add_note("truncated_mass", fmt(dropped));
    }
    return out;
}

}  // namespace freegeo
