#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "freegeo/measure.hpp"

namespace testutil {

using freegeo::Atom;
using freegeo::Measure;

// KS distance of a sorted sample against a continuous CDF callable.
inline double ks_vs_cdf(const std::vector<double>& sorted,
                        const std::function<double(double)>& cdf) {
    double ks = 0.0;
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double c = cdf(sorted[i]);
        ks = std::max({ks, std::abs((i + 1.0) / n - c), std::abs(i / n - c)});
    }
    return ks;
}

// sup |CDF_a - CDF_b| probed at both measures' breakpoints, their one-sided
// limits, and cell midpoints.
inline double sup_cdf_distance(const Measure& a, const Measure& b) {
    std::vector<double> xs;
    auto collect = [&xs](const Measure& m) {
        for (const Atom& at : m.atoms()) xs.push_back(at.location);
        xs.insert(xs.end(), m.grid().begin(), m.grid().end());
    };
    collect(a);
    collect(b);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    std::vector<double> probes = xs;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) probes.push_back(0.5 * (xs[i] + xs[i + 1]));
    double d = 0.0;
    for (double x : probes) {
        d = std::max(d, std::abs(a.cdf(x) - b.cdf(x)));
        d = std::max(d, std::abs(a.cdf_left(x) - b.cdf_left(x)));
    }
    return d;
}

// Integral of g against the analytic Marchenko-Pastur density, computed with
// composite Simpson under t = (a+b)/2 - (b-a)/2 cos(phi), which removes both
// square-root edges and (for c = 1) the 1/sqrt(t) singularity.
inline double mp_reference_integral(double c, const std::function<double(double)>& g,
                                    int panels = 400000) {
    const double sc = std::sqrt(c);
    const double a = (c == 1.0) ? 0.0 : (sc - 1.0) * (sc - 1.0);
    const double b = (sc + 1.0) * (sc + 1.0);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto weight = [&](double phi) {
        if (c == 1.0) return (1.0 + std::cos(phi)) / M_PI;  // sin^2/t simplifies
        double t = mid - half * std::cos(phi);
        double s = std::sin(phi);
        return half * half * s * s / (2.0 * M_PI * t);
    };
    auto integrand = [&](double phi) {
        double t = mid - half * std::cos(phi);
        return weight(phi) * g(t);
    };
    if (panels % 2) ++panels;
    const double h = M_PI / panels;
    double sum = integrand(0.0) + integrand(M_PI);
    for (int i = 1; i < panels; ++i) sum += integrand(i * h) * ((i % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Independent quadrature of psi against the piecewise-linear density itself:
// composite trapezoid with every cell refined, >= min_points total.
inline double psi_trapezoid_reference(const Measure& m, double x,
                                      std::size_t min_points = 1000000) {
    double acc = 0.0;
    for (const Atom& at : m.atoms()) {
        if (at.location == 0.0) continue;
        acc += at.mass * x * at.location / (1.0 - x * at.location);
    }
    const auto& g = m.grid();
    const auto& f = m.density();
    if (g.size() < 2) return acc;
    std::size_t refine = min_points / (g.size() - 1) + 1;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double w = (g[i + 1] - g[i]) / static_cast<double>(refine);
        double prev = f[i] * x * g[i] / (1.0 - x * g[i]);
        double cell = 0.0;
        for (std::size_t j = 1; j <= refine; ++j) {
            double t = g[i] + w * static_cast<double>(j);
            double s = static_cast<double>(j) / static_cast<double>(refine);
            double ft = f[i] * (1.0 - s) + f[i + 1] * s;
            double cur = ft * x * t / (1.0 - x * t);
            cell += 0.5 * (prev + cur) * w;
            prev = cur;
        }
        acc += cell;
    }
    return acc;
}

// Copy of m with support scaled by s (locations and abscissae times s,
// ordinates divided by s).
inline Measure scale_support(const Measure& m, double s) {
    std::vector<Atom> atoms = m.atoms();
    for (Atom& a : atoms) a.location *= s;
    std::vector<double> grid = m.grid(), dens = m.density();
    for (double& t : grid) t *= s;
    for (double& f : dens) f /= s;
    return Measure(std::move(atoms), std::move(grid), std::move(dens));
}

}  // namespace testutil
