#pragma once

#include <utility>

#include "freegeo/measure.hpp"
#include "freegeo/xform.hpp"

namespace freegeo {

// The limit law of the 2n-th roots of T1*..Tn*Tn..T1 where mu is the law of
// |T|^2: nu = beta delta_0 + f(t) dt with f = (F_mu^{<-1>})' on the interval
// (lower essential bound, sqrt(m1)].  Point masses short-circuit to
// delta_{sqrt(lambda)}; the point mass at 0 maps to itself by convention
// (flagged in the output notes).
Measure gmap(const Measure& mu, const EvalConfig& cfg = {});

// Exact analytic images for the named families, used as golden references:
//   marchenko_pastur(c) -> max{1-c,0} delta_0 + 2t on (sqrt(max{c-1,0}), sqrt(c)]
//   projection(alpha)   -> (1-alpha) delta_0 + 2t(1-alpha)/(t^2-1)^2 on (0, sqrt(alpha)]
//   point_mass(lambda)  -> delta_{sqrt(lambda)}
Measure gmap_closed_form(Family f, double param, const EvalConfig& cfg = {});

// Image of the n-fold free additive convolution power:
// atom max{0, n beta - (n-1)}, density sqrt(n) f(t/sqrt(n)) on the pushed interval.
Measure gmap_boxplus_power(const Measure& mu, int n, const EvalConfig& cfg = {});

// Image of the n-fold free multiplicative convolution power:
// atom beta unchanged, density (1/n) t^{(1-n)/n} f(t^{1/n}).
Measure gmap_boxtimes_power(const Measure& mu, int n, const EvalConfig& cfg = {});

// Essential spectral bounds of the limit law before computing it:
// upper = sqrt(m1), lower = m_{-1}^{-1/2}, or 0 when the inverse moment diverges.
std::pair<double, double> support_bounds(const Measure& mu);

namespace detail {

// Turns a strictly increasing quantile table { cdf(absc[i]) = cdf_vals[i] }
// into a measure with piecewise-linear density: divided differences assigned
// at cell midpoints, ordinates extrapolated to the endpoints, then rescaled so
// the density mass equals target exactly.  Shared by the G-map, its power
// formulas and the Lyapunov pushforward.
Measure measure_from_quantile_table(const std::vector<double>& cdf_vals,
                                    const std::vector<double>& absc,
                                    double atom0,
                                    double target);

}  // namespace detail

}  // namespace freegeo
