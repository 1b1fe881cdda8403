#pragma once

#include <vector>

#include "freegeo/measure.hpp"

namespace freegeo {

// Quantile table of F(t) = S_mu(t-1)^{-1/2} on (beta, 1], beta = mu({0}).
// F is strictly increasing there; its inverse's derivative is the density of
// the limit law, so this table is the bridge between mu and G(mu).
struct FTable {
    std::vector<double> probabilities;  // t values in (beta, 1], strictly increasing
    std::vector<double> values;         // F(t), strictly increasing and positive
    double beta = 0.0;
};

// psi_mu(x) = integral of x t / (1 - x t) dmu(t), evaluated on the real
// negative axis where the integrand is smooth.  Exact per-cell antiderivatives
// against the piecewise-linear density; atoms summed directly.
double psi(const Measure& mu, double x, const EvalConfig& cfg = {});

// d psi / dx, same evaluation strategy.
double psi_prime(const Measure& mu, double x, const EvalConfig& cfg = {});

// Compositional inverse of psi restricted to the real slice: the unique x < 0
// with psi(x) = z, for z in (beta - 1, 0).  Geometric bracket expansion from
// x = -1, then safeguarded Newton inside the bracket down to cfg.root_tol.
double chi(const Measure& mu, double z, const EvalConfig& cfg = {});

// S_mu(z) = (1 + z)/z * chi_mu(z) on (beta - 1, 0), z != 0.
double s_transform(const Measure& mu, double z, const EvalConfig& cfg = {});

// Boundary value S_mu(0) = 1 / m1.
double s_at_zero(const Measure& mu);

// Tabulates F on cfg.grid_size points of (beta + eps_boundary, 1], t = 1
// included exactly through s_at_zero.  When the inverse moment diverges the
// grid is additionally log-refined in (t - beta) so the steep F ~ 0 endpoint
// is resolved.  Throws NumericalError if the computed values fail strict
// monotonicity.
FTable f_table(const Measure& mu, const EvalConfig& cfg = {});

}  // namespace freegeo
