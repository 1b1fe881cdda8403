#include "freegeo/xform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace freegeo {

namespace {

struct PsiPair {
    double value = 0.0;
    double deriv = 0.0;
};

// Kahan-compensated accumulator; the F-table solves to 1e-12 residuals, so
// naive summation noise over thousands of cells would be visible.
struct Accum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        double y = v - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

// Helpers for the per-cell antiderivatives, q = (ub - ua)/ua > 0:
//   lg(q) = ln(1+q) - q          = -q^2/2 + q^3/3 - ...
//   lh(q) = ln(1+q) - q/(1+q)    =  q^2/2 - 2q^3/3 + 3q^4/4 - ...
// The direct forms cancel catastrophically for small q, so below q = 0.08 a
// fixed-order Horner evaluation is used (relative truncation ~ q^13).
inline void cancellation_free_logs(double q, double& lg, double& lh) {
    if (q > 0.08) {
        double L = std::log1p(q);
        lg = L - q;
        lh = L - q / (1.0 + q);
        return;
    }
    double p = -1.0 / 14.0;
    p = p * q + 1.0 / 13.0;
    p = p * q - 1.0 / 12.0;
    p = p * q + 1.0 / 11.0;
    p = p * q - 1.0 / 10.0;
    p = p * q + 1.0 / 9.0;
    p = p * q - 1.0 / 8.0;
    p = p * q + 1.0 / 7.0;
    p = p * q - 1.0 / 6.0;
    p = p * q + 1.0 / 5.0;
    p = p * q - 1.0 / 4.0;
    p = p * q + 1.0 / 3.0;
    p = p * q - 1.0 / 2.0;
    lg = p * q * q;
    double r = 13.0 / 14.0;
    r = r * q - 12.0 / 13.0;
    r = r * q + 11.0 / 12.0;
    r = r * q - 10.0 / 11.0;
    r = r * q + 9.0 / 10.0;
    r = r * q - 8.0 / 9.0;
    r = r * q + 7.0 / 8.0;
    r = r * q - 6.0 / 7.0;
    r = r * q + 5.0 / 6.0;
    r = r * q - 4.0 / 5.0;
    r = r * q + 3.0 / 4.0;
    r = r * q - 2.0 / 3.0;
    r = r * q + 1.0 / 2.0;
    lh = r * q * q;
}

PsiPair psi_pair(const Measure& mu, double x) {
    if (!(x < 0.0))
        throw ValidationError("psi: x must be negative (complex-plane evaluation not supported)");
    PsiPair out;
    Accum val, der;
    for (const Atom& a : mu.atoms()) {
        if (a.location == 0.0) continue;
        double u = 1.0 - x * a.location;
        val.add(a.mass * x * a.location / u);
        der.add(a.mass * a.location / (u * u));
    }
    const auto& g = mu.grid();
    const auto& f = mu.density();
    const auto& sl = mu.cell_slopes();
    const double inv_x = 1.0 / x;
    const double inv_x2 = inv_x * inv_x;
    const double inv_x3 = inv_x2 * inv_x;
    // Per cell, with k(t) = xt/(1-xt), f(t) = fa + slope (t - ta):
    //   P0 = int k dt,            P1 = int (t-ta) k dt,
    //   D0 = int t/(1-xt)^2 dt,   D1 = int (t-ta) t/(1-xt)^2 dt,
    // written in terms of q and the cancellation-free helpers, so every term
    // stays absolutely accurate at any magnitude of x.
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        double fa = f[i], fb = f[i + 1];
        if (fa == 0.0 && fb == 0.0) continue;
        double ta = g[i], tb = g[i + 1];
        double dt = tb - ta;
        double slope = sl[i];
        double ua = 1.0 - x * ta;
        double ub = 1.0 - x * tb;
        double du = -x * dt;  // ub - ua
        double inv_uaub = 1.0 / (ua * ub);
        double q = du * ub * inv_uaub;
        double lg, lh;
        cancellation_free_logs(q, lg, lh);
        double L = lg + q;  // ln(1+q)

        double p0 = -dt - L * inv_x;
        double p1 = -(0.5 * du * du + ua * lg) * inv_x2;
        val.add(fa * p0 + slope * p1);

        double d0 = lg * inv_x2 + dt * tb * inv_uaub;
        double d1 = (lh + ua * lg) * inv_x3;
        der.add(fa * d0 + slope * d1);
    }
    out.value = val.sum;
    out.deriv = der.sum;
    return out;
}

// Safeguarded Newton on psi(x) - z inside a bracket with psi(lo) < z < psi(hi).
double solve_in_bracket(const Measure& mu, double z, double lo, double hi,
                        const EvalConfig& cfg) {
    double x = 0.5 * (lo + hi);
    double x_prev = std::numeric_limits<double>::quiet_NaN();
    double r_prev = std::numeric_limits<double>::quiet_NaN();
    double r = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 300; ++it) {
        PsiPair p = psi_pair(mu, x);
        double r_new = p.value - z;
        if (std::abs(r_new) <= cfg.root_tol) return x;
        x_prev = x;
        r_prev = r;
        r = r_new;
        if (r < 0.0)
            lo = x;
        else
            hi = x;
        double xn = x - r / p.deriv;
        bool newton_ok = std::isfinite(xn) && xn > lo && xn < hi;
        // Force a bisection step whenever Newton stops making progress.
        if (!newton_ok || (std::isfinite(r_prev) && std::abs(r) > 0.5 * std::abs(r_prev)))
            xn = 0.5 * (lo + hi);
        if (xn == x) break;
        x = xn;
    }
    // One secant polish with the last two iterates.
    if (std::isfinite(x_prev) && std::isfinite(r_prev) && r != r_prev) {
        double xs = x - r * (x - x_prev) / (r - r_prev);
        if (std::isfinite(xs) && xs < 0.0) {
            double rs = psi_pair(mu, xs).value - z;
            if (std::abs(rs) < std::abs(r)) {
                x = xs;
                r = rs;
            }
        }
    }
    if (!(std::abs(r) <= 16.0 * cfg.root_tol))
        throw NumericalError("chi: root refinement stalled above root_tol");
    return x;
}

void check_invertible(const Measure& mu, const char* who) {
    if (mu.is_point_mass() && mu.atom_at_zero() > 0.0)
        throw ValidationError(std::string(who) + ": psi is identically 0 for the point mass at 0");
}

}  // namespace

double psi(const Measure& mu, double x, const EvalConfig& cfg) {
    cfg.require_valid();
    return psi_pair(mu, x).value;
}

double psi_prime(const Measure& mu, double x, const EvalConfig& cfg) {
    cfg.require_valid();
    return psi_pair(mu, x).deriv;
}

double chi(const Measure& mu, double z, const EvalConfig& cfg) {
    cfg.require_valid();
    check_invertible(mu, "chi");
    double beta = mu.atom_at_zero();
    if (!(z > beta - 1.0 && z < 0.0))
        throw ValidationError("chi: z must lie strictly inside (beta - 1, 0)");

    double lo, hi;
    double f1 = psi_pair(mu, -1.0).value;
    if (f1 == z) return -1.0;
    if (f1 > z) {
        hi = -1.0;
        lo = -2.0;
        int it = 0;
        while (psi_pair(mu, lo).value >= z) {
            hi = lo;
            lo *= 2.0;
            if (++it > 1000)
                throw NumericalError(
                    "chi: bracket expansion exceeded 1000 doublings (mass concentrated at 0)");
        }
    } else {
        lo = -1.0;
        hi = -0.5;
        int it = 0;
        while (psi_pair(mu, hi).value <= z) {
            lo = hi;
            hi *= 0.5;
            if (++it > 1000)
                throw NumericalError("chi: bracket expansion toward 0 exceeded 1000 halvings");
        }
    }
    return solve_in_bracket(mu, z, lo, hi, cfg);
}

double s_transform(const Measure& mu, double z, const EvalConfig& cfg) {
    if (z == 0.0)
        throw ValidationError("s_transform: use s_at_zero for the boundary value at z = 0");
    return (1.0 + z) / z * chi(mu, z, cfg);
}

double s_at_zero(const Measure& mu) {
    check_invertible(mu, "s_at_zero");
    double m1 = mu.moment(1.0);
    if (!(m1 > 0.0))
        throw ValidationError("s_at_zero: measure has vanishing first moment");
    return 1.0 / m1;
}

FTable f_table(const Measure& mu, const EvalConfig& cfg) {
    cfg.require_valid();
    if (mu.is_point_mass())
        throw ValidationError("f_table: F is constant for point masses (not invertible)");
    check_invertible(mu, "f_table");

    const double beta = mu.atom_at_zero();
    const double eps = cfg.eps_boundary;
    const int n = std::max(cfg.grid_size, 16);
    const double span = 1.0 - beta - eps;
    if (!(span > 0.0))
        throw ValidationError("f_table: eps_boundary leaves no room in (beta, 1]");

    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(n) + static_cast<std::size_t>(n) / 8 + 8);
    for (int k = 0; k < n; ++k)
        ts.push_back(beta + eps + span * static_cast<double>(k) / (n - 1));
    ts.back() = 1.0;
    if (inverse_moment_diverges(mu)) {
        // F vanishes at t = beta+; resolve the steep region log-uniformly in
        // t - beta, continuing until the uniform grid is itself log-fine
        // (otherwise the handover cells are wide on a log scale and bias the
        // tail of every log-space consumer).
        double delta = span / (n - 1);
        double switch_u = std::min(50.0 * delta, span);
        int n_log = std::max(n / 4, 64);
        double rho = std::pow(switch_u / eps, 1.0 / n_log);
        double u = eps;
        for (int j = 1; j < n_log; ++j) {
            u *= rho;
            if (u >= switch_u) break;
            ts.push_back(beta + u);
        }
        std::sort(ts.begin(), ts.end());
    }
    // Drop near-duplicate abscissae.
    std::vector<double> tgrid;
    tgrid.reserve(ts.size());
    for (double t : ts)
        if (tgrid.empty() || t - tgrid.back() > 1e-12 * span) tgrid.push_back(t);
    if (tgrid.back() != 1.0) tgrid.push_back(1.0);

    const std::size_t total = tgrid.size();
    std::vector<double> fvals(total, 0.0);
    fvals[total - 1] = std::sqrt(mu.moment(1.0));  // F(1) = sqrt(m1) exactly

    // Sweep t downward.  The previous root upper-bounds the next (psi is
    // increasing and convex), so Newton started there descends monotonically;
    // an extrapolated start is tried first and discarded if it undershoots.
    double x_prev = std::numeric_limits<double>::quiet_NaN();
    double x_prev2 = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t idx = total - 1; idx-- > 0;) {
        double z = tgrid[idx] - 1.0;
        double x;
        if (!std::isfinite(x_prev)) {
            x = chi(mu, z, cfg);
        } else {
            // Start at the extrapolated root if it still lies above the target
            // (psi is convex increasing, so Newton from above descends
            // monotonically); otherwise restart from the previous root, which
            // always lies above.
            x = x_prev;
            if (std::isfinite(x_prev2)) {
                double pred = x_prev + (x_prev - x_prev2);
                if (pred < 0.0) x = pred;
            }
            bool converged = false;
            PsiPair p = psi_pair(mu, x);
            if (p.value - z < 0.0) {
                x = x_prev;
                p = psi_pair(mu, x);
            }
            for (int it = 0; it < 60; ++it) {
                double r = p.value - z;
                if (std::abs(r) <= cfg.root_tol) {
                    converged = true;
                    break;
                }
                double xn = x - r / p.deriv;
                if (!std::isfinite(xn) || xn >= 0.0) break;
                if (xn == x) {
                    converged = std::abs(r) <= 16.0 * cfg.root_tol;
                    break;
                }
                x = xn;
                p = psi_pair(mu, x);
            }
            if (!converged) x = chi(mu, z, cfg);
        }
        double s = (1.0 + z) / z * x;
        if (!(s > 0.0) || !std::isfinite(s))
            throw NumericalError("f_table: S-transform evaluation failed at t = " +
                                 std::to_string(tgrid[idx]));
        fvals[idx] = 1.0 / std::sqrt(s);
        x_prev2 = x_prev;
        x_prev = x;
    }

    for (std::size_t i = 0; i < total; ++i) {
        bool bad = !std::isfinite(fvals[i]) || fvals[i] <= 0.0 ||
                   (i > 0 && !(fvals[i] > fvals[i - 1]));
        if (bad)
            throw NumericalError("f_table: F values lost strict monotonicity (grid too coarse)");
    }

    FTable out;
    out.probabilities = std::move(tgrid);
    out.values = std::move(fvals);
    out.beta = beta;
    return out;
}

}  // namespace freegeo
