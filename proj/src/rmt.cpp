#include "freegeo/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

namespace freegeo::rmt {

Method method_from_string(const std::string& s) {
    if (s == "direct") return Method::direct;
    if (s == "qr_log") return Method::qr_log;
    throw ValidationError("unknown method '" + s + "' (expected direct or qr_log)");
}

const char* method_name(Method m) {
    return m == Method::direct ? "direct" : "qr_log";
}

void SimConfig::require_valid() const {
    if (dim < 1 || n_factors < 1 || trials < 1)
        throw ValidationError("SimConfig: dim, n_factors and trials must be positive");
    if (method == Method::direct && n_factors > 32)
        throw ValidationError("SimConfig: the direct method is limited to n_factors <= 32 "
                              "(overflow guard); use qr_log");
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Eigen::MatrixXd sample_haar_orthogonal(int n, Rng& rng) {
    if (n < 1) throw ValidationError("sample_haar_orthogonal: n must be >= 1");
    Eigen::MatrixXd g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the ambiguity of QR: normalizing the R diagonal to be positive makes
    // the law exactly Haar rather than merely orthogonal.
    for (int j = 0; j < n; ++j)
        if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Eigen::MatrixXd sample_factor(const Measure& mu, int n, Rng& rng) {
    Eigen::VectorXd root_s(n);
    for (int i = 0; i < n; ++i) root_s(i) = std::sqrt(mu.quantile(rng.uniform()));
    Eigen::MatrixXd t = sample_haar_orthogonal(n, rng);
    for (int j = 0; j < n; ++j) t.col(j) *= root_s(j);
    return t;
}

namespace {

std::vector<double> direct_trial(const Measure& mu, const SimConfig& cfg, int trial) {
    const int n = cfg.dim;
    Rng rng(child_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    double log_scale = 0.0;
    bool annihilated = false;
    for (int k = 0; k < cfg.n_factors; ++k) {
        Eigen::MatrixXd t = sample_factor(mu, n, rng);
        p = (t * p).eval();
        double m = p.cwiseAbs().maxCoeff();
        if (!std::isfinite(m))
            throw NumericalError("simulate_direct: non-finite entries in trial " +
                                 std::to_string(trial) + " at factor " + std::to_string(k + 1));
        if (m == 0.0) {
            annihilated = true;
            break;
        }
        p /= m;
        log_scale += std::log(m);
    }
    std::vector<double> out(n, 0.0);
    if (!annihilated) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.transpose() * p);
        for (int i = 0; i < n; ++i) {
            double lam = std::max(es.eigenvalues()(i), 0.0);
            // sample = (sigma * e^{log_scale})^{1/n}
            out[static_cast<std::size_t>(i)] =
                lam == 0.0 ? 0.0
                           : std::exp((0.5 * std::log(lam) + log_scale) / cfg.n_factors);
        }
    }
    return out;
}

std::vector<double> qr_log_trial(const Measure& mu, const SimConfig& cfg, int trial) {
    const int n = cfg.dim;
    Rng rng(child_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd ell = Eigen::VectorXd::Zero(n);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < cfg.n_factors; ++k) {
        Eigen::MatrixXd t = sample_factor(mu, n, rng);
        Eigen::MatrixXd a = t * q;
        if (!a.allFinite())
            throw NumericalError("simulate_qr_log: non-finite entries in trial " +
                                 std::to_string(trial) + " at factor " + std::to_string(k + 1));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
        for (int i = 0; i < n; ++i) {
            double d = std::abs(qr.matrixQR()(i, i));
            ell(i) = (d == 0.0) ? neg_inf : ell(i) + std::log(d);
        }
        q = qr.householderQ();
    }
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] =
            std::isfinite(ell(i)) ? std::exp(ell(i) / cfg.n_factors) : 0.0;
    return out;
}

template <typename TrialFn>
SpectrumSample run_trials(const Measure& mu, const SimConfig& cfg, TrialFn trial_fn) {
    cfg.require_valid();
    std::vector<std::future<std::vector<double>>> futures;
    futures.reserve(cfg.trials);
    for (int i = 0; i < cfg.trials; ++i)
        futures.push_back(std::async(std::launch::async | std::launch::deferred,
                                     [&, i] { return trial_fn(mu, cfg, i); }));
    SpectrumSample out;
    out.config = cfg;
    out.values.reserve(static_cast<std::size_t>(cfg.trials) * cfg.dim);
    for (auto& f : futures) {
        std::vector<double> v = f.get();
        out.values.insert(out.values.end(), v.begin(), v.end());
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

}  // namespace

SpectrumSample simulate_direct(const Measure& mu, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.method = Method::direct;
    return run_trials(mu, c, direct_trial);
}

SpectrumSample simulate_qr_log(const Measure& mu, const SimConfig& cfg) {
    SimConfig c = cfg;
    c.method = Method::qr_log;
    return run_trials(mu, c, qr_log_trial);
}

SpectrumSample simulate(const Measure& mu, const SimConfig& cfg) {
    return cfg.method == Method::direct ? simulate_direct(mu, cfg)
                                        : simulate_qr_log(mu, cfg);
}

SpectrumSample lyapunov_empirical(const SpectrumSample& sample) {
    SpectrumSample out;
    out.config = sample.config;
    out.values.reserve(sample.values.size());
    for (double v : sample.values) {
        if (v > 0.0)
            out.values.push_back(std::log(v));
        else
            ++out.zeros_dropped;
    }
    return out;  // log is monotone, so the order is preserved
}

GofReport ks_report(const SpectrumSample& sample, const Measure& predicted) {
    if (sample.values.empty())
        throw ValidationError("ks_report: empty sample");

    std::vector<double> candidates = sample.values;
    for (const Atom& a : predicted.atoms()) candidates.push_back(a.location);
    candidates.insert(candidates.end(), predicted.grid().begin(), predicted.grid().end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const double n = static_cast<double>(sample.values.size());
    GofReport rep;
    rep.table.reserve(2 * candidates.size());
    std::size_t below = 0, at_or_below = 0;
    for (double x : candidates) {
        while (below < sample.values.size() && sample.values[below] < x) ++below;
        at_or_below = below;
        while (at_or_below < sample.values.size() && sample.values[at_or_below] <= x)
            ++at_or_below;
        double e_left = static_cast<double>(below) / n;
        double e_right = static_cast<double>(at_or_below) / n;
        double c_left = predicted.cdf_left(x);
        double c_right = predicted.cdf(x);
        rep.table.push_back({x, e_left, c_left});
        if (e_right != e_left || c_right != c_left) rep.table.push_back({x, e_right, c_right});
        rep.ks_distance = std::max({rep.ks_distance, std::abs(e_left - c_left),
                                    std::abs(e_right - c_right)});
    }
    return rep;
}

double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw ValidationError("ks_two_sample: empty sample");
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double ks = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        ks = std::max(ks, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return ks;
}

}  // namespace freegeo::rmt
