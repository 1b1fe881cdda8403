#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "freegeo/measure.hpp"

namespace freegeo::rmt {

enum class Method { direct, qr_log };

Method method_from_string(const std::string& s);
const char* method_name(Method m);

struct SimConfig {
    int dim = 100;        // matrix size N
    int n_factors = 10;   // number of factors n
    int trials = 1;
    std::uint64_t seed = 0;
    Method method = Method::qr_log;
    std::string measure_spec;  // provenance echo only

    void require_valid() const;  // counts positive; direct method capped at n <= 32
};

// Sorted eigenvalue samples of B_n^{1/2n} over all trials.
struct SpectrumSample {
    std::vector<double> values;  // ascending, finite, >= 0
    SimConfig config;
    std::size_t zeros_dropped = 0;  // set by lyapunov_empirical
};

struct GofRow {
    double x = 0.0;
    double ecdf = 0.0;
    double cdf = 0.0;
};

// CDF comparison table; ks_distance equals the max of |ecdf - cdf| over rows.
struct GofReport {
    double ks_distance = 0.0;
    std::vector<GofRow> table;
};

// Deterministic per-stream RNG: mt19937_64 with hand-rolled uniform/normal
// mappings so the draw sequence does not depend on the standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t next_u64() { return gen_(); }
    // Uniform on (0, 1), never returns an endpoint.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    // Standard normal via Box-Muller, pairs cached.
    double normal();

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Fixed splitmix-style mix of (seed, stream) for independent trial substreams.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t stream);

// Haar-distributed random orthogonal matrix: Gaussian fill, Householder QR,
// columns sign-corrected by the diagonal of R.
Eigen::MatrixXd sample_haar_orthogonal(int n, Rng& rng);

// One factor T = U * diag(sqrt(s_i)) with U Haar orthogonal and s_i iid from
// mu (drawn by inverse CDF, so atoms produce exactly repeated values and
// projection factors are exactly rank-deficient).  The diagonal draws precede
// the Haar draws in the stream.
Eigen::MatrixXd sample_factor(const Measure& mu, int n, Rng& rng);

// Spectrum of B_n^{1/2n} by forming the product P = T_n ... T_1 with
// per-factor max-entry rescaling, then the symmetric eigendecomposition of
// P^T P.  Overflow-guarded only up to n <= 32.
SpectrumSample simulate_direct(const Measure& mu, const SimConfig& cfg);

// Benettin-style accumulation: sequential QR of T_k Q_{k-1}, summing
// log |R_kk|; never overflows.  Exact rank deficiency yields samples of 0.
SpectrumSample simulate_qr_log(const Measure& mu, const SimConfig& cfg);

// Dispatch on cfg.method.
SpectrumSample simulate(const Measure& mu, const SimConfig& cfg);

// Elementwise natural log of the sample; zeros dropped and counted.
SpectrumSample lyapunov_empirical(const SpectrumSample& sample);

// Kolmogorov-Smirnov comparison of the empirical law of `sample` against a
// predicted measure, evaluated at every sample point and every predicted-CDF
// breakpoint (both one-sided limits).
GofReport ks_report(const SpectrumSample& sample, const Measure& predicted);

// Two-sample KS distance between sorted samples.
double ks_two_sample(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace freegeo::rmt
