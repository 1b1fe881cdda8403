#include <doctest.h>

#include <cmath>
#include <random>

#include "freegeo/xform.hpp"
#include "helpers.hpp"

using namespace freegeo;

namespace {

// atoms (0, 0.3), (2, 0.2) plus a flat density of mass 0.5 on [0.5, 1.5]
Measure mixed_measure() {
    return Measure({{0.0, 0.3}, {2.0, 0.2}}, {0.5, 1.0, 1.5}, {0.5, 0.5, 0.5});
}

}  // namespace

TEST_SUITE_BEGIN("xform");

TEST_CASE("psi closed forms on atomic measures") {
    // psi_{delta_1}(x) = x/(1-x)
    CHECK(psi(point_mass(1.0), -1.0) == doctest::Approx(-0.5).epsilon(1e-14));
    // psi_{projection(alpha)}(x) = alpha x/(1-x)
    CHECK(psi(projection(0.5), -3.0) == doctest::Approx(-0.375).epsilon(1e-14));
}

TEST_CASE("psi of MP(1) at -1: frozen analytic value and independent quadrature") {
    Measure mp1 = marchenko_pastur(1.0);
    double value = psi(mp1, -1.0);
    // Solving chi(w) = x for the MP(1) S-transform gives
    // psi(-1) = (sqrt(5) - 3)/2 = -0.38196601125010515...
    const double frozen = -0.38196601125010515;
    CHECK(std::abs(value - frozen) <= 1e-8);
    // reference quadrature over the analytic density agrees with the frozen value
    double ref_analytic = testutil::mp_reference_integral(
        1.0, [](double t) { return -t / (1.0 + t); }, 1000000);
    CHECK(std::abs(ref_analytic - frozen) <= 1e-10);
    // 1e6-point trapezoid refinement of the tabulated density agrees with the
    // closed-form evaluator to 1e-8
    double ref_table = testutil::psi_trapezoid_reference(mp1, -1.0);
    CHECK(std::abs(value - ref_table) <= 1e-8);
}

TEST_CASE("psi evaluator matches the trapezoid reference across magnitudes of x") {
    Measure mp2 = marchenko_pastur(2.0, EvalConfig{.grid_size = 512});
    for (double x : {-1e-6, -1e-3, -0.5, -2.0, -100.0, -1e6}) {
        double a = psi(mp2, x);
        double b = testutil::psi_trapezoid_reference(mp2, x, 2000000);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("psi_prime matches finite differences") {
    Measure mp2 = marchenko_pastur(2.0, EvalConfig{.grid_size = 1024});
    for (double x : {-0.2, -1.0, -5.0}) {
        double h = 1e-6 * std::abs(x);
        double fd = (psi(mp2, x + h) - psi(mp2, x - h)) / (2.0 * h);
        CHECK(psi_prime(mp2, x) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("psi domain and range") {
    Measure mp1 = marchenko_pastur(1.0, EvalConfig{.grid_size = 512});
    CHECK_THROWS_AS(psi(mp1, 0.0), ValidationError);
    CHECK_THROWS_AS(psi(mp1, 1.0), ValidationError);
    Measure mix = mixed_measure();
    double beta = mix.atom_at_zero();
    for (double x : {-1e-4, -1.0, -1e4}) {
        double v = psi(mix, x);
        CHECK(v < 0.0);
        CHECK(v > beta - 1.0);
    }
}

TEST_CASE("psi is strictly increasing in x") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const Measure& m : {marchenko_pastur(1.0, EvalConfig{.grid_size = 512}),
                             marchenko_pastur(0.5, EvalConfig{.grid_size = 512}),
                             mixed_measure()}) {
        for (int k = 0; k < 1000; ++k) {
            // log-uniform magnitudes over many decades
            double x1 = -std::pow(10.0, -6.0 + 12.0 * unif(rng));
            double x2 = -std::pow(10.0, -6.0 + 12.0 * unif(rng));
            if (x1 > x2) std::swap(x1, x2);
            if (x1 == x2) continue;
            CHECK(psi(m, x1) < psi(m, x2));
        }
    }
}

TEST_CASE("chi inverts psi on atomic measures") {
    // inverse of z = x/(1-x) is x = z/(1+z)
    CHECK(chi(point_mass(1.0), -0.5) == doctest::Approx(-1.0).epsilon(1e-10));
    // psi_{projection(1/2)}(x) = x/(2(1-x)); psi(-3) = -3/8, psi(-1) = -1/4
    CHECK(chi(projection(0.5), -0.375) == doctest::Approx(-3.0).epsilon(1e-10));
    CHECK(chi(projection(0.5), -0.25) == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("chi domain errors") {
    Measure p = projection(0.5);  // beta = 1/2, domain (-1/2, 0)
    CHECK_THROWS_AS(chi(p, -0.75), ValidationError);
    CHECK_THROWS_AS(chi(p, -0.5), ValidationError);
    CHECK_THROWS_AS(chi(p, 0.0), ValidationError);
    CHECK_THROWS_AS(chi(p, 0.5), ValidationError);
    CHECK_THROWS_AS(chi(point_mass(0.0), -0.5), ValidationError);
}

TEST_CASE("round trip psi(chi(z)) = z within 1e-10") {
    std::vector<Measure> ms;
    for (double c : {0.5, 1.0, 2.0}) ms.push_back(marchenko_pastur(c));
    for (double al : {0.3, 0.7}) ms.push_back(projection(al));
    ms.push_back(mixed_measure());
    for (const Measure& m : ms) {
        double beta = m.atom_at_zero();
        for (int i = 1; i <= 50; ++i) {
            double z = (beta - 1.0) * static_cast<double>(i) / 51.0;
            double x = chi(m, z);
            CHECK(std::abs(psi(m, x) - z) <= 1e-10);
        }
    }
}

TEST_CASE("golden S-transforms: Marchenko-Pastur") {
    for (double c : {0.5, 1.0, 2.0}) {
        Measure m = marchenko_pastur(c);
        double beta = m.atom_at_zero();
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            double z = (beta - 1.0) * (0.1 + 0.8 * static_cast<double>(i) / 49.0);
            worst = std::max(worst, std::abs(s_transform(m, z) - 1.0 / (z + c)));
        }
        CHECK(worst <= 1e-6);
    }
    // reference points inside the common domain of the c >= 1 cases
    for (double c : {1.0, 2.0}) {
        Measure m = marchenko_pastur(c);
        for (double z : {-0.75, -0.5, -0.25})
            CHECK(std::abs(s_transform(m, z) - 1.0 / (z + c)) <= 1e-6);
    }
}

TEST_CASE("golden S-transforms: projection and point mass") {
    for (double al : {0.3, 0.5, 0.7}) {
        Measure m = projection(al);
        double beta = 1.0 - al;
        for (int i = 0; i < 50; ++i) {
            double z = (beta - 1.0) * (0.1 + 0.8 * static_cast<double>(i) / 49.0);
            CHECK(std::abs(s_transform(m, z) - (z + 1.0) / (z + al)) <= 1e-6);
        }
    }
    Measure d = point_mass(2.5);
    for (double z : {-0.9, -0.5, -0.1, -0.01})
        CHECK(s_transform(d, z) == doctest::Approx(1.0 / 2.5).epsilon(1e-10));
}

TEST_CASE("s_at_zero") {
    for (double c : {0.5, 1.0, 2.0})
        CHECK(std::abs(s_at_zero(marchenko_pastur(c)) - 1.0 / c) <= 1e-5);
    CHECK(s_at_zero(point_mass(2.0)) == 0.5);
    CHECK(s_at_zero(projection(0.25)) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(s_at_zero(point_mass(0.0)), ValidationError);
}

TEST_CASE("f_table closed forms: F = sqrt(t-1+c) for MP(c)") {
    for (double c : {0.5, 1.0, 2.0}) {
        FTable ft = f_table(marchenko_pastur(c));
        double worst = 0.0;
        for (std::size_t i = 0; i < ft.probabilities.size(); ++i) {
            double t = ft.probabilities[i];
            if (t - ft.beta < 1e-4) continue;  // open left endpoint region
            worst = std::max(worst, std::abs(ft.values[i] - std::sqrt(t - 1.0 + c)));
        }
        CHECK(worst <= 1e-5);
        CHECK(ft.probabilities.back() == 1.0);
        CHECK(std::abs(ft.values.back() * ft.values.back() - c) <= 1e-4);
    }
}

TEST_CASE("f_table closed form: F = sqrt((t-1+alpha)/t) for projections") {
    for (double al : {0.3, 0.7}) {
        FTable ft = f_table(projection(al));
        double worst = 0.0;
        for (std::size_t i = 0; i < ft.probabilities.size(); ++i) {
            double t = ft.probabilities[i];
            worst = std::max(worst,
                             std::abs(ft.values[i] - std::sqrt((t - 1.0 + al) / t)));
        }
        CHECK(worst <= 1e-5);
    }
}

TEST_CASE("f_table rejects point masses and is strictly monotone") {
    CHECK_THROWS_AS(f_table(point_mass(2.0)), ValidationError);
    FTable ft = f_table(mixed_measure());
    for (std::size_t i = 0; i + 1 < ft.values.size(); ++i) {
        CHECK(ft.values[i] > 0.0);
        CHECK(ft.values[i] < ft.values[i + 1]);
    }
    CHECK(std::abs(ft.values.back() * ft.values.back() - mixed_measure().moment(1.0)) <= 1e-4);
}

TEST_CASE("F(beta+eps)^2 approaches 1/m_{-1} from above as eps decreases") {
    Measure mp2 = marchenko_pastur(2.0);
    double target = 1.0 / mp2.moment(-1.0);
    double e1 = std::abs(std::pow(1.0 / std::sqrt(s_transform(mp2, -1.0 + 1e-4)), 2.0) - target);
    double e2 = std::abs(std::pow(1.0 / std::sqrt(s_transform(mp2, -1.0 + 1e-6)), 2.0) - target);
    CHECK(e2 < e1);
    CHECK(e2 <= 1e-4);
}

TEST_SUITE_END();
