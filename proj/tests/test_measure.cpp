#include <doctest.h>

#include <cmath>
#include <random>

#include "freegeo/gmap.hpp"
#include "freegeo/measure.hpp"
#include "helpers.hpp"

using namespace freegeo;

TEST_SUITE_BEGIN("measure");

TEST_CASE("named families construct valid measures") {
    CHECK(point_mass(1.0).validate().empty());
    CHECK(point_mass(0.0).validate().empty());
    CHECK(projection(0.5).validate().empty());
    CHECK(quarter_circle_squared().validate().empty());
    for (double c : {0.5, 1.0, 2.0}) CHECK(marchenko_pastur(c).validate().empty());
}

TEST_CASE("family parameter validation") {
    CHECK_THROWS_AS(projection(0.0), ValidationError);
    CHECK_THROWS_AS(projection(1.0), ValidationError);
    CHECK_THROWS_AS(projection(-0.2), ValidationError);
    CHECK_THROWS_AS(marchenko_pastur(0.0), ValidationError);
    CHECK_THROWS_AS(marchenko_pastur(-1.0), ValidationError);
    CHECK_THROWS_AS(point_mass(-1.0), ValidationError);
    CHECK_THROWS_AS(make_named(family_from_string("no_such"), 1.0), ValidationError);
}

TEST_CASE("projection(0.5) has atoms {(0,1/2),(1,1/2)}") {
    Measure m = projection(0.5);
    REQUIRE(m.atoms().size() == 2);
    CHECK(m.atoms()[0].location == 0.0);
    CHECK(m.atoms()[0].mass == 0.5);
    CHECK(m.atoms()[1].location == 1.0);
    CHECK(m.atoms()[1].mass == 0.5);
    CHECK(!m.has_density());
}

TEST_CASE("point_mass(1) is the Dirac mass at 1") {
    Measure m = point_mass(1.0);
    REQUIRE(m.atoms().size() == 1);
    CHECK(m.atoms()[0].location == 1.0);
    CHECK(m.atoms()[0].mass == 1.0);
    CHECK(m.is_point_mass());
}

TEST_CASE("quarter_circle_squared equals marchenko_pastur(1)") {
    Measure q = quarter_circle_squared();
    Measure m = marchenko_pastur(1.0);
    REQUIRE(q.grid().size() == m.grid().size());
    CHECK(q.atoms().empty());
    CHECK(testutil::sup_cdf_distance(q, m) == 0.0);
}

TEST_CASE("marchenko_pastur mass and mean against analytic quadrature") {
    auto one = [](double) { return 1.0; };
    auto ident = [](double t) { return t; };
    for (double c : {0.5, 1.0, 2.0}) {
        Measure m = marchenko_pastur(c);
        CHECK(std::abs(m.total_mass() - 1.0) <= 1e-6);
        // reference oracle: the density integrates to min(c,1) and the mean
        // (atom included) is c
        double ref_mass = testutil::mp_reference_integral(c, one);
        double ref_mean = testutil::mp_reference_integral(c, ident);
        CHECK(std::abs(ref_mass - std::min(c, 1.0)) <= 1e-9);
        CHECK(std::abs(ref_mean - c) <= 1e-9);
        CHECK(std::abs(m.moment(1.0) - c) <= 1e-4);
        CHECK(std::abs(m.moment(1.0) - ref_mean) <= 1e-4);
    }
}

TEST_CASE("moments of atomic measures") {
    CHECK(point_mass(4.0).moment(1.0) == 4.0);
    CHECK(projection(0.7).moment(2.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(point_mass(4.0).moment(0.0) == 1.0);
}

TEST_CASE("moment(., 0) is 1 for every valid measure") {
    for (double c : {0.5, 1.0, 2.0})
        CHECK(std::abs(marchenko_pastur(c).moment(0.0) - 1.0) <= 1e-6);
    CHECK(std::abs(projection(0.3).moment(0.0) - 1.0) <= 1e-6);
    CHECK(std::abs(point_mass(2.0).moment(0.0) - 1.0) <= 1e-6);
}

TEST_CASE("negative moments") {
    // atom at 0 makes any negative moment infinite
    CHECK_THROWS_AS(projection(0.5).moment(-1.0), InfiniteMomentError);
    CHECK_THROWS_AS(marchenko_pastur(0.5).moment(-1.0), InfiniteMomentError);
    // MP(1) density behaves like t^{-1/2} at 0: inverse moment diverges
    CHECK_THROWS_AS(marchenko_pastur(1.0).moment(-1.0), InfiniteMomentError);
    // MP(2) is supported away from 0; E[1/t] = 1/(c-1) = 1
    double ref = testutil::mp_reference_integral(2.0, [](double t) { return 1.0 / t; });
    CHECK(std::abs(ref - 1.0) <= 1e-9);
    CHECK(std::abs(marchenko_pastur(2.0).moment(-1.0) - ref) <= 1e-3);
}

TEST_CASE("cdf basics") {
    Measure p = projection(0.5);
    CHECK(p.cdf(0.5) == 0.5);
    CHECK(p.cdf(0.0) == 0.5);  // right-continuous at the atom
    CHECK(p.cdf(-0.1) == 0.0);
    CHECK(p.cdf(1.0) == 1.0);
    CHECK(p.cdf_left(0.0) == 0.0);
    CHECK(point_mass(2.0).cdf(3.0) == 1.0);
    CHECK(point_mass(2.0).cdf(1.999) == 0.0);
}

TEST_CASE("quantile basics and domain errors") {
    Measure p = projection(0.5);
    CHECK_THROWS_AS(p.quantile(0.0), ValidationError);
    CHECK_THROWS_AS(p.quantile(1.0), ValidationError);
    CHECK_THROWS_AS(p.quantile(-0.5), ValidationError);
    CHECK(p.quantile(0.25) == 0.0);  // exactly the atom location
    CHECK(p.quantile(0.75) == 1.0);
    // CDF of G(MP(1)) is t^2 on (0,1], so the quartile is 1/2
    Measure nu = gmap_closed_form(Family::marchenko_pastur, 1.0);
    CHECK(nu.quantile(0.25) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("cdf/quantile consistency") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(1e-9, 1.0 - 1e-9);
    for (const Measure& m : {marchenko_pastur(1.0), marchenko_pastur(2.0),
                             gmap_closed_form(Family::marchenko_pastur, 1.0)}) {
        double max_cell = 0.0;
        for (std::size_t i = 0; i + 1 < m.grid().size(); ++i)
            max_cell = std::max(max_cell, 0.5 * (m.density()[i] + m.density()[i + 1]) *
                                              (m.grid()[i + 1] - m.grid()[i]));
        for (int k = 0; k < 1000; ++k) {
            double q = unif(rng);
            CHECK(std::abs(m.cdf(m.quantile(q)) - q) <= max_cell + 1e-12);
        }
    }
    // generalized-inverse relations hold with atoms present
    Measure mp05 = marchenko_pastur(0.5);
    for (int k = 0; k < 1000; ++k) {
        double q = unif(rng);
        CHECK(mp05.cdf(mp05.quantile(q)) >= q - 1e-12);
        double x = mp05.min_support() + unif(rng) * (mp05.max_support() - mp05.min_support());
        CHECK(mp05.quantile(std::min(1.0 - 1e-12, std::max(1e-12, mp05.cdf(x)))) <= x + 1e-9);
    }
}

TEST_CASE("validate reports violations") {
    // density scaled by 2: mass breaks
    Measure m = marchenko_pastur(2.0);
    std::vector<double> doubled = m.density();
    for (double& f : doubled) f *= 2.0;
    Measure bad(m.atoms(), m.grid(), doubled);
    auto v = bad.validate();
    REQUIRE(!v.empty());
    CHECK(v.front().find("mass") != std::string::npos);

    // atom at -1: negative support
    Measure neg({{-1.0, 1.0}}, {}, {});
    auto v2 = neg.validate();
    REQUIRE(!v2.empty());
    bool found = false;
    for (const auto& s : v2) found = found || s.find("negative support") != std::string::npos;
    CHECK(found);

    // duplicate atoms
    Measure dup({{1.0, 0.5}, {1.0, 0.5}}, {}, {});
    bool dup_found = false;
    for (const auto& s : dup.validate())
        dup_found = dup_found || s.find("duplicate") != std::string::npos;
    CHECK(dup_found);

    // non-increasing grid
    Measure grid_bad({}, {0.0, 1.0, 1.0, 2.0}, {0.5, 0.5, 0.5, 0.5});
    bool mono_found = false;
    for (const auto& s : grid_bad.validate())
        mono_found = mono_found || s.find("strictly increasing") != std::string::npos;
    CHECK(mono_found);

    // structural misuse throws at construction
    CHECK_THROWS_AS(Measure({}, {0.0, 1.0}, {1.0}), ValidationError);
    CHECK_THROWS_AS(Measure({}, {1.0}, {1.0}), ValidationError);
}

TEST_CASE("density_at interpolates and vanishes outside") {
    Measure m({}, {0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(m.density_at(-0.5) == 0.0);
    CHECK(m.density_at(2.5) == 0.0);
    CHECK(m.density_at(0.5) == doctest::Approx(0.5));
    CHECK(m.density_at(1.0) == 1.0);
    CHECK(std::abs(m.total_mass() - 1.0) <= 1e-12);
}

TEST_CASE("quantile across zero-density plateaus and detached atoms") {
    // two bumps with a flat gap: the generalized inverse lands on the left
    // edge of the plateau
    Measure two({}, {0.0, 1.0, 1.5, 2.5, 3.5}, {0.4, 0.4, 0.0, 0.0, 1.0});
    CHECK(std::abs(two.total_mass() - 1.0) <= 1e-12);
    CHECK(two.quantile(0.5) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(two.cdf(2.0) == doctest::Approx(0.5));
    CHECK(two.cdf(2.5) == doctest::Approx(0.5));
    CHECK(two.quantile(0.5 + 1e-9) > 2.5);

    // atom sitting above the density support
    Measure mix({{2.0, 0.5}}, {0.0, 1.0}, {0.5, 0.5});
    CHECK(mix.cdf(1.5) == doctest::Approx(0.5));
    CHECK(mix.cdf(2.0) == doctest::Approx(1.0));
    CHECK(mix.quantile(0.75) == 2.0);
    CHECK(mix.quantile(0.25) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("inverse_moment_diverges detection") {
    CHECK(inverse_moment_diverges(projection(0.5)));        // atom at 0
    CHECK(inverse_moment_diverges(marchenko_pastur(1.0)));  // density positive at 0
    CHECK(!inverse_moment_diverges(marchenko_pastur(2.0)));
    CHECK(!inverse_moment_diverges(point_mass(3.0)));
    // density grid touching 0 with f(0) = 0 still has finite inverse moment
    Measure tri({}, {0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK(!inverse_moment_diverges(tri));
    CHECK(tri.moment(-1.0) > 0.0);
}

TEST_SUITE_END();
