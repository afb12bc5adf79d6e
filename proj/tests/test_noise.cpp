#include <doctest.h>

#include <cmath>

#include "sscl/noise.hpp"

using namespace sscl;
using geom::Manifold;
using noise::NoiseModel;

namespace {

Manifold circle(int n, double beta = 0.0) {
    geom::ManifoldParams p;
    p.kind = geom::ManifoldKind::circle;
    p.n1 = n;
    p.beta = beta;
    return geom::build_manifold(p);
}

Manifold torus(int n, double beta) {
    geom::ManifoldParams p;
    p.kind = geom::ManifoldKind::warped_torus;
    p.n1 = p.n2 = n;
    p.beta = beta;
    return geom::build_manifold(p);
}

}  // namespace

TEST_CASE("G2_eval: single additive mode") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_additive(man, 1, 0.7, 1);
    CHECK(noise::G2_eval(nm, 3, 12.5) == doctest::Approx(0.49).epsilon(1e-14));
    CHECK(nm.d1 == doctest::Approx(0.49).epsilon(1e-14));
    CHECK(nm.d2 == 0.0);
}

TEST_CASE("G2_eval: linear mode has d1 = c^2") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_linear(man, 1, 1.0, 1);
    for (double xi : {-2.0, 0.0, 3.5})
        CHECK(noise::G2_eval(nm, 0, xi) == doctest::Approx(xi * xi).epsilon(1e-14));
    CHECK(noise::G2_eval(nm, 0, 2.0) <= nm.d1 * (1.0 + 4.0));
}

TEST_CASE("G2_eval: geometric mode decay matches the closed form") {
    const Manifold man = circle(16);
    // Linear family: every sigma is constant, so G^2 is exactly geometric,
    // sum c_k^2 = (1 - 4^-K)/(3/4).
    for (int K : {2, 4, 8}) {
        NoiseModel nm = noise::make_noise_linear(man, K, 1.0, 1);
        const double xi = 1.0;
        const double expected = (1.0 - std::pow(0.25, K)) / 0.75 * xi * xi;
        CHECK(noise::G2_eval(nm, 0, xi) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("G2_eval: truncation is monotone in K") {
    const Manifold man = circle(16);
    NoiseModel small = noise::make_noise_mixed(man, 3, 0.5, 1);
    NoiseModel big = noise::make_noise_mixed(man, 6, 0.5, 1);
    for (double xi : {-1.0, 0.3, 2.0})
        for (int c : {0, 5, 11})
            CHECK(noise::G2_eval(big, c, xi) >= noise::G2_eval(small, c, xi) - 1e-15);
}

TEST_CASE("g_eval: mode index bounds") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_additive(man, 2, 1.0, 1);
    CHECK_THROWS_AS(noise::g_eval(nm, 0, 0, 0.0), std::out_of_range);
    CHECK_THROWS_AS(noise::g_eval(nm, 3, 0, 0.0), std::out_of_range);
}

TEST_CASE("verify_conditions: built-in families pass their declared constants") {
    const Manifold man = torus(16, 0.3);
    for (const char* kind : {"additive", "linear", "mixed"}) {
        NoiseModel nm = noise::make_noise_by_name(man, kind, 4, 0.5, 7);
        const noise::NoiseReport rep = noise::verify_conditions(nm, man, -4.0, 4.0, 33);
        CHECK(rep.pass());
    }
}

TEST_CASE("verify_conditions: constant g has zero difference ratios") {
    const Manifold man = circle(32);
    NoiseModel nm = noise::make_noise_additive(man, 1, 0.9, 3);
    const noise::NoiseReport rep = noise::verify_conditions(nm, man, -2.0, 2.0, 17);
    CHECK(rep.d2_hat == 0.0);
    CHECK(rep.lemma_ratio <= 1.0);
}

TEST_CASE("verify_conditions: x-independent linear modes realize d2 = sum c_k^2") {
    const Manifold man = circle(32);
    NoiseModel nm = noise::make_noise_linear(man, 3, 1.0, 3);
    const noise::NoiseReport rep = noise::verify_conditions(nm, man, -3.0, 3.0, 33);
    const double csq = 1.0 + 0.25 + 0.0625;
    CHECK(rep.d2_hat == doctest::Approx(csq).epsilon(1e-9));
    CHECK(rep.pass_d2);
}

TEST_CASE("verify_conditions: superlinear phi breaks the declared d1") {
    const Manifold man = circle(32);
    NoiseModel nm = noise::make_noise_none(man, 3);
    nm.modes[0].c = 1.0;
    nm.modes[0].phi = [](double xi) { return xi * xi; };
    nm.d1 = 1.0;
    nm.d2 = 1.0;
    const noise::NoiseReport rep = noise::verify_conditions(nm, man, -5.0, 5.0, 33);
    CHECK_FALSE(rep.pass_d1);
}

TEST_CASE("verify_conditions: lemma bound for g(xi) = xi on samples") {
    // |xi^2 - zeta^2| <= (sqrt(1+xi^2) + sqrt(1+zeta^2)) |xi - zeta|.
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_linear(man, 1, 1.0, 1);
    const noise::NoiseReport rep = noise::verify_conditions(nm, man, -6.0, 6.0, 49);
    CHECK(rep.lemma_ratio <= 1.0 + 1e-12);
    CHECK(rep.pass_lemma);
}

TEST_CASE("sample_increments: identical keys reproduce identical blocks") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_linear(man, 4, 1.0, 42);
    const auto a = noise::sample_increments(nm, 7, 1234, 0.01);
    const auto b = noise::sample_increments(nm, 7, 1234, 0.01);
    REQUIRE(a.db.size() == b.db.size());
    for (size_t k = 0; k < a.db.size(); ++k) CHECK(a.db[k] == b.db[k]);

    // Different key components give different draws.
    const auto c = noise::sample_increments(nm, 8, 1234, 0.01);
    const auto d = noise::sample_increments(nm, 7, 1235, 0.01);
    CHECK(a.db[0] != c.db[0]);
    CHECK(a.db[0] != d.db[0]);
}

TEST_CASE("sample_increments: CLT bounds on mean and variance") {
    const Manifold man = circle(16);
    const double dt = 0.02;
    NoiseModel nm = noise::make_noise_linear(man, 1, 1.0, 2024);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = noise::sample_increments(nm, 0, i, dt).db[0];
        sum += x;
        sumsq += x * x;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / n));
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("sample_increments: distinct modes are uncorrelated") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_linear(man, 2, 1.0, 9);
    const int n = 100000;
    double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
    for (int i = 0; i < n; ++i) {
        const auto b = noise::sample_increments(nm, 3, i, 1.0);
        s1 += b.db[0];
        s2 += b.db[1];
        s11 += b.db[0] * b.db[0];
        s22 += b.db[1] * b.db[1];
        s12 += b.db[0] * b.db[1];
    }
    const double corr = (s12 / n - s1 / n * s2 / n) /
                        std::sqrt((s11 / n - s1 / n * s1 / n) * (s22 / n - s2 / n * s2 / n));
    CHECK(std::abs(corr) <= 0.02);
}

TEST_CASE("sample_increments: dt must be positive") {
    const Manifold man = circle(16);
    NoiseModel nm = noise::make_noise_linear(man, 1, 1.0, 5);
    CHECK_THROWS_AS(noise::sample_increments(nm, 0, 0, 0.0), std::invalid_argument);
}
