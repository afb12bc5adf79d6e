#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sscl/operators.hpp"
#include "sscl/util.hpp"

using namespace sscl;
using geom::build_manifold;
using geom::Manifold;
using geom::ManifoldKind;
using geom::ManifoldParams;
using geom::ScalarField;

namespace {

constexpr double tau = 2.0 * std::numbers::pi;

Manifold circle(int n, double beta = 0.0, bool normalize = true) {
    ManifoldParams p;
    p.kind = ManifoldKind::circle;
    p.n1 = n;
    p.beta = beta;
    p.normalize = normalize;
    return build_manifold(p);
}

Manifold flat_torus(int n, bool normalize = true) {
    ManifoldParams p;
    p.kind = ManifoldKind::flat_torus;
    p.n1 = n;
    p.n2 = n;
    p.normalize = normalize;
    return build_manifold(p);
}

Manifold warped_torus(int n, double beta, bool normalize = true) {
    ManifoldParams p;
    p.kind = ManifoldKind::warped_torus;
    p.n1 = n;
    p.n2 = n;
    p.beta = beta;
    p.normalize = normalize;
    return build_manifold(p);
}

ScalarField random_field(const Manifold& man, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    ScalarField u(man.grid.node_count());
    for (double& v : u) v = dist(rng);
    return u;
}

double max_abs(const ScalarField& u) {
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("build_manifold: flat torus is volume-normalized with constant sqrt_det") {
    const Manifold man = flat_torus(32);
    CHECK(man.metric.total_volume == doctest::Approx(1.0).epsilon(1e-12));
    const double expect = 1.0 / (tau * tau);
    for (double sd : man.metric.sqrt_det) CHECK(sd == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("build_manifold: flat circle has constant metric") {
    const Manifold man = circle(64, 0.0);
    CHECK(man.metric.total_volume == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 1; i < man.grid.node_count(); ++i) {
        CHECK(man.metric.h11[i] == doctest::Approx(man.metric.h11[0]));
        CHECK(man.metric.sqrt_det[i] == doctest::Approx(man.metric.sqrt_det[0]));
    }
}

TEST_CASE("build_manifold: warped torus sqrt_det extrema follow 1 + beta cos") {
    const Manifold man = warped_torus(64, 0.3);
    double lo = INFINITY, hi = 0.0;
    for (double sd : man.metric.sqrt_det) {
        lo = std::min(lo, sd);
        hi = std::max(hi, sd);
    }
    // The min/max ratio is scale-invariant, so it survives normalization.
    CHECK(lo / hi == doctest::Approx(0.7 / 1.3).epsilon(1e-12));
}

TEST_CASE("build_manifold: inverse metric really inverts h") {
    const Manifold man = warped_torus(32, 0.4);
    for (int c = 0; c < man.grid.node_count(); ++c) {
        const auto& m = man.metric;
        CHECK(m.h11[c] * m.inv11[c] + m.h12[c] * m.inv12[c] ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(m.h12[c] * m.inv12[c] + m.h22[c] * m.inv22[c] ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("build_manifold: degenerate warp is rejected") {
    ManifoldParams p;
    p.kind = ManifoldKind::warped_torus;
    p.n1 = p.n2 = 16;
    p.beta = 1.0;
    CHECK_THROWS_AS(build_manifold(p), std::invalid_argument);
    p.beta = -1.2;
    CHECK_THROWS_AS(build_manifold(p), std::invalid_argument);
}

TEST_CASE("grid: sizes below 8 are rejected") {
    CHECK_THROWS_AS(geom::ChartGrid::make(1, 4, 1, tau, 0.0), std::invalid_argument);
}

TEST_CASE("grad_h: constant fields have zero gradient") {
    const Manifold man = warped_torus(16, 0.3);
    const ScalarField u(man.grid.node_count(), 3.7);
    const auto g = geom::grad_h(man, u);
    CHECK(max_abs(g.c1) == 0.0);
    CHECK(max_abs(g.c2) == 0.0);
}

TEST_CASE("grad_h: sin(x) on the raw flat circle converges at second order") {
    // Raw (unnormalized) metric so the analytic derivative is cos(x).
    double prev_err = 0.0;
    std::vector<int> sizes = {64, 128};
    std::vector<double> errs;
    for (int n : sizes) {
        const Manifold man = circle(n, 0.0, false);
        ScalarField u(n);
        for (int i = 0; i < n; ++i) u[i] = std::sin(man.grid.x1(i));
        const auto g = geom::grad_h(man, u);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err, std::abs(g.c1[i] - std::cos(man.grid.x1(i))));
        errs.push_back(err);
        prev_err = err;
    }
    (void)prev_err;
    const double order = std::log2(errs[0] / errs[1]);
    CHECK(order >= 1.9);
}

TEST_CASE("grad_h: warped-metric component matches a 4x finer oracle") {
    // u depends on x2 only; the second gradient component is h^22(x1) cos(x2).
    auto eval = [](int n) {
        const Manifold man = warped_torus(n, 0.3);
        ScalarField u(man.grid.node_count());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                u[man.grid.idx(i, j)] = std::sin(man.grid.x2(j));
        return std::make_pair(man, geom::grad_h(man, u));
    };
    auto [man_c, g_c] = eval(128);
    auto [man_f, g_f] = eval(512);
    double rel = 0.0;
    for (int j = 0; j < 128; ++j) {
        for (int i = 0; i < 128; ++i) {
            const double coarse = g_c.c2[man_c.grid.idx(i, j)];
            const double fine = g_f.c2[man_f.grid.idx(4 * i, 4 * j)];
            if (std::abs(fine) > 1e-3)
                rel = std::max(rel, std::abs(coarse - fine) / std::abs(fine));
        }
    }
    CHECK(rel <= 1e-3);
}

TEST_CASE("div_h: constant face field on the flat torus has zero divergence") {
    const Manifold man = flat_torus(16);
    geom::FaceField x;
    x.f1.assign(man.grid.node_count(), 0.8);
    x.f2.assign(man.grid.node_count(), -0.3);
    CHECK(max_abs(geom::div_h(man, x)) <= 1e-13);
}

TEST_CASE("div_h: the 1D divergence-free family c / sqrt_det") {
    const Manifold man = circle(128, 0.4);
    geom::FaceField x;
    x.f1.resize(man.grid.node_count());
    for (int c = 0; c < man.grid.node_count(); ++c)
        x.f1[c] = 2.5 / man.metric.f1_sqrt_det[c];
    CHECK(max_abs(geom::div_h(man, x)) <= 1e-13 * max_abs(x.f1));
}

TEST_CASE("laplace_beltrami: constants map to zero") {
    const Manifold man = warped_torus(16, 0.2);
    const ScalarField u(man.grid.node_count(), -1.4);
    CHECK(max_abs(geom::laplace_beltrami(man, u)) <= 1e-12);
}

TEST_CASE("laplace_beltrami: sin(kx) eigenfunction on the raw flat circle") {
    const int k = 3;
    std::vector<double> errs;
    for (int n : {128, 256}) {
        const Manifold man = circle(n, 0.0, false);
        ScalarField u(n);
        for (int i = 0; i < n; ++i) u[i] = std::sin(k * man.grid.x1(i));
        const ScalarField lap = geom::laplace_beltrami(man, u);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err, std::abs(lap[i] + k * k * u[i]));
        errs.push_back(err);
    }
    CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
}

TEST_CASE("laplace_beltrami: manufactured solution on the warped metric") {
    // Raw metric h = diag(1, w^2), w = 1 + beta cos(x1), u = sin(x1) cos(x2):
    //   lap u = [(w' cos x1 - w sin x1)/w - sin(x1)/w^2] cos x2,  w' = -beta sin x1.
    const double beta = 0.35;
    auto err_at = [&](int n) {
        geom::ManifoldParams p;
        p.kind = ManifoldKind::warped_torus;
        p.n1 = p.n2 = n;
        p.beta = beta;
        p.normalize = false;
        const Manifold man = build_manifold(p);
        ScalarField u(man.grid.node_count());
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                u[man.grid.idx(i, j)] = std::sin(man.grid.x1(i)) * std::cos(man.grid.x2(j));
        const ScalarField lap = geom::laplace_beltrami(man, u);
        double err = 0.0;
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double x1 = man.grid.x1(i), x2 = man.grid.x2(j);
                const double w = 1.0 + beta * std::cos(x1);
                const double wp = -beta * std::sin(x1);
                const double exact =
                    ((wp * std::cos(x1) - w * std::sin(x1)) / w -
                     std::sin(x1) / (w * w)) *
                    std::cos(x2);
                err = std::max(err, std::abs(lap[man.grid.idx(i, j)] - exact));
            }
        }
        return err;
    };
    const double e32 = err_at(32);
    const double e64 = err_at(64);
    CHECK(std::log2(e32 / e64) >= 1.9);
}

TEST_CASE("laplace_beltrami: integral vanishes for random fields") {
    const Manifold man = warped_torus(24, 0.35);
    const ScalarField u = random_field(man, 11);
    const ScalarField lap = geom::laplace_beltrami(man, u);
    CHECK(std::abs(geom::integrate(man, lap)) <= 1e-12 * max_abs(lap));
}

TEST_CASE("laplace_beltrami: self-adjoint and negative semidefinite") {
    const Manifold man = warped_torus(20, 0.3);
    const ScalarField u = random_field(man, 5);
    const ScalarField v = random_field(man, 6);
    const ScalarField lu = geom::laplace_beltrami(man, u);
    const ScalarField lv = geom::laplace_beltrami(man, v);
    const double a = geom::inner(man, lu, v);
    const double b = geom::inner(man, u, lv);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
    CHECK(geom::inner(man, lu, u) <= 1e-14);
    // <-lap u, u> equals the face-quadrature gradient energy exactly.
    CHECK(-geom::inner(man, lu, u) ==
          doctest::Approx(geom::grad_energy(man, u)).epsilon(1e-12));
}

TEST_CASE("integrate: normalized volume, odd symmetry, linearity") {
    const Manifold man = circle(64, 0.25);
    ScalarField one(man.grid.node_count(), 1.0);
    CHECK(geom::integrate(man, one) == doctest::Approx(1.0).epsilon(1e-12));

    const Manifold flat = circle(64, 0.0);
    ScalarField s(flat.grid.node_count());
    for (int i = 0; i < flat.grid.n1; ++i) s[i] = std::sin(flat.grid.x1(i));
    CHECK(std::abs(geom::integrate(flat, s)) <= 1e-12);

    const ScalarField u1 = random_field(man, 1);
    const ScalarField u2 = random_field(man, 2);
    ScalarField sum(u1.size());
    for (size_t i = 0; i < u1.size(); ++i) sum[i] = u1[i] + u2[i];
    CHECK(geom::integrate(man, sum) ==
          doctest::Approx(geom::integrate(man, u1) + geom::integrate(man, u2))
              .epsilon(1e-12));
}

TEST_CASE("discrete divergence theorem holds for random face fields") {
    const Manifold man = warped_torus(16, 0.45);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    geom::FaceField x;
    x.f1.resize(man.grid.node_count());
    x.f2.resize(man.grid.node_count());
    for (int c = 0; c < man.grid.node_count(); ++c) {
        x.f1[c] = dist(rng);
        x.f2[c] = dist(rng);
    }
    const ScalarField d = geom::div_h(man, x);
    CHECK(std::abs(geom::integrate(man, d)) <= 1e-12 * std::max(1.0, max_abs(d)));
}

TEST_CASE("discrete integration by parts: <v, div X> matches the face pairing") {
    const Manifold man = warped_torus(16, 0.3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    geom::FaceField x;
    x.f1.resize(man.grid.node_count());
    x.f2.resize(man.grid.node_count());
    for (int c = 0; c < man.grid.node_count(); ++c) {
        x.f1[c] = dist(rng);
        x.f2[c] = dist(rng);
    }
    const ScalarField v = random_field(man, 12);

    const double lhs = geom::inner(man, v, geom::div_h(man, x));
    // Face pairing: -sum_faces |h|^{1/2} X . (forward difference of v).
    const geom::ChartGrid& g = man.grid;
    KahanSum rhs;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            rhs.add(-man.metric.f1_sqrt_det[c] * x.f1[c] *
                    (v[g.idx(i + 1, j)] - v[c]) / g.d1 * g.cell_area());
            rhs.add(-man.metric.f2_sqrt_det[c] * x.f2[c] *
                    (v[g.idx(i, j + 1)] - v[c]) / g.d2 * g.cell_area());
        }
    }
    CHECK(lhs == doctest::Approx(rhs.value()).epsilon(1e-12));
}

TEST_CASE("grad_energy_nodal sums to grad_energy") {
    const Manifold man = warped_torus(16, 0.3);
    const ScalarField u = random_field(man, 21);
    ScalarField nodal;
    geom::grad_energy_nodal(man, u, nodal);
    KahanSum s;
    for (double v : nodal) s.add(v);
    CHECK(s.value() == doctest::Approx(geom::grad_energy(man, u)).epsilon(1e-12));
    for (double v : nodal) CHECK(v >= 0.0);
}
