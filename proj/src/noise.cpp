#include "sscl/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sscl::noise {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// (0,1] from the high 53 bits.
double to_unit(std::uint64_t z) { return (static_cast<double>(z >> 11) + 1.0) * 0x1.0p-53; }

ScalarField sigma_constant(const Manifold& man) {
    return ScalarField(man.grid.node_count(), 1.0);
}

ScalarField sigma_harmonic(const Manifold& man, int k1, int k2, double phase) {
    const geom::ChartGrid& g = man.grid;
    ScalarField s(g.node_count());
    for (int j = 0; j < g.n2; ++j)
        for (int i = 0; i < g.n1; ++i)
            s[g.idx(i, j)] = std::sin(k1 * g.x1(i) + k2 * g.x2(j) + phase);
    return s;
}

// sup |grad sigma|_h for the harmonic factor sin(k1 x1 + k2 x2 + phase).
double harmonic_lipschitz(const Manifold& man, int k1, int k2) {
    const geom::MetricField& m = man.metric;
    double worst = 0.0;
    for (int c = 0; c < man.grid.node_count(); ++c) {
        double q = m.inv11[c] * k1 * k1;
        if (man.grid.dim == 2)
            q += 2.0 * m.inv12[c] * k1 * k2 + m.inv22[c] * k2 * k2;
        worst = std::max(worst, std::sqrt(q));
    }
    return worst;
}

double decay(int k) { return std::pow(2.0, -(k - 1)); }  // c_k / c_1

}  // namespace

NoiseModel make_noise_none(const Manifold& man, std::uint64_t seed) {
    NoiseModel nm;
    nm.seed = seed;
    NoiseMode mode;
    mode.c = 0.0;
    mode.sigma = sigma_constant(man);
    mode.phi = [](double) { return 1.0; };
    mode.desc = "zero";
    nm.modes.push_back(std::move(mode));
    nm.d1 = 0.0;
    nm.d2 = 0.0;
    return nm;
}

NoiseModel make_noise_additive(const Manifold& man, int k_modes, double amp,
                               std::uint64_t seed) {
    if (k_modes < 1) throw std::invalid_argument("noise: K must be >= 1");
    NoiseModel nm;
    nm.seed = seed;
    double d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= k_modes; ++k) {
        NoiseMode mode;
        mode.c = amp * decay(k);
        if (k == 1) {
            mode.sigma = sigma_constant(man);
            mode.desc = "additive constant";
        } else {
            const int freq = k - 1;
            mode.sigma = sigma_harmonic(man, freq, man.grid.dim == 2 ? 1 : 0, 0.3 * k);
            mode.desc = "additive harmonic";
            d2 += mode.c * mode.c *
                  std::pow(harmonic_lipschitz(man, freq, man.grid.dim == 2 ? 1 : 0), 2);
        }
        mode.phi = [](double) { return 1.0; };
        d1 += mode.c * mode.c;  // sup |sigma| = 1 for both families
        nm.modes.push_back(std::move(mode));
    }
    nm.d1 = d1;
    nm.d2 = d2;
    return nm;
}

NoiseModel make_noise_linear(const Manifold& man, int k_modes, double amp,
                             std::uint64_t seed) {
    if (k_modes < 1) throw std::invalid_argument("noise: K must be >= 1");
    NoiseModel nm;
    nm.seed = seed;
    double csq = 0.0;
    for (int k = 1; k <= k_modes; ++k) {
        NoiseMode mode;
        mode.c = amp * decay(k);
        mode.sigma = sigma_constant(man);  // x-constant: keeps the Lipschitz bound uniform
        mode.phi = [](double xi) { return xi; };
        mode.desc = "multiplicative linear";
        csq += mode.c * mode.c;
        nm.modes.push_back(std::move(mode));
    }
    nm.d1 = csq;
    nm.d2 = csq;
    return nm;
}

NoiseModel make_noise_mixed(const Manifold& man, int k_modes, double amp,
                            std::uint64_t seed) {
    if (k_modes < 2) throw std::invalid_argument("noise: mixed family needs K >= 2");
    NoiseModel nm;
    nm.seed = seed;
    double d1 = 0.0, d2 = 0.0;
    for (int k = 1; k <= k_modes; ++k) {
        NoiseMode mode;
        mode.c = amp * decay(k);
        if (k % 2 == 1) {
            mode.sigma = sigma_constant(man);
            mode.phi = [](double xi) { return xi; };
            mode.desc = "multiplicative linear";
            d1 += mode.c * mode.c;
            d2 += mode.c * mode.c;
        } else {
            const int freq = k / 2;
            mode.sigma = sigma_harmonic(man, freq, man.grid.dim == 2 ? 1 : 0, 0.0);
            mode.phi = [](double) { return 1.0; };
            mode.desc = "additive harmonic";
            d1 += mode.c * mode.c;
            d2 += mode.c * mode.c *
                  std::pow(harmonic_lipschitz(man, freq, man.grid.dim == 2 ? 1 : 0), 2);
        }
        nm.modes.push_back(std::move(mode));
    }
    nm.d1 = d1;
    nm.d2 = d2;
    return nm;
}

NoiseModel make_noise_by_name(const Manifold& man, const std::string& kind, int k_modes,
                              double amp, std::uint64_t seed) {
    if (kind == "none") return make_noise_none(man, seed);
    if (kind == "additive") return make_noise_additive(man, k_modes, amp, seed);
    if (kind == "linear") return make_noise_linear(man, k_modes, amp, seed);
    if (kind == "mixed") return make_noise_mixed(man, k_modes, amp, seed);
    throw std::invalid_argument("noise: unknown kind '" + kind + "'");
}

double g_eval(const NoiseModel& nm, int k, int node, double xi) {
    if (k < 1 || k > nm.k_count())
        throw std::out_of_range("noise: mode index out of range");
    const NoiseMode& m = nm.modes[k - 1];
    return m.c * m.sigma[node] * m.phi(xi);
}

double G2_eval(const NoiseModel& nm, int node, double xi) {
    double s = 0.0;
    for (const NoiseMode& m : nm.modes) {
        const double g = m.c * m.sigma[node] * m.phi(xi);
        s += g * g;
    }
    return s;
}

double gaussian_draw(std::uint64_t seed, std::uint64_t path_id, std::int64_t step, int k) {
    std::uint64_t h = splitmix64(seed ^ 0x5353434cull);  // "SSCL"
    h = splitmix64(h ^ path_id);
    h = splitmix64(h ^ static_cast<std::uint64_t>(step));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k));
    const double u1 = to_unit(h);
    const double u2 = to_unit(splitmix64(h));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseIncrementBlock sample_increments(const NoiseModel& nm, std::uint64_t path_id,
                                      std::int64_t step, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("noise: dt must be > 0");
    NoiseIncrementBlock b;
    b.path_id = path_id;
    b.step = step;
    b.dt = dt;
    b.db.resize(nm.k_count());
    const double sq = std::sqrt(dt);
    for (int k = 1; k <= nm.k_count(); ++k)
        b.db[k - 1] = sq * gaussian_draw(nm.seed, path_id, step, k);
    return b;
}

namespace {

// Coordinate-path metric length between axis-aligned nodes, taking the
// shorter wrap direction. Exact for the supported product metrics.
double axis_distance(const Manifold& man, int i0, int j0, int axis, int hops) {
    const geom::ChartGrid& g = man.grid;
    const geom::MetricField& m = man.metric;
    auto leg = [&](int dir) {
        double len = 0.0;
        int i = i0, j = j0;
        const int n = axis == 0 ? g.n1 : g.n2;
        const int count = dir > 0 ? hops : n - hops;
        for (int s = 0; s < count; ++s) {
            const int c0 = g.idx(i, j);
            int i1 = i, j1 = j;
            if (axis == 0)
                i1 += dir > 0 ? 1 : -1;
            else
                j1 += dir > 0 ? 1 : -1;
            const int c1 = g.idx(i1, j1);
            const double haa = axis == 0 ? 0.5 * (m.h11[c0] + m.h11[c1])
                                         : 0.5 * (m.h22[c0] + m.h22[c1]);
            len += std::sqrt(haa) * (axis == 0 ? g.d1 : g.d2);
            i = i1;
            j = j1;
        }
        return len;
    };
    return std::min(leg(+1), leg(-1));
}

}  // namespace

NoiseReport verify_conditions(const NoiseModel& nm, const Manifold& man, double xi_lo,
                              double xi_hi, int xi_samples) {
    NoiseReport rep;
    const geom::ChartGrid& g = man.grid;

    std::vector<double> xis(xi_samples);
    for (int s = 0; s < xi_samples; ++s)
        xis[s] = xi_lo + (xi_hi - xi_lo) * s / (xi_samples - 1);

    // D1 and the growth of G^2 at every node.
    for (int c = 0; c < g.node_count(); ++c)
        for (double xi : xis)
            rep.d1_hat = std::max(rep.d1_hat, G2_eval(nm, c, xi) / (1.0 + xi * xi));

    // D2 + lemma bound on axis-aligned node pairs and xi pairs. Node pairs
    // stride through the grid to keep the sample dense but affordable.
    const int stride = std::max(1, g.node_count() / 512);
    const int hop_count = 4;
    const int xi_stride = std::max(1, xi_samples / 16);
    for (int j0 = 0; j0 < g.n2; ++j0) {
        for (int i0 = 0; i0 < g.n1; ++i0) {
            const int c0 = g.idx(i0, j0);
            if (c0 % stride != 0) continue;
            for (int axis = 0; axis < g.dim; ++axis) {
                for (int hops = 0; hops <= hop_count; ++hops) {
                    const int c1 = axis == 0 ? g.idx(i0 + hops, j0) : g.idx(i0, j0 + hops);
                    const double d = hops == 0 ? 0.0 : axis_distance(man, i0, j0, axis, hops);
                    for (size_t s0 = 0; s0 < xis.size(); s0 += xi_stride) {
                        for (size_t s1 = s0; s1 < xis.size(); s1 += xi_stride) {
                            const double xi = xis[s0], zeta = xis[s1];
                            const double denom = d * d + (xi - zeta) * (xi - zeta);
                            double sum_dg2 = 0.0;
                            for (int k = 1; k <= nm.k_count(); ++k) {
                                const double dg =
                                    g_eval(nm, k, c0, xi) - g_eval(nm, k, c1, zeta);
                                sum_dg2 += dg * dg;
                            }
                            if (denom > 0.0)
                                rep.d2_hat = std::max(rep.d2_hat, sum_dg2 / denom);
                            else if (sum_dg2 > 0.0)
                                rep.d2_hat = INFINITY;

                            const double dG2 =
                                std::abs(G2_eval(nm, c0, xi) - G2_eval(nm, c1, zeta));
                            const double bound =
                                std::sqrt(nm.d1 * nm.d2) *
                                (std::sqrt(1.0 + xi * xi) + std::sqrt(1.0 + zeta * zeta)) *
                                std::sqrt(denom);
                            if (bound > 0.0)
                                rep.lemma_ratio = std::max(rep.lemma_ratio, dG2 / bound);
                            else if (dG2 > 1e-14)
                                rep.lemma_ratio = INFINITY;
                        }
                    }
                }
            }
        }
    }

    const double slack = 1.0 + 1e-9;
    rep.pass_d1 = rep.d1_hat <= nm.d1 * slack;
    rep.pass_d2 = rep.d2_hat <= nm.d2 * slack;
    rep.pass_lemma = rep.lemma_ratio <= slack;
    // A zero-noise model trivially satisfies everything.
    if (nm.d1 == 0.0) rep.pass_d1 = rep.d1_hat == 0.0;
    if (nm.d2 == 0.0) rep.pass_d2 = rep.d2_hat == 0.0;
    return rep;
}

}  // namespace sscl::noise
