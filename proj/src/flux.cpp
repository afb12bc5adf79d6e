#include "sscl/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sscl::flux {

XiProfile make_profile_constant(double c) {
    return {"constant", [c](double) { return c; }, [](double) { return 0.0; }};
}

XiProfile make_profile_linear(double c) {
    return {"linear", [c](double xi) { return c * xi; }, [c](double) { return c; }};
}

XiProfile make_profile_burgers_linearized(double scale, double L) {
    if (L <= 0.0) throw std::invalid_argument("flux: linearization threshold L must be > 0");
    auto a = [scale, L](double xi) {
        if (xi > L) return scale * (0.5 * L * L + L * (xi - L));
        if (xi < -L) return scale * (0.5 * L * L - L * (xi + L));
        return scale * 0.5 * xi * xi;
    };
    auto ap = [scale, L](double xi) {
        if (xi > L) return scale * L;
        if (xi < -L) return -scale * L;
        return scale * xi;
    };
    return {"burgers", a, ap};
}

XiProfile make_profile_cubic_linearized(double scale, double L) {
    if (L <= 0.0) throw std::invalid_argument("flux: linearization threshold L must be > 0");
    auto a = [scale, L](double xi) {
        if (xi > L) return scale * (L * L * L / 3.0 + L * L * (xi - L));
        if (xi < -L) return scale * (-L * L * L / 3.0 + L * L * (xi + L));
        return scale * xi * xi * xi / 3.0;
    };
    auto ap = [scale, L](double xi) {
        const double c = std::clamp(xi, -L, L);
        return scale * c * c;
    };
    return {"cubic", a, ap};
}

XiProfile make_profile_burgers_raw(double scale) {
    return {"burgers_raw", [scale](double xi) { return scale * 0.5 * xi * xi; },
            [scale](double xi) { return scale * xi; }};
}

FaceField build_divfree_field(const Manifold& man, const StreamSpec& spec) {
    const geom::ChartGrid& g = man.grid;
    const geom::MetricField& m = man.metric;
    FaceField v;
    v.f1.assign(g.node_count(), 0.0);

    if (g.dim == 1) {
        if (spec.kind != "constant")
            throw std::invalid_argument("flux: 1D stream functions must be constant");
        for (int c = 0; c < g.node_count(); ++c) v.f1[c] = spec.amp / m.f1_sqrt_det[c];
        return v;
    }

    v.f2.assign(g.node_count(), 0.0);
    // psi sampled at cell corners (i+1/2, j+1/2); corner(i,j) is up-right of node (i,j).
    auto psi = [&](int i, int j) -> double {
        const double x1 = (i + 0.5) * g.d1;
        const double x2 = (j + 0.5) * g.d2;
        if (spec.kind == "constant") return spec.amp;
        if (spec.kind == "single_harmonic")
            return spec.amp * std::sin(spec.k1 * x1 + spec.k2 * x2 + spec.phase);
        if (spec.kind == "product_harmonic")
            return spec.amp * std::cos(spec.k1 * x1 + spec.phase) * std::cos(spec.k2 * x2);
        throw std::invalid_argument("flux: unknown stream kind '" + spec.kind + "'");
    };

    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            v.f1[c] = (psi(i, j) - psi(i, j - 1)) / (g.d2 * m.f1_sqrt_det[c]);
            v.f2[c] = -(psi(i, j) - psi(i - 1, j)) / (g.d1 * m.f2_sqrt_det[c]);
        }
    }
    return v;
}

FluxMode make_mode(const Manifold& man, XiProfile profile, const StreamSpec& spec) {
    FluxMode mode;
    mode.profile = std::move(profile);
    mode.v = build_divfree_field(man, spec);
    mode.v_node = geom::face_to_node(man, mode.v);
    mode.w.f1.resize(man.grid.node_count());
    if (man.grid.dim == 2) mode.w.f2.resize(man.grid.node_count());
    for (int c = 0; c < man.grid.node_count(); ++c) {
        mode.w.f1[c] = man.metric.f1_sqrt_det[c] * mode.v.f1[c];
        if (man.grid.dim == 2) mode.w.f2[c] = man.metric.f2_sqrt_det[c] * mode.v.f2[c];
    }
    return mode;
}

void eval_flux(const FluxModel& fm, int node, double xi, double* out1, double* out2) {
    double a1 = 0.0, a2 = 0.0;
    for (const FluxMode& mo : fm.modes) {
        const double a = mo.profile.a(xi);
        a1 += a * mo.v_node.c1[node];
        if (!mo.v_node.c2.empty()) a2 += a * mo.v_node.c2[node];
    }
    *out1 = a1;
    if (out2) *out2 = a2;
}

void eval_flux_prime(const FluxModel& fm, int node, double xi, double* out1, double* out2) {
    double a1 = 0.0, a2 = 0.0;
    for (const FluxMode& mo : fm.modes) {
        const double ap = mo.profile.aprime(xi);
        a1 += ap * mo.v_node.c1[node];
        if (!mo.v_node.c2.empty()) a2 += ap * mo.v_node.c2[node];
    }
    *out1 = a1;
    if (out2) *out2 = a2;
}

GrowthReport check_growth(const FluxModel& fm, const Manifold& man, double xi_lo,
                          double xi_hi, int samples) {
    GrowthReport rep;
    const geom::ChartGrid& g = man.grid;
    const GrowthCertificate& cert = fm.cert;

    // Per-mode node-collocated h-norms; by separability
    // |f|_h <= sum_j |a_j| |V_j|_h with equality for a single mode.
    std::vector<double> vnorm_max(fm.modes.size(), 0.0);
    for (size_t mi = 0; mi < fm.modes.size(); ++mi)
        for (int c = 0; c < g.node_count(); ++c)
            vnorm_max[mi] =
                std::max(vnorm_max[mi], geom::node_norm_h(man, fm.modes[mi].v_node, c));

    for (int s = 0; s < samples; ++s) {
        const double xi = xi_lo + (xi_hi - xi_lo) * s / (samples - 1);
        double fmax = 0.0, fpmax = 0.0;
        for (size_t mi = 0; mi < fm.modes.size(); ++mi) {
            fmax += std::abs(fm.modes[mi].profile.a(xi)) * vnorm_max[mi];
            fpmax += std::abs(fm.modes[mi].profile.aprime(xi)) * vnorm_max[mi];
        }
        rep.c0_hat = std::max(rep.c0_hat, fmax / (1.0 + std::pow(std::abs(xi), cert.r)));
        if (cert.r > 1.0)
            rep.c0_hat =
                std::max(rep.c0_hat, fpmax / (1.0 + std::pow(std::abs(xi), cert.r - 1.0)));
        else
            rep.c0_hat = std::max(rep.c0_hat, fpmax / 2.0);
        if (std::abs(xi) > cert.L) rep.tail_hat = std::max(rep.tail_hat, fmax / std::abs(xi));
        rep.c1_hat = std::max(rep.c1_hat, fpmax);
    }

    const double slack = 1.0 + 1e-9;
    rep.pass_poly = rep.c0_hat <= cert.c0 * slack;
    rep.pass_tail = rep.tail_hat <= cert.c0 * slack;
    rep.pass_lipschitz = rep.c1_hat <= cert.c1 * slack;
    return rep;
}

double max_relative_divergence(const FluxModel& fm, const Manifold& man, double xi_lo,
                               double xi_hi, int samples) {
    const geom::ChartGrid& g = man.grid;
    double worst = 0.0;
    FaceField flux;
    flux.f1.resize(g.node_count());
    if (g.dim == 2) flux.f2.resize(g.node_count());
    for (int s = 0; s < samples; ++s) {
        const double xi = xi_lo + (xi_hi - xi_lo) * s / (samples - 1);
        for (int c = 0; c < g.node_count(); ++c) {
            double a1 = 0.0, a2 = 0.0;
            for (const FluxMode& mo : fm.modes) {
                const double a = mo.profile.a(xi);
                a1 += a * mo.v.f1[c];
                if (g.dim == 2) a2 += a * mo.v.f2[c];
            }
            flux.f1[c] = a1;
            if (g.dim == 2) flux.f2[c] = a2;
        }
        worst = std::max(worst, geom::relative_divergence(man, flux));
    }
    return worst;
}

}  // namespace sscl::flux
