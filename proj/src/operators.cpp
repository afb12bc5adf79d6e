#include "sscl/operators.hpp"

#include <cmath>

#include "sscl/util.hpp"

namespace sscl::geom {

NodeVectorField grad_h(const Manifold& man, const ScalarField& u) {
    const ChartGrid& g = man.grid;
    const MetricField& m = man.metric;
    NodeVectorField out;
    out.c1.resize(g.node_count());
    if (g.dim == 2) out.c2.resize(g.node_count());

    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const double du1 = (u[g.idx(i + 1, j)] - u[g.idx(i - 1, j)]) / (2.0 * g.d1);
            if (g.dim == 1) {
                out.c1[c] = m.inv11[c] * du1;
            } else {
                const double du2 = (u[g.idx(i, j + 1)] - u[g.idx(i, j - 1)]) / (2.0 * g.d2);
                out.c1[c] = m.inv11[c] * du1 + m.inv12[c] * du2;
                out.c2[c] = m.inv12[c] * du1 + m.inv22[c] * du2;
            }
        }
    }
    return out;
}

ScalarField div_weighted(const Manifold& man, const FaceField& f) {
    const ChartGrid& g = man.grid;
    const MetricField& m = man.metric;
    ScalarField out(g.node_count());
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            double acc = (f.f1[c] - f.f1[g.idx(i - 1, j)]) / g.d1;
            if (g.dim == 2) acc += (f.f2[c] - f.f2[g.idx(i, j - 1)]) / g.d2;
            out[c] = acc / m.sqrt_det[c];
        }
    }
    return out;
}

ScalarField div_h(const Manifold& man, const FaceField& x) {
    const ChartGrid& g = man.grid;
    const MetricField& m = man.metric;
    FaceField f;
    f.f1.resize(g.node_count());
    if (g.dim == 2) f.f2.resize(g.node_count());
    for (int c = 0; c < g.node_count(); ++c) {
        f.f1[c] = m.f1_sqrt_det[c] * x.f1[c];
        if (g.dim == 2) f.f2[c] = m.f2_sqrt_det[c] * x.f2[c];
    }
    return div_weighted(man, f);
}

FaceField metric_gradient_flux(const Manifold& man, const ScalarField& u) {
    const ChartGrid& g = man.grid;
    const MetricField& m = man.metric;
    FaceField f;
    f.f1.resize(g.node_count());
    if (g.dim == 2) f.f2.resize(g.node_count());

    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const double d1u = (u[g.idx(i + 1, j)] - u[c]) / g.d1;
            if (g.dim == 1) {
                f.f1[c] = m.f1_sqrt_det[c] * m.f1_inv11[c] * d1u;
            } else {
                // Tangential derivatives at faces use 4-point averages; they
                // vanish for the supported (orthogonal) metrics but keep the
                // flux form exact when h12 != 0.
                const double d2u_at_f1 =
                    (u[g.idx(i, j + 1)] + u[g.idx(i + 1, j + 1)] - u[g.idx(i, j - 1)] -
                     u[g.idx(i + 1, j - 1)]) /
                    (4.0 * g.d2);
                f.f1[c] = m.f1_sqrt_det[c] * (m.f1_inv11[c] * d1u + m.f1_inv12[c] * d2u_at_f1);

                const double d2u = (u[g.idx(i, j + 1)] - u[c]) / g.d2;
                const double d1u_at_f2 =
                    (u[g.idx(i + 1, j)] + u[g.idx(i + 1, j + 1)] - u[g.idx(i - 1, j)] -
                     u[g.idx(i - 1, j + 1)]) /
                    (4.0 * g.d1);
                f.f2[c] = m.f2_sqrt_det[c] * (m.f2_inv22[c] * d2u + m.f2_inv12[c] * d1u_at_f2);
            }
        }
    }
    return f;
}

ScalarField laplace_beltrami(const Manifold& man, const ScalarField& u) {
    return div_weighted(man, metric_gradient_flux(man, u));
}

double integrate(const Manifold& man, const ScalarField& u) {
    const double a = man.grid.cell_area();
    KahanSum s;
    for (int c = 0; c < man.grid.node_count(); ++c) s.add(u[c] * man.metric.sqrt_det[c] * a);
    return s.value();
}

double inner(const Manifold& man, const ScalarField& u, const ScalarField& v) {
    const double a = man.grid.cell_area();
    KahanSum s;
    for (int c = 0; c < man.grid.node_count(); ++c)
        s.add(u[c] * v[c] * man.metric.sqrt_det[c] * a);
    return s.value();
}

double grad_energy(const Manifold& man, const ScalarField& u) {
    const ChartGrid& g = man.grid;
    const FaceField f = metric_gradient_flux(man, u);
    const double a = g.cell_area();
    KahanSum s;
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            s.add(f.f1[c] * (u[g.idx(i + 1, j)] - u[c]) / g.d1 * a);
            if (g.dim == 2) s.add(f.f2[c] * (u[g.idx(i, j + 1)] - u[c]) / g.d2 * a);
        }
    }
    return s.value();
}

void grad_energy_nodal(const Manifold& man, const ScalarField& u, ScalarField& out) {
    const ChartGrid& g = man.grid;
    const FaceField f = metric_gradient_flux(man, u);
    const double a = g.cell_area();
    out.assign(g.node_count(), 0.0);
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const int e = g.idx(i + 1, j);
            const double tx = 0.5 * f.f1[c] * (u[e] - u[c]) / g.d1 * a;
            out[c] += tx;
            out[e] += tx;
            if (g.dim == 2) {
                const int nn = g.idx(i, j + 1);
                const double ty = 0.5 * f.f2[c] * (u[nn] - u[c]) / g.d2 * a;
                out[c] += ty;
                out[nn] += ty;
            }
        }
    }
}

NodeVectorField face_to_node(const Manifold& man, const FaceField& x) {
    const ChartGrid& g = man.grid;
    NodeVectorField out;
    out.c1.resize(g.node_count());
    if (g.dim == 2) out.c2.resize(g.node_count());
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            out.c1[c] = 0.5 * (x.f1[c] + x.f1[g.idx(i - 1, j)]);
            if (g.dim == 2) out.c2[c] = 0.5 * (x.f2[c] + x.f2[g.idx(i, j - 1)]);
        }
    }
    return out;
}

double node_norm_h(const Manifold& man, const NodeVectorField& x, int idx) {
    const MetricField& m = man.metric;
    if (man.grid.dim == 1) return std::sqrt(m.h11[idx]) * std::abs(x.c1[idx]);
    const double q = m.h11[idx] * x.c1[idx] * x.c1[idx] +
                     2.0 * m.h12[idx] * x.c1[idx] * x.c2[idx] +
                     m.h22[idx] * x.c2[idx] * x.c2[idx];
    return std::sqrt(std::max(q, 0.0));
}

double relative_divergence(const Manifold& man, const FaceField& x) {
    const ChartGrid& g = man.grid;
    const MetricField& m = man.metric;
    const ScalarField d = div_h(man, x);

    double max_div = 0.0;
    for (double v : d) max_div = std::max(max_div, std::abs(v));

    // Scale: largest single face-difference contribution to any node.
    double scale = 0.0;
    for (int c = 0; c < g.node_count(); ++c) {
        scale = std::max(scale,
                         std::abs(m.f1_sqrt_det[c] * x.f1[c]) / (g.d1 * m.sqrt_det[c]));
        if (g.dim == 2)
            scale = std::max(scale,
                             std::abs(m.f2_sqrt_det[c] * x.f2[c]) / (g.d2 * m.sqrt_det[c]));
    }
    if (scale == 0.0) return max_div == 0.0 ? 0.0 : INFINITY;
    return max_div / scale;
}

}  // namespace sscl::geom
