#include "sscl/manifold.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sscl/util.hpp"

namespace sscl::geom {

ManifoldKind manifold_kind_from_string(const std::string& s) {
    if (s == "circle") return ManifoldKind::circle;
    if (s == "flat_torus") return ManifoldKind::flat_torus;
    if (s == "warped_torus") return ManifoldKind::warped_torus;
    throw std::invalid_argument("manifold: unknown kind '" + s + "'");
}

namespace {

void fill_face_averages(const ChartGrid& g, MetricField& m) {
    const int n = g.node_count();
    m.f1_sqrt_det.resize(n);
    m.f1_inv11.resize(n);
    if (g.dim == 2) {
        m.f1_inv12.resize(n);
        m.f2_sqrt_det.resize(n);
        m.f2_inv22.resize(n);
        m.f2_inv12.resize(n);
    }
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const int e = g.idx(i + 1, j);
            m.f1_sqrt_det[c] = 0.5 * (m.sqrt_det[c] + m.sqrt_det[e]);
            m.f1_inv11[c] = 0.5 * (m.inv11[c] + m.inv11[e]);
            if (g.dim == 2) {
                const int nn = g.idx(i, j + 1);
                m.f1_inv12[c] = 0.5 * (m.inv12[c] + m.inv12[e]);
                m.f2_sqrt_det[c] = 0.5 * (m.sqrt_det[c] + m.sqrt_det[nn]);
                m.f2_inv22[c] = 0.5 * (m.inv22[c] + m.inv22[nn]);
                m.f2_inv12[c] = 0.5 * (m.inv12[c] + m.inv12[nn]);
            }
        }
    }
}

double raw_volume(const ChartGrid& g, const MetricField& m) {
    KahanSum s;
    for (double sd : m.sqrt_det) s.add(sd * g.cell_area());
    return s.value();
}

}  // namespace

Manifold build_manifold(const ManifoldParams& p) {
    if (std::abs(p.beta) >= 1.0)
        throw std::invalid_argument("manifold: |beta| must be < 1 (metric degenerates)");
    const double tau = 2.0 * std::numbers::pi;

    Manifold man;
    MetricField& m = man.metric;

    switch (p.kind) {
        case ManifoldKind::circle: {
            man.grid = ChartGrid::make(1, p.n1, 1, tau, 0.0);
            const int n = man.grid.node_count();
            m.h11.resize(n);
            m.inv11.resize(n);
            m.sqrt_det.resize(n);
            for (int i = 0; i < n; ++i) {
                const double w = 1.0 + p.beta * std::cos(man.grid.x1(i));
                m.h11[i] = w * w;
                m.inv11[i] = 1.0 / (w * w);
                m.sqrt_det[i] = w;
            }
            break;
        }
        case ManifoldKind::flat_torus:
        case ManifoldKind::warped_torus: {
            man.grid = ChartGrid::make(2, p.n1, p.n2, tau, tau);
            const int n = man.grid.node_count();
            m.h11.assign(n, 1.0);
            m.h12.assign(n, 0.0);
            m.h22.resize(n);
            m.inv11.assign(n, 1.0);
            m.inv12.assign(n, 0.0);
            m.inv22.resize(n);
            m.sqrt_det.resize(n);
            const double beta = p.kind == ManifoldKind::warped_torus ? p.beta : 0.0;
            for (int j = 0; j < man.grid.n2; ++j) {
                for (int i = 0; i < man.grid.n1; ++i) {
                    const int c = man.grid.idx(i, j);
                    const double w = 1.0 + beta * std::cos(man.grid.x1(i));
                    m.h22[c] = w * w;
                    m.inv22[c] = 1.0 / (w * w);
                    m.sqrt_det[c] = w;
                }
            }
            break;
        }
    }

    m.total_volume = raw_volume(man.grid, m);

    if (p.normalize) {
        // h -> c*h with c = V^(-2/n); then |h|^{1/2} -> |h|^{1/2}/V.
        const double vol = m.total_volume;
        const double c = std::pow(vol, -2.0 / man.grid.dim);
        auto scale = [](std::vector<double>& v, double f) {
            for (double& x : v) x *= f;
        };
        scale(m.h11, c);
        scale(m.h12, c);
        scale(m.h22, c);
        scale(m.inv11, 1.0 / c);
        scale(m.inv12, 1.0 / c);
        scale(m.inv22, 1.0 / c);
        scale(m.sqrt_det, 1.0 / vol);
        m.total_volume = raw_volume(man.grid, m);
    }

    fill_face_averages(man.grid, m);
    return man;
}

}  // namespace sscl::geom
