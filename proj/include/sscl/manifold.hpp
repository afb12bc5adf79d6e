// Metric data on a chart grid and the built-in manifold menu.
#pragma once

#include <string>

#include "sscl/grid.hpp"

namespace sscl::geom {

// Per-node symmetric metric h_ij, its inverse, and |h|^{1/2}, plus
// face-averaged combinations used by the conservative stencils.
// Metrics are normalized so that the total Riemannian volume is 1.
struct MetricField {
    std::vector<double> h11, h12, h22;     // h12/h22 empty in 1D
    std::vector<double> inv11, inv12, inv22;
    std::vector<double> sqrt_det;

    // Arithmetic face averages (f1 = x1-faces, f2 = x2-faces).
    std::vector<double> f1_sqrt_det, f2_sqrt_det;
    std::vector<double> f1_inv11, f1_inv12;
    std::vector<double> f2_inv22, f2_inv12;

    double total_volume = 0.0;
};

struct Manifold {
    ChartGrid grid;
    MetricField metric;

    double node_volume(int idx) const { return metric.sqrt_det[idx] * grid.cell_area(); }
};

enum class ManifoldKind { circle, flat_torus, warped_torus };

ManifoldKind manifold_kind_from_string(const std::string& s);

struct ManifoldParams {
    ManifoldKind kind = ManifoldKind::circle;
    int n1 = 64;
    int n2 = 64;       // ignored for circle
    double beta = 0.0; // warp amplitude, |beta| < 1
    bool normalize = true;
};

// Builds grid+metric for the supported menu:
//   circle:       dim 1, h = (1 + beta cos x)^2
//   flat_torus:   dim 2, h = diag(1, 1)
//   warped_torus: dim 2, h = diag(1, (1 + beta cos x1)^2)
// Coordinate period is 2*pi per axis. When normalize is set, the metric is
// scaled so the total volume is 1 (the coordinate grid is untouched).
Manifold build_manifold(const ManifoldParams& p);

}  // namespace sscl::geom
