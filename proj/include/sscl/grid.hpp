// Periodic structured chart grid and field containers.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace sscl::geom {

using ScalarField = std::vector<double>;

// Uniform periodic grid in local coordinates. Nodes sit at
// (i*d1, j*d2); everything wraps. 1D grids have n2 == 1.
struct ChartGrid {
    int dim = 1;
    int n1 = 0, n2 = 1;
    double period1 = 0.0, period2 = 0.0;
    double d1 = 0.0, d2 = 0.0;

    static ChartGrid make(int dim, int n1, int n2, double period1, double period2) {
        if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
        if (n1 < 8 || (dim == 2 && n2 < 8))
            throw std::invalid_argument("grid: sizes must be >= 8");
        ChartGrid g;
        g.dim = dim;
        g.n1 = n1;
        g.n2 = dim == 2 ? n2 : 1;
        g.period1 = period1;
        g.period2 = dim == 2 ? period2 : 0.0;
        g.d1 = period1 / n1;
        g.d2 = dim == 2 ? period2 / n2 : 1.0;
        return g;
    }

    int node_count() const { return n1 * n2; }

    int wrap1(int i) const {
        i %= n1;
        return i < 0 ? i + n1 : i;
    }
    int wrap2(int j) const {
        j %= n2;
        return j < 0 ? j + n2 : j;
    }
    int idx(int i, int j) const { return wrap2(j) * n1 + wrap1(i); }

    double x1(int i) const { return i * d1; }
    double x2(int j) const { return j * d2; }

    double min_spacing() const { return dim == 2 ? std::min(d1, d2) : d1; }
    double cell_area() const { return dim == 2 ? d1 * d2 : d1; }
};

// Contravariant components at cell faces. f1[idx(i,j)] lives on the face
// between nodes (i,j) and (i+1,j); f2[idx(i,j)] between (i,j) and (i,j+1).
struct FaceField {
    std::vector<double> f1;
    std::vector<double> f2;  // empty in 1D
};

// Contravariant components collocated at nodes (diagnostics only).
struct NodeVectorField {
    std::vector<double> c1;
    std::vector<double> c2;  // empty in 1D
};

}  // namespace sscl::geom
