// Metric-aware differential and integral operators on a chart grid.
// All stencils are conservative (divergence form) so that closed-manifold
// identities telescope to round-off.
#pragma once

#include "sscl/manifold.hpp"

namespace sscl::geom {

// grad_h u = h^{ij} d_i u d_j, centered second-order differences at nodes.
NodeVectorField grad_h(const Manifold& man, const ScalarField& u);

// div_h X = |h|^{-1/2} d_l (|h|^{1/2} X^l) for a face-represented X.
ScalarField div_h(const Manifold& man, const FaceField& x);

// Same, for a field already given as metric-weighted face flux densities
// F^l = |h|^{1/2} X^l (the form the solver assembles).
ScalarField div_weighted(const Manifold& man, const FaceField& f);

// laplace_beltrami u = div_h grad_h u with face-averaged coefficients.
ScalarField laplace_beltrami(const Manifold& man, const ScalarField& u);

// Metric-weighted gradient fluxes F = |h|^{1/2} h^{ij} d_j u at faces;
// shared by laplace_beltrami and the gradient-energy quadrature so that
// <-laplace u, u> equals grad_energy exactly.
FaceField metric_gradient_flux(const Manifold& man, const ScalarField& u);

// integral of u dV_h (midpoint rule, compensated).
double integrate(const Manifold& man, const ScalarField& u);

// L2(dV_h) inner product.
double inner(const Manifold& man, const ScalarField& u, const ScalarField& v);

// integral of |grad u|_h^2 dV_h via the face quadrature.
double grad_energy(const Manifold& man, const ScalarField& u);

// Per-node split of grad_energy (half of each adjacent face term).
// Entries carry the dV weight; their sum equals grad_energy.
void grad_energy_nodal(const Manifold& man, const ScalarField& u, ScalarField& out);

// Arithmetic face->node averaging of a face field.
NodeVectorField face_to_node(const Manifold& man, const FaceField& x);

// |X|_h at a node for a node-collocated vector field.
double node_norm_h(const Manifold& man, const NodeVectorField& x, int idx);

// Scale-normalized divergence magnitude: max |div_h X| over nodes divided
// by the largest single-face contribution scale. Used for the discrete
// geometry-compatibility checks.
double relative_divergence(const Manifold& man, const FaceField& x);

}  // namespace sscl::geom
