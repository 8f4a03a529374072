#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "treeweave/graph.hpp"

namespace treeweave {

/// Result of the algebraic-connectivity monitor.
struct SpectralReport {
  double lambda2 = 0.0;      // second-smallest Laplacian eigenvalue
  std::size_t iterations = 0;
  double residual = 0.0;     // ||L x - lambda x|| / ||x|| of the returned pair
  bool connected = true;     // false reports lambda2 = 0 exactly
};

/// Applies the graph Laplacian: (Lx)_v = deg(v) x_v - sum of neighbor values.
/// x is indexed like Graph::ids(). The matrix is never materialized.
std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x);

/// Second-smallest Laplacian eigenvalue to relative accuracy
/// tol * max(1, lambda2), tol in (0, 1e-2].
///
/// Matrix-free Lanczos iteration on the subspace orthogonal to the all-ones
/// vector (the kernel of L on a connected graph), with full
/// reorthogonalization, so clustered or repeated eigenvalues converge too.
/// The starting vector is derived deterministically from the vertex ids;
/// repeated calls give bitwise-identical results without threading an rng
/// through the monitor.
///
/// A disconnected graph reports lambda2 = 0 exactly with connected = false;
/// churn scenarios must be able to observe disconnection rather than fail.
/// Failure to reach tol within the iteration budget throws SolverError
/// carrying the best residual.
SpectralReport lambda2(const Graph& g, double tol = 1e-8);

/// Verification oracle: full dense eigendecomposition by cyclic Jacobi
/// rotations, second-smallest eigenvalue. Capped at 64 vertices.
double lambda2_dense(const Graph& g);

}  // namespace treeweave
