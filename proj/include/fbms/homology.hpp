#pragma once

#include "fbms/mesh.hpp"

#include <Eigen/SparseCore>

#include <optional>

namespace fbms {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Coboundary of 0-cochains, E x V: (d0 f)(e) = f(v1) - f(v0).
SparseMatrix coboundary0(const TriSurfaceMesh& mesh);
// Coboundary of 1-cochains, F x E: (d1 w)(f) = sum of w over the oriented
// edges of f.
SparseMatrix coboundary1(const TriSurfaceMesh& mesh);
// Edge chain of boundary loop l, signed by the loop traversal.
Eigen::VectorXd boundary_loop_chain(const TriSurfaceMesh& mesh, int loop);

// Rank by sparse rank-revealing QR (SuiteSparseQR); pivots below
// relative_cutoff * (largest column norm) count as zero.
int numerical_rank(const SparseMatrix& a, double relative_cutoff = 1e-10);

// Rank over Q by fraction-free sparse elimination. Requires integer entries;
// returns nullopt if an intermediate does not fit in 64 bits.
std::optional<int> exact_rank(const SparseMatrix& a);

// numerical_rank, cross-checked against exact_rank when the matrix has fewer
// than `exact_nonzero_limit` nonzeros. Throws Error{InconsistentRank}.
int checked_rank(const SparseMatrix& a, long exact_nonzero_limit = 20000);

// Real homology dimensions of (M, dM).
struct HomologyProfile {
  int h0 = 0;           // dim H0(M)
  int h1 = 0;           // dim H1(M)
  int h2 = 0;           // dim H2(M)
  int h0_boundary = 0;  // dim H0(dM) = r
  int h1_boundary = 0;  // dim H1(dM) = r
  int h0_relative = 0;  // dim H0(M, dM)
  int h1_relative = 0;  // dim H1(M, dM)
  int h2_relative = 0;  // dim H2(M, dM)
  int image_istar = 0;  // dim Im(i_*: H1(dM) -> H1(M))
  bool exact_rank_checked = false;

  // dim H1(M,dM) = (r - 1) + (dim H1(M) - dim Im i_*)
  bool long_exact_sequence_holds() const {
    return h1_relative == (h0_boundary - 1) + (h1 - image_istar);
  }
};

HomologyProfile homology_profile(const TriSurfaceMesh& mesh);

}  // namespace fbms
