#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <optional>

namespace fbms {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Smallest eigenpairs of the symmetric pencil K x = lambda M x, M positive
// definite. Eigenvectors are M-orthonormal, eigenvalues ascending.
struct EigenResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd residuals;  // |K x - lambda M x| / |M x|
  int iterations = 0;
  double shift = 0.0;
};

struct IterativeOptions {
  double tolerance = 1e-11;  // residual target, relative to max(1, |lambda|);
                             // raised to the rounding floor eps * max diag(K)/diag(M)
  int max_iterations = 1000;
  int guard_vectors = 6;     // extra Ritz vectors carried along (block size)
  std::uint64_t seed = 42;
  std::optional<double> shift;  // must lie below the smallest eigenvalue
};

// Dense generalized eigensolver. With `deflation` (n x d), solves the pencil
// compressed to the M-orthogonal complement of its columns.
EigenResult dense_smallest(const SparseMatrix& k, const SparseMatrix& m, int nev,
                           const Eigen::MatrixXd* deflation = nullptr);

// Shift-invert block Krylov iteration with Rayleigh-Ritz on the pencil, full
// M-reorthogonalization and a locally optimal three-block basis. The shift is
// chosen below the spectrum by attempting Cholesky factorizations of K - s M.
// Throws Error{SolverNoConvergence} with iteration diagnostics.
EigenResult iterative_smallest(const SparseMatrix& k, const SparseMatrix& m, int nev,
                               const IterativeOptions& options = {},
                               const Eigen::MatrixXd* deflation = nullptr);

// M-orthonormalizes the columns of x against `basis` (already M-orthonormal)
// and among themselves, dropping numerically dependent columns.
Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& x, const SparseMatrix& m,
                                 const Eigen::MatrixXd* basis = nullptr);

}  // namespace fbms
