#include "fbms/eigensolver.hpp"

#include "fbms/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fbms {

namespace {

void check_pencil(const SparseMatrix& k, const SparseMatrix& m, int nev) {
  if (k.rows() != k.cols() || m.rows() != m.cols() || k.rows() != m.rows()) {
    throw Error(ErrorKind::InvalidInput, "pencil matrices must be square and of equal size");
  }
  if (nev < 1) throw Error(ErrorKind::InvalidInput, "need at least one eigenpair");
}

Eigen::VectorXd residual_norms(const SparseMatrix& k, const SparseMatrix& m, const Eigen::VectorXd& values,
                               const Eigen::MatrixXd& vectors) {
  Eigen::VectorXd r(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Eigen::VectorXd mx = m * vectors.col(i);
    r[i] = (k * vectors.col(i) - values[i] * mx).norm() / mx.norm();
  }
  return r;
}

// Removes the M-projection onto the columns of d (M-orthonormal).
void deflate(Eigen::MatrixXd& x, const SparseMatrix& m, const Eigen::MatrixXd* d) {
  if (d == nullptr || d->cols() == 0) return;
  for (int pass = 0; pass < 2; ++pass) x -= *d * (d->transpose() * (m * x));
}

}  // namespace

Eigen::MatrixXd m_orthonormalize(const Eigen::MatrixXd& x, const SparseMatrix& m, const Eigen::MatrixXd* basis) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::VectorXd w = x.col(j);
    const double before = std::sqrt(std::max(0.0, w.dot(m * w)));
    if (!(before > 0.0)) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (basis != nullptr && basis->cols() > 0) w -= *basis * (basis->transpose() * (m * w));
      if (kept > 0) w -= out.leftCols(kept) * (out.leftCols(kept).transpose() * (m * w));
    }
    const double after = std::sqrt(std::max(0.0, w.dot(m * w)));
    if (after <= 1e-10 * before) continue;
    out.col(kept++) = w / after;
  }
  return out.leftCols(kept);
}

EigenResult dense_smallest(const SparseMatrix& k, const SparseMatrix& m, int nev, const Eigen::MatrixXd* deflation) {
  check_pencil(k, m, nev);
  const Eigen::Index n = k.rows();
  const Eigen::MatrixXd kd(k);
  const Eigen::MatrixXd md(m);
  Eigen::LLT<Eigen::MatrixXd> llt(md);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::InvalidInput, "mass matrix is not positive definite");
  const auto l = llt.matrixL();
  // standard form A = L^-1 K L^-T, y = L^T x
  Eigen::MatrixXd a = l.solve(kd);
  a = l.solve(a.transpose()).transpose();
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::MatrixXd q;  // orthonormal basis of the admissible y-space
  if (deflation != nullptr && deflation->cols() > 0) {
    const Eigen::MatrixXd ld = llt.matrixU() * (*deflation);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(ld);
    const Eigen::MatrixXd full = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    q = full.rightCols(n - deflation->cols());
  }
  const Eigen::MatrixXd reduced = q.size() > 0 ? Eigen::MatrixXd(q.transpose() * a * q) : a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::SolverNoConvergence, "dense eigensolver failed");
  const int count = static_cast<int>(std::min<Eigen::Index>(nev, reduced.rows()));
  EigenResult r;
  r.values = eig.eigenvalues().head(count);
  Eigen::MatrixXd y = eig.eigenvectors().leftCols(count);
  if (q.size() > 0) y = q * y;
  r.vectors = llt.matrixU().solve(y);
  r.residuals = residual_norms(k, m, r.values, r.vectors);
  return r;
}

EigenResult iterative_smallest(const SparseMatrix& k, const SparseMatrix& m, int nev, const IterativeOptions& options,
                               const Eigen::MatrixXd* deflation) {
  check_pencil(k, m, nev);
  const Eigen::Index n = k.rows();
  Eigen::MatrixXd defl;
  if (deflation != nullptr && deflation->cols() > 0) defl = m_orthonormalize(*deflation, m);
  const Eigen::MatrixXd* d = defl.cols() > 0 ? &defl : nullptr;
  const Eigen::Index available = n - defl.cols();
  if (nev > available) throw Error(ErrorKind::InvalidInput, "more eigenpairs requested than the problem size");
  const int p = static_cast<int>(std::min<Eigen::Index>(nev + std::max(1, options.guard_vectors), available));

  // shift below the spectrum: Cholesky of K - s M succeeds iff s < lambda_min
  double ratio = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ratio = std::max(ratio, std::abs(k.coeff(i, i)) / m.coeff(i, i));
  Eigen::SimplicialLLT<SparseMatrix> chol;
  // Doubling from -1 lands within a factor 2 of a negative lambda_min, which
  // keeps the shift-invert contraction close to the spectrum's own gaps.
  double sigma = options.shift.value_or(-1.0);
  for (int attempt = 0;; ++attempt) {
    chol.compute(SparseMatrix(k - sigma * m));
    if (chol.info() == Eigen::Success) break;
    if (options.shift || attempt > 80) {
      throw Error(ErrorKind::SolverNoConvergence, "could not factor K - sigma M for a shift below the spectrum");
    }
    sigma *= 2.0;
  }
  // residuals cannot drop below rounding in K x, about eps * |K| / |M|
  const double floor = std::numeric_limits<double>::epsilon() * ratio;
  const double target = std::max(options.tolerance, floor);
  auto solve = [&](const Eigen::MatrixXd& rhs) {
    Eigen::MatrixXd y = chol.solve(rhs);
    deflate(y, m, d);
    return y;
  };

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd x0(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) x0(i, j) = normal(rng);
  }
  deflate(x0, m, d);
  Eigen::MatrixXd x = m_orthonormalize(solve(Eigen::MatrixXd(m * x0)), m);
  Eigen::MatrixXd prev;  // previous search block
  Eigen::VectorXd theta;
  Eigen::VectorXd res;
  double worst = 0.0;
  for (int it = 1; it <= options.max_iterations; ++it) {
    // Rayleigh-Ritz on span{X, W, P} with W = (K - sM)^-1 (K X - M X Theta),
    // which spans the same space as the shift-invert images of X without the
    // cancellation of forming them and projecting X back out.
    if (theta.size() == 0) {
      Eigen::MatrixXd h0 = x.transpose() * (k * x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig0(0.5 * (h0 + h0.transpose()));
      x = x * eig0.eigenvectors();
      theta = eig0.eigenvalues();
    }
    const Eigen::MatrixXd r = k * x - (m * x) * theta.asDiagonal();
    Eigen::MatrixXd basis = x;
    Eigen::MatrixXd w = m_orthonormalize(solve(r), m, &basis);
    Eigen::MatrixXd s(n, basis.cols() + w.cols());
    s << basis, w;
    if (prev.cols() > 0) {
      Eigen::MatrixXd pp = m_orthonormalize(prev, m, &s);
      Eigen::MatrixXd grown(n, s.cols() + pp.cols());
      grown << s, pp;
      s = std::move(grown);
    }
    Eigen::MatrixXd h = s.transpose() * (k * s);
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    const int keep = static_cast<int>(std::min<Eigen::Index>(p, s.cols()));
    x = s * eig.eigenvectors().leftCols(keep);
    theta = eig.eigenvalues().head(keep);
    prev = w;

    res = residual_norms(k, m, theta.head(nev), x.leftCols(nev));
    worst = 0.0;
    for (int i = 0; i < nev; ++i) worst = std::max(worst, res[i] / std::max(1.0, std::abs(theta[i])));
    if (worst <= target) {
      EigenResult out;
      out.values = theta.head(nev);
      out.vectors = x.leftCols(nev);
      out.residuals = res;
      out.iterations = it;
      out.shift = sigma;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "shift-invert iteration did not converge after " << options.max_iterations
      << " iterations (worst relative residual " << worst << ", shift " << sigma << ")";
  throw Error(ErrorKind::SolverNoConvergence, msg.str());
}

}  // namespace fbms
