#include "fbms/jacobi.hpp"

#include "fbms/errors.hpp"
#include "fbms/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fbms {

namespace {

struct LocalMatrices {
  Eigen::Matrix3d stiffness;
  Eigen::Matrix3d potential;
  Eigen::Matrix3d mass;
};

// int over the triangle of l_a l_b l_c, divided by the area
double cubic_moment(int a, int b, int c) {
  if (a == b && b == c) return 1.0 / 10.0;
  if (a == b || b == c || a == c) return 1.0 / 30.0;
  return 1.0 / 60.0;
}

LocalMatrices local_matrices(const TriSurfaceMesh& mesh, int f, const std::vector<double>& potential) {
  const Tri& t = mesh.triangle(f);
  const Vec3& p0 = mesh.vertex(t[0]);
  const Vec3& p1 = mesh.vertex(t[1]);
  const Vec3& p2 = mesh.vertex(t[2]);
  const Vec3 cr = (p1 - p0).cross(p2 - p0);
  const double area = 0.5 * cr.norm();
  if (!(area > 0.0) || !std::isfinite(area)) {
    throw Error(ErrorKind::NegativeTriangleArea, "triangle " + std::to_string(f) + " has non-positive area");
  }
  const Vec3 n = cr / (2.0 * area);
  const std::array<Vec3, 3> grad{n.cross(p2 - p1) / (2.0 * area), n.cross(p0 - p2) / (2.0 * area),
                                 n.cross(p1 - p0) / (2.0 * area)};
  LocalMatrices l;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      l.stiffness(a, b) = area * grad[static_cast<size_t>(a)].dot(grad[static_cast<size_t>(b)]);
      l.mass(a, b) = area * (a == b ? 2.0 : 1.0) / 12.0;
      double pot = 0.0;
      for (int c = 0; c < 3; ++c) pot += potential[static_cast<size_t>(t[static_cast<size_t>(c)])] * cubic_moment(a, b, c);
      l.potential(a, b) = area * pot;
    }
  }
  return l;
}

SparseMatrix from_triplets(Eigen::Index n, const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix s(n, n);
  s.setFromTriplets(t.begin(), t.end());
  s.makeCompressed();
  return s;
}

}  // namespace

double QuadraticFormAssembly::q(const Eigen::VectorXd& phi) const { return q(phi, phi); }

double QuadraticFormAssembly::q(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) const {
  return phi.dot(s * psi) - phi.dot(robin * psi);
}

QuadraticFormAssembly assemble(const TriSurfaceMesh& mesh, const std::vector<double>& potential,
                               const std::vector<double>& robin) {
  const auto nv = static_cast<size_t>(mesh.num_vertices());
  if (potential.size() != nv) throw Error(ErrorKind::MissingField, "potential field size does not match vertex count");
  if (robin.size() != nv) throw Error(ErrorKind::MissingField, "Robin field size does not match vertex count");
  for (double x : potential) {
    if (!std::isfinite(x)) throw Error(ErrorKind::MissingField, "potential field has non-finite values");
  }

  const int nf = mesh.num_triangles();
  std::vector<LocalMatrices> local(static_cast<size_t>(nf));
  parallel_for(nf, [&](int f) { local[static_cast<size_t>(f)] = local_matrices(mesh, f, potential); });

  std::vector<Eigen::Triplet<double>> ts, tp, tm, tr;
  ts.reserve(9 * static_cast<size_t>(nf));
  tp.reserve(9 * static_cast<size_t>(nf));
  tm.reserve(9 * static_cast<size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    const Tri& t = mesh.triangle(f);
    const LocalMatrices& l = local[static_cast<size_t>(f)];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        ts.emplace_back(t[static_cast<size_t>(a)], t[static_cast<size_t>(b)], l.stiffness(a, b));
        tp.emplace_back(t[static_cast<size_t>(a)], t[static_cast<size_t>(b)], l.potential(a, b));
        tm.emplace_back(t[static_cast<size_t>(a)], t[static_cast<size_t>(b)], l.mass(a, b));
      }
    }
  }
  for (const auto& loop : mesh.boundary_loops()) {
    for (size_t i = 0; i < loop.size(); ++i) {
      const int a = loop[i];
      const int b = loop[(i + 1) % loop.size()];
      const double len = (mesh.vertex(b) - mesh.vertex(a)).norm();
      const double ra = robin[static_cast<size_t>(a)];
      const double rb = robin[static_cast<size_t>(b)];
      if (!std::isfinite(ra) || !std::isfinite(rb)) throw Error(ErrorKind::MissingField, "Robin field has non-finite values");
      tr.emplace_back(a, a, len * (3.0 * ra + rb) / 12.0);
      tr.emplace_back(b, b, len * (ra + 3.0 * rb) / 12.0);
      tr.emplace_back(a, b, len * (ra + rb) / 12.0);
      tr.emplace_back(b, a, len * (ra + rb) / 12.0);
    }
  }
  const auto n = static_cast<Eigen::Index>(nv);
  QuadraticFormAssembly out;
  out.stiffness = from_triplets(n, ts);
  out.potential = from_triplets(n, tp);
  out.mass = from_triplets(n, tm);
  out.robin = from_triplets(n, tr);
  out.s = out.stiffness - out.potential;
  return out;
}

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::Auto:
      return "auto";
    case SolverMode::Dense:
      return "dense";
    case SolverMode::Iterative:
      return "iterative";
  }
  return "auto";
}

SpectralResult solve_spectrum(const QuadraticFormAssembly& assembly, int m, SolverMode mode,
                              const IterativeOptions& options) {
  const auto n = assembly.mass.rows();
  if (m < 1) throw Error(ErrorKind::InvalidInput, "need at least one eigenpair");
  m = static_cast<int>(std::min<Eigen::Index>(m, n));
  if (mode == SolverMode::Auto) mode = n < kDenseVertexLimit ? SolverMode::Dense : SolverMode::Iterative;
  const SparseMatrix k = assembly.form();
  EigenResult e = mode == SolverMode::Dense ? dense_smallest(k, assembly.mass, m)
                                            : iterative_smallest(k, assembly.mass, m, options);
  SpectralResult r;
  r.eigenvalues = std::move(e.values);
  r.eigenvectors = std::move(e.vectors);
  r.residuals = std::move(e.residuals);
  r.iterations = e.iterations;
  r.shift = e.shift;
  r.mode = mode;
  const double scale = r.eigenvalues.cwiseAbs().maxCoeff();
  r.zero_threshold = kZeroThresholdFactor * scale;
  r.negative_count = 0;
  for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) {
    if (r.eigenvalues[i] < -r.zero_threshold) ++r.negative_count;
  }
  return r;
}

double rayleigh_min_orthogonal(const QuadraticFormAssembly& assembly, const Eigen::MatrixXd& deflation,
                               SolverMode mode) {
  const auto n = assembly.mass.rows();
  if (deflation.rows() != n) throw Error(ErrorKind::InvalidInput, "deflation basis has the wrong row count");
  if (deflation.cols() >= n) throw Error(ErrorKind::InvalidInput, "deflation basis spans the whole space");
  if (mode == SolverMode::Auto) mode = n < kDenseVertexLimit ? SolverMode::Dense : SolverMode::Iterative;
  const SparseMatrix k = assembly.form();
  if (mode == SolverMode::Dense) return dense_smallest(k, assembly.mass, 1, &deflation).values[0];
  return iterative_smallest(k, assembly.mass, 1, {}, &deflation).values[0];
}

double rayleigh_min_orthogonal(const QuadraticFormAssembly& assembly, const SpectralResult& spectrum, int k,
                               SolverMode mode) {
  if (k < 0 || k >= spectrum.eigenvalues.size()) {
    throw Error(ErrorKind::InvalidInput, "k must be below the number of computed eigenpairs");
  }
  if (k == 0) return rayleigh_min_orthogonal(assembly, Eigen::MatrixXd(assembly.mass.rows(), 0), mode);
  return rayleigh_min_orthogonal(assembly, Eigen::MatrixXd(spectrum.eigenvectors.leftCols(k)), mode);
}

JacobiInput exemplar_input(const ExemplarSurface& exemplar, const TriSurfaceMesh& mesh, const AmbientDomain* domain) {
  JacobiInput in{mesh, exemplar_fields(exemplar, mesh), {}};
  in.robin = robin_coefficients(mesh, in.fields.normal, domain != nullptr ? *domain : exemplar.domain());
  return in;
}

JacobiInput mesh_input(const TriSurfaceMesh& mesh, const AmbientDomain& domain) {
  JacobiInput in{mesh, discrete_fields(mesh), {}};
  in.robin = robin_coefficients(mesh, in.fields.normal, domain);
  return in;
}

namespace {

IndexLevel run_level(const JacobiInput& in, int m, SolverMode mode, SpectralResult* keep) {
  const auto start = std::chrono::steady_clock::now();
  const QuadraticFormAssembly a = assemble(in.mesh, in.fields.a2, in.robin);
  SpectralResult s = solve_spectrum(a, m, mode);
  IndexLevel level;
  level.vertices = in.mesh.num_vertices();
  level.negative_count = s.negative_count;
  level.lambda1 = s.eigenvalues[0];
  level.mode = s.mode;
  level.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (keep != nullptr) *keep = std::move(s);
  return level;
}

void finish(MorseIndexReport& r) {
  r.index = r.levels.back().negative_count;
  const size_t n = r.levels.size();
  r.stable = n < 2 || r.levels[n - 1].negative_count == r.levels[n - 2].negative_count;
}

}  // namespace

MorseIndexReport morse_index(const ExemplarSurface& exemplar, int resolution, int refinements, int m,
                             SolverMode mode, const AmbientDomain* domain) {
  if (refinements < 0) throw Error(ErrorKind::InvalidInput, "refinements must be nonnegative");
  MorseIndexReport r;
  const ExemplarReprojection rep(exemplar);
  TriSurfaceMesh mesh = sample_mesh(exemplar, resolution);
  for (int level = 0; level <= refinements; ++level) {
    if (level > 0) mesh = refine(mesh, &rep);
    const bool last = level == refinements;
    r.levels.push_back(run_level(exemplar_input(exemplar, mesh, domain), m, mode, last ? &r.finest : nullptr));
  }
  finish(r);
  return r;
}

MorseIndexReport morse_index(const TriSurfaceMesh& base, const AmbientDomain& domain, int refinements, int m,
                             SolverMode mode, const std::vector<double>* a2) {
  if (refinements < 0) throw Error(ErrorKind::InvalidInput, "refinements must be nonnegative");
  if (a2 != nullptr && a2->size() != static_cast<size_t>(base.num_vertices())) {
    throw Error(ErrorKind::MissingField, "|A|^2 field size does not match vertex count");
  }
  MorseIndexReport r;
  const DomainReprojection rep(domain);
  TriSurfaceMesh mesh = base;
  std::vector<double> field = a2 != nullptr ? *a2 : std::vector<double>{};
  for (int level = 0; level <= refinements; ++level) {
    if (level > 0) {
      const TriSurfaceMesh coarse = mesh;
      mesh = refine(coarse, &rep);
      if (a2 != nullptr) {
        std::vector<double> fine(static_cast<size_t>(mesh.num_vertices()));
        std::copy(field.begin(), field.end(), fine.begin());
        for (int e = 0; e < coarse.num_edges(); ++e) {
          const MeshEdge& ed = coarse.edge(e);
          fine[static_cast<size_t>(coarse.num_vertices() + e)] =
              0.5 * (field[static_cast<size_t>(ed.v0)] + field[static_cast<size_t>(ed.v1)]);
        }
        field = std::move(fine);
      }
    }
    JacobiInput in = mesh_input(mesh, domain);
    if (a2 != nullptr) in.fields.a2 = field;
    const bool last = level == refinements;
    r.levels.push_back(run_level(in, m, mode, last ? &r.finest : nullptr));
  }
  finish(r);
  return r;
}

}  // namespace fbms
