#include "fbms/hodge.hpp"

#include "fbms/ambient.hpp"
#include "fbms/eigensolver.hpp"
#include "fbms/errors.hpp"
#include "fbms/parallel.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace fbms {

namespace {

// Dense pencils up to this many DOFs; shift-invert iteration beyond.
constexpr Eigen::Index kDenseDofLimit = 1500;
// Eigenvalues below this fraction of the pencil scale are kernel candidates.
constexpr double kKernelCandidate = 1e-6;
constexpr int kGradientDegree = 2;  // quadratic fit, differentiated at the centroid
constexpr int kBoundaryDegree = 1;

struct TriangleFrame {
  double area = 0.0;
  std::array<Vec3, 3> grad;  // gradients of the barycentric coordinates
};

TriangleFrame triangle_frame(const TriSurfaceMesh& mesh, int f) {
  const Tri& t = mesh.triangle(f);
  const Vec3& p0 = mesh.vertex(t[0]);
  const Vec3& p1 = mesh.vertex(t[1]);
  const Vec3& p2 = mesh.vertex(t[2]);
  const Vec3 cr = (p1 - p0).cross(p2 - p0);
  TriangleFrame fr;
  fr.area = 0.5 * cr.norm();
  if (!(fr.area > 0.0)) throw Error(ErrorKind::NegativeTriangleArea, "triangle " + std::to_string(f) + " is degenerate");
  const Vec3 n = cr / (2.0 * fr.area);
  fr.grad = {n.cross(p2 - p1) / (2.0 * fr.area), n.cross(p0 - p2) / (2.0 * fr.area), n.cross(p1 - p0) / (2.0 * fr.area)};
  return fr;
}

Eigen::Matrix3d whitney_local(const TriangleFrame& fr) {
  // local edge k runs from corner k to corner k+1
  auto moment = [&](int a, int b) { return fr.area * (a == b ? 2.0 : 1.0) / 12.0; };
  auto g = [&](int a) -> const Vec3& { return fr.grad[static_cast<size_t>(a)]; };
  Eigen::Matrix3d m;
  for (int e = 0; e < 3; ++e) {
    const int i = e, j = (e + 1) % 3;
    for (int h = 0; h < 3; ++h) {
      const int k = h, l = (h + 1) % 3;
      m(e, h) = moment(i, k) * g(j).dot(g(l)) - moment(i, l) * g(j).dot(g(k)) - moment(j, k) * g(i).dot(g(l)) +
                moment(j, l) * g(i).dot(g(k));
    }
  }
  return m;
}

SparseMatrix select(const SparseMatrix& a, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> row_map(static_cast<size_t>(a.rows()), -1), col_map(static_cast<size_t>(a.cols()), -1);
  for (size_t i = 0; i < rows.size(); ++i) row_map[static_cast<size_t>(rows[i])] = static_cast<int>(i);
  for (size_t i = 0; i < cols.size(); ++i) col_map[static_cast<size_t>(cols[i])] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int r = row_map[static_cast<size_t>(it.row())];
      const int c = col_map[static_cast<size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

void check_cochain(const TriSurfaceMesh& mesh, const EdgeCochain& w) {
  if (w.values.size() != mesh.num_edges()) {
    throw Error(ErrorKind::InvalidInput, "cochain has " + std::to_string(w.values.size()) + " values for " +
                                             std::to_string(mesh.num_edges()) + " edges");
  }
}

// Polynomial 1-form (w1, w2)(y) of total degree `degree` in a tangent frame at
// x0, fitted to the edge values of `faces` by least squares. Line integrals use
// Simpson's rule, which is exact for the fitted fields up to degree 3.
struct LinearFit {
  Eigen::Vector2d a;  // value at x0
  Eigen::Matrix2d b;  // b(i, j) = d w_i / d y_j at x0
  Vec3 e1, e2;
  Vec3 vector() const { return a[0] * e1 + a[1] * e2; }
};

LinearFit fit_form(const TriSurfaceMesh& mesh, const EdgeCochain& w, const Vec3& x0, const Vec3& normal,
                   const std::set<int>& faces, int degree = 1) {
  LinearFit fit;
  const Vec3 e1 = any_orthonormal(normal);
  const Vec3 e2 = normal.cross(e1);
  fit.e1 = e1;
  fit.e2 = e2;
  std::vector<std::pair<int, int>> powers;  // monomials y1^i y2^j, constant and linear first
  for (int d = 0; d <= degree; ++d) {
    for (int j = 0; j <= d; ++j) powers.emplace_back(d - j, j);
  }
  const auto nm = static_cast<Eigen::Index>(powers.size());
  std::set<int> edges;
  for (int f : faces) {
    for (int e : mesh.face_edges(f)) edges.insert(e);
  }
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(edges.size()), 2 * nm);
  Eigen::VectorXd rhs(rows.rows());
  Eigen::Index r = 0;
  for (int e : edges) {
    const Vec3 pa = mesh.vertex(mesh.edge(e).v0) - x0;
    const Vec3 pb = mesh.vertex(mesh.edge(e).v1) - x0;
    const Vec3 t = pb - pa;
    const std::array<Eigen::Vector2d, 3> y{Eigen::Vector2d(pa.dot(e1), pa.dot(e2)),
                                           Eigen::Vector2d(0.5 * (pa + pb).dot(e1), 0.5 * (pa + pb).dot(e2)),
                                           Eigen::Vector2d(pb.dot(e1), pb.dot(e2))};
    for (Eigen::Index k = 0; k < nm; ++k) {
      const auto [i, j] = powers[static_cast<size_t>(k)];
      auto mono = [&](const Eigen::Vector2d& q) { return std::pow(q[0], i) * std::pow(q[1], j); };
      const double avg = (mono(y[0]) + 4.0 * mono(y[1]) + mono(y[2])) / 6.0;
      rows(r, k) = avg * t.dot(e1);
      rows(r, nm + k) = avg * t.dot(e2);
    }
    rhs[r++] = w.values[e];
  }
  const Eigen::VectorXd sol = rows.colPivHouseholderQr().solve(rhs);
  fit.a << sol[0], sol[nm];
  fit.b << sol[1], sol[2], sol[nm + 1], sol[nm + 2];
  return fit;
}

std::set<int> face_star(const TriSurfaceMesh& mesh, const std::vector<int>& vertices) {
  std::set<int> out;
  for (int v : vertices) {
    for (int f : mesh.vertex_faces(v)) out.insert(f);
  }
  return out;
}

}  // namespace

std::string to_string(Flavor flavor) { return flavor == Flavor::Normal ? "normal" : "tangential"; }

Flavor parse_flavor(const std::string& text) {
  if (text == "normal" || text == "normal_at_boundary") return Flavor::Normal;
  if (text == "tangential" || text == "tangential_at_boundary") return Flavor::Tangential;
  throw Error(ErrorKind::ParseError, "unknown flavor '" + text + "' (expected normal or tangential)");
}

EdgeCochain HodgePencil::expand(const Eigen::VectorXd& dofs) const {
  EdgeCochain w;
  w.flavor = flavor;
  w.values = Eigen::VectorXd::Zero(total_edges);
  for (size_t i = 0; i < edges.size(); ++i) w.values[edges[i]] = dofs[static_cast<Eigen::Index>(i)];
  return w;
}

Eigen::VectorXd HodgePencil::restrict(const EdgeCochain& w) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(edges.size()));
  for (size_t i = 0; i < edges.size(); ++i) out[static_cast<Eigen::Index>(i)] = w.values[edges[i]];
  return out;
}

SparseMatrix whitney_mass(const TriSurfaceMesh& mesh) {
  const int nf = mesh.num_triangles();
  std::vector<Eigen::Matrix3d> local(static_cast<size_t>(nf));
  parallel_for(nf, [&](int f) { local[static_cast<size_t>(f)] = whitney_local(triangle_frame(mesh, f)); });
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(9 * static_cast<size_t>(nf));
  for (int f = 0; f < nf; ++f) {
    const auto& fe = mesh.face_edges(f);
    const auto& fs = mesh.face_edge_signs(f);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        t.emplace_back(fe[static_cast<size_t>(a)], fe[static_cast<size_t>(b)],
                       fs[static_cast<size_t>(a)] * fs[static_cast<size_t>(b)] * local[static_cast<size_t>(f)](a, b));
      }
    }
  }
  SparseMatrix m(mesh.num_edges(), mesh.num_edges());
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

HodgePencil hodge_laplacian_1(const TriSurfaceMesh& mesh, Flavor flavor) {
  HodgePencil p;
  p.flavor = flavor;
  p.total_edges = mesh.num_edges();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (flavor == Flavor::Tangential || !mesh.edge_on_boundary(e)) p.edges.push_back(e);
  }
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (flavor == Flavor::Tangential || !mesh.vertex_on_boundary(v)) p.vertices.push_back(v);
  }
  std::vector<int> faces(static_cast<size_t>(mesh.num_triangles()));
  for (int f = 0; f < mesh.num_triangles(); ++f) faces[static_cast<size_t>(f)] = f;

  const SparseMatrix m1 = select(whitney_mass(mesh), p.edges, p.edges);
  const SparseMatrix d0 = select(coboundary0(mesh), p.edges, p.vertices);
  const SparseMatrix d1 = select(coboundary1(mesh), faces, p.edges);
  Eigen::VectorXd m0 = Eigen::VectorXd::Zero(mesh.num_vertices());
  Eigen::VectorXd inv_area(mesh.num_triangles());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const double a = mesh.triangle_area(f);
    inv_area[f] = 1.0 / a;
    for (int v : mesh.triangle(f)) m0[v] += a / 3.0;
  }
  Eigen::VectorXd inv_m0(static_cast<Eigen::Index>(p.vertices.size()));
  for (size_t i = 0; i < p.vertices.size(); ++i) inv_m0[static_cast<Eigen::Index>(i)] = 1.0 / m0[p.vertices[i]];

  p.mass = m1;
  p.curl_part = SparseMatrix(d1.transpose() * inv_area.asDiagonal() * d1);
  const SparseMatrix md0 = m1 * d0;
  p.divergence_part = SparseMatrix(md0 * inv_m0.asDiagonal() * md0.transpose());
  p.laplacian = p.curl_part + p.divergence_part;
  p.laplacian = SparseMatrix(0.5 * (p.laplacian + SparseMatrix(p.laplacian.transpose())));
  p.laplacian.makeCompressed();
  return p;
}

HarmonicBasis harmonic_basis(const TriSurfaceMesh& mesh, Flavor flavor) {
  const HomologyProfile h = homology_profile(mesh);
  HarmonicBasis out;
  out.flavor = flavor;
  out.homology_dimension = flavor == Flavor::Normal ? h.h1_relative : h.h1;
  const HodgePencil p = hodge_laplacian_1(mesh, flavor);
  const Eigen::Index n = p.laplacian.rows();
  if (n == 0) {
    if (out.homology_dimension != 0) throw Error(ErrorKind::DimensionMismatch, "empty pencil with nonzero homology");
    out.gram = Eigen::MatrixXd(0, 0);
    return out;
  }

  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, p.laplacian.coeff(i, i) / p.mass.coeff(i, i));
  const int nev = static_cast<int>(std::min<Eigen::Index>(out.homology_dimension + 4, n));
  const EigenResult eig = n <= kDenseDofLimit ? dense_smallest(p.laplacian, p.mass, nev)
                                              : iterative_smallest(p.laplacian, p.mass, nev);
  out.eigenvalues = eig.values;

  int candidates = 0;
  while (candidates < eig.values.size() && eig.values[candidates] <= kKernelCandidate * scale) ++candidates;
  out.largest_kernel = candidates > 0 ? std::max(eig.values[candidates - 1], 0.0) : 0.0;
  out.gap = candidates < eig.values.size() ? eig.values[candidates] : std::numeric_limits<double>::infinity();
  const double floor = std::numeric_limits<double>::epsilon() * scale;
  out.threshold = std::isfinite(out.gap) ? std::sqrt(std::max(out.largest_kernel, floor) * out.gap)
                                         : kKernelCandidate * scale;
  int count = 0;
  while (count < eig.values.size() && eig.values[count] < out.threshold) ++count;
  if (count != out.homology_dimension) {
    std::ostringstream msg;
    msg << to_string(flavor) << " harmonic space has spectral dimension " << count << " but homology dimension "
        << out.homology_dimension << " (largest kernel eigenvalue " << out.largest_kernel << ", gap " << out.gap
        << ", threshold " << out.threshold << ")";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }

  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x = eig.vectors.col(i);
    Eigen::Index imax = 0;
    x.cwiseAbs().maxCoeff(&imax);
    if (x[imax] < 0) x = -x;  // deterministic sign
    out.curl_energy.push_back(x.dot(p.curl_part * x));
    out.divergence_energy.push_back(x.dot(p.divergence_part * x));
    out.forms.push_back(p.expand(x));
  }
  out.gram.resize(count, count);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) {
      out.gram(i, j) = p.restrict(out.forms[static_cast<size_t>(i)]).dot(p.mass * p.restrict(out.forms[static_cast<size_t>(j)]));
    }
  }
  for (size_t i = 0; i < out.forms.size(); ++i) {
    const double frac = boundary_vanishing_fraction(mesh, out.forms[i]);
    if (frac >= 0.1) {
      std::ostringstream msg;
      msg << "form " << i << " vanishes on " << frac * 100.0 << "% of a boundary loop";
      out.warnings.push_back(msg.str());
    }
  }
  return out;
}

std::vector<Vec3> barycenter_vectors(const TriSurfaceMesh& mesh, const EdgeCochain& w) {
  check_cochain(mesh, w);
  std::vector<Vec3> out(static_cast<size_t>(mesh.num_triangles()), Vec3::Zero());
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const TriangleFrame fr = triangle_frame(mesh, f);
    const auto& fe = mesh.face_edges(f);
    const auto& fs = mesh.face_edge_signs(f);
    Vec3 v = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      const double value = fs[static_cast<size_t>(k)] * w.values[fe[static_cast<size_t>(k)]];
      v += value * (fr.grad[static_cast<size_t>((k + 1) % 3)] - fr.grad[static_cast<size_t>(k)]) / 3.0;
    }
    out[static_cast<size_t>(f)] = v;
  }
  return out;
}

std::vector<Vec3> vertex_vectors(const TriSurfaceMesh& mesh, const EdgeCochain& w) {
  const std::vector<Vec3> bary = barycenter_vectors(mesh, w);
  std::vector<Vec3> out(static_cast<size_t>(mesh.num_vertices()), Vec3::Zero());
  std::vector<double> weight(static_cast<size_t>(mesh.num_vertices()), 0.0);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const double a = mesh.triangle_area(f);
    for (int v : mesh.triangle(f)) {
      out[static_cast<size_t>(v)] += a * bary[static_cast<size_t>(f)];
      weight[static_cast<size_t>(v)] += a;
    }
  }
  for (size_t v = 0; v < out.size(); ++v) out[v] /= weight[v];
  return out;
}

double conormal_contraction(const TriSurfaceMesh& mesh, const EdgeCochain& w) {
  const std::vector<Vec3> vec = vertex_vectors(mesh, w);
  const std::vector<Vec3> nu = discrete_conormals(mesh);
  double top = 0.0, worst = 0.0;
  for (const Vec3& v : vec) top = std::max(top, v.norm());
  if (!(top > 0.0)) return 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (mesh.vertex_on_boundary(v)) worst = std::max(worst, std::abs(vec[static_cast<size_t>(v)].dot(nu[static_cast<size_t>(v)])));
  }
  return worst / top;
}

double boundary_vanishing_fraction(const TriSurfaceMesh& mesh, const EdgeCochain& w, double relative) {
  const std::vector<Vec3> vec = vertex_vectors(mesh, w);
  double top = 0.0;
  for (const Vec3& v : vec) top = std::max(top, v.norm());
  if (!(top > 0.0)) return 1.0;
  double worst = 0.0;
  for (const auto& loop : mesh.boundary_loops()) {
    const size_t n = loop.size();
    auto small = [&](size_t i) {
      const Vec3& a = vec[static_cast<size_t>(loop[i % n])];
      const Vec3& b = vec[static_cast<size_t>(loop[(i + 1) % n])];
      return std::max(a.norm(), b.norm()) < relative * top;
    };
    size_t best = 0, run = 0;
    for (size_t i = 0; i < 2 * n; ++i) {  // twice around to catch wrapping runs
      run = small(i) ? run + 1 : 0;
      best = std::max(best, std::min(run, n));
    }
    worst = std::max(worst, static_cast<double>(best) / static_cast<double>(n));
  }
  return worst;
}

double relative_residual(double lhs, double rhs) {
  const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return std::abs(lhs - rhs) / denom;
}

BochnerResult bochner_residuals(const TriSurfaceMesh& mesh, const SurfaceFields& fields, const EdgeCochain& w) {
  check_cochain(mesh, w);
  const auto nv = static_cast<size_t>(mesh.num_vertices());
  if (fields.boundary_curvature.size() != nv) {
    throw Error(ErrorKind::MissingGeometry, "boundary curvature field is missing");
  }
  BochnerResult r;
  const std::vector<double> gauss = angle_defect_curvature(mesh);
  const int nf = mesh.num_triangles();
  std::vector<double> grad(static_cast<size_t>(nf)), curv(static_cast<size_t>(nf));
  parallel_for(nf, [&](int f) {
    const Tri& t = mesh.triangle(f);
    const LinearFit fit = fit_form(mesh, w, mesh.triangle_centroid(f), mesh.triangle_normal(f),
                                   face_star(mesh, {t[0], t[1], t[2]}), kGradientDegree);
    const double area = mesh.triangle_area(f);
    const double k = (gauss[static_cast<size_t>(t[0])] + gauss[static_cast<size_t>(t[1])] +
                      gauss[static_cast<size_t>(t[2])]) / 3.0;
    grad[static_cast<size_t>(f)] = area * fit.b.squaredNorm();
    curv[static_cast<size_t>(f)] = area * k * fit.a.squaredNorm();
  }, 64);
  for (int f = 0; f < nf; ++f) {
    r.gradient_term += grad[static_cast<size_t>(f)];
    r.curvature_term += curv[static_cast<size_t>(f)];
  }
  r.lhs = r.gradient_term + r.curvature_term;

  const auto& hb = fields.boundary_curvature;
  if (w.flavor == Flavor::Tangential) {
    // A^{dM}(w, w) = H |w|^2 on a boundary curve; w_e^2 / |e| ~ |w|^2 |e|
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (!mesh.edge_on_boundary(e)) continue;
      const int a = mesh.edge(e).v0, b = mesh.edge(e).v1;
      const double len = (mesh.vertex(b) - mesh.vertex(a)).norm();
      const double h = 0.5 * (hb[static_cast<size_t>(a)] + hb[static_cast<size_t>(b)]);
      r.rhs -= h * w.values[e] * w.values[e] / len;
    }
  } else {
    std::vector<Vec3> vec(nv, Vec3::Zero());
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (!mesh.vertex_on_boundary(v)) continue;
      const std::set<int> ring = face_star(mesh, {v});
      std::vector<int> ring_vertices;
      Vec3 normal = Vec3::Zero();
      for (int f : ring) {
        normal += mesh.triangle_normal(f);
        for (int u : mesh.triangle(f)) ring_vertices.push_back(u);
      }
      const LinearFit fit = fit_form(mesh, w, mesh.vertex(v), normal.normalized(), face_star(mesh, ring_vertices),
                                     kBoundaryDegree);
      vec[static_cast<size_t>(v)] = fit.vector();
    }
    // P1 boundary mass weighted by H, applied to each component
    for (const auto& loop : mesh.boundary_loops()) {
      for (size_t i = 0; i < loop.size(); ++i) {
        const auto a = static_cast<size_t>(loop[i]);
        const auto b = static_cast<size_t>(loop[(i + 1) % loop.size()]);
        const double len = (mesh.vertex(loop[(i + 1) % loop.size()]) - mesh.vertex(loop[i])).norm();
        r.rhs -= len / 12.0 *
                 ((3.0 * hb[a] + hb[b]) * vec[a].squaredNorm() + (hb[a] + 3.0 * hb[b]) * vec[b].squaredNorm() +
                  2.0 * (hb[a] + hb[b]) * vec[a].dot(vec[b]));
      }
    }
  }
  r.relative_residual = relative_residual(r.lhs, r.rhs);
  return r;
}

}  // namespace fbms
