#include "fbms/fields.hpp"

#include "fbms/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <set>

namespace fbms {

namespace {

double corner_angle(const TriSurfaceMesh& mesh, int f, int k) {
  const Tri& t = mesh.triangle(f);
  const Vec3& p = mesh.vertex(t[static_cast<size_t>(k)]);
  const Vec3& q = mesh.vertex(t[static_cast<size_t>((k + 1) % 3)]);
  const Vec3& r = mesh.vertex(t[static_cast<size_t>((k + 2) % 3)]);
  return angle_between(q - p, r - p);
}

std::vector<std::vector<int>> vertex_neighbours(const TriSurfaceMesh& mesh) {
  std::vector<std::vector<int>> nb(static_cast<size_t>(mesh.num_vertices()));
  for (const MeshEdge& e : mesh.edges()) {
    nb[static_cast<size_t>(e.v0)].push_back(e.v1);
    nb[static_cast<size_t>(e.v1)].push_back(e.v0);
  }
  return nb;
}

}  // namespace

std::vector<double> mixed_areas(const TriSurfaceMesh& mesh) {
  std::vector<double> area(static_cast<size_t>(mesh.num_vertices()), 0.0);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Tri& t = mesh.triangle(f);
    const double a = mesh.triangle_area(f);
    std::array<double, 3> ang{};
    for (int k = 0; k < 3; ++k) ang[static_cast<size_t>(k)] = corner_angle(mesh, f, k);
    const double right = 0.5 * std::numbers::pi;
    const bool obtuse = ang[0] > right || ang[1] > right || ang[2] > right;
    for (int k = 0; k < 3; ++k) {
      const auto v = static_cast<size_t>(t[static_cast<size_t>(k)]);
      if (obtuse) {
        area[v] += ang[static_cast<size_t>(k)] > right ? 0.5 * a : 0.25 * a;
        continue;
      }
      const Vec3& p = mesh.vertex(t[static_cast<size_t>(k)]);
      const Vec3& q = mesh.vertex(t[static_cast<size_t>((k + 1) % 3)]);
      const Vec3& r = mesh.vertex(t[static_cast<size_t>((k + 2) % 3)]);
      const double cot_q = 1.0 / std::tan(ang[static_cast<size_t>((k + 1) % 3)]);
      const double cot_r = 1.0 / std::tan(ang[static_cast<size_t>((k + 2) % 3)]);
      area[v] += 0.125 * ((r - p).squaredNorm() * cot_q + (q - p).squaredNorm() * cot_r);
    }
  }
  return area;
}

std::vector<double> angle_defect_curvature(const TriSurfaceMesh& mesh) {
  const auto n = static_cast<size_t>(mesh.num_vertices());
  std::vector<double> angle_sum(n, 0.0);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    for (int k = 0; k < 3; ++k) {
      angle_sum[static_cast<size_t>(mesh.triangle(f)[static_cast<size_t>(k)])] += corner_angle(mesh, f, k);
    }
  }
  const std::vector<double> area = mixed_areas(mesh);
  std::vector<double> k(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    if (!mesh.vertex_on_boundary(static_cast<int>(v))) {
      k[v] = (2.0 * std::numbers::pi - angle_sum[v]) / area[v];
    }
  }
  const auto nb = vertex_neighbours(mesh);
  for (size_t v = 0; v < n; ++v) {
    if (!mesh.vertex_on_boundary(static_cast<int>(v))) continue;
    double sum = 0.0;
    int count = 0;
    for (int w : nb[v]) {
      if (mesh.vertex_on_boundary(w)) continue;
      sum += k[static_cast<size_t>(w)];
      ++count;
    }
    k[v] = count > 0 ? sum / count : 0.0;
  }
  return k;
}

std::vector<double> turning_angle_curvature(const TriSurfaceMesh& mesh) {
  const auto n = static_cast<size_t>(mesh.num_vertices());
  std::vector<double> angle_sum(n, 0.0);
  std::vector<double> dual(n, 0.0);
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    for (int k = 0; k < 3; ++k) {
      angle_sum[static_cast<size_t>(mesh.triangle(f)[static_cast<size_t>(k)])] += corner_angle(mesh, f, k);
    }
  }
  for (const MeshEdge& e : mesh.edges()) {
    if (!e.on_boundary()) continue;
    const double half = 0.5 * (mesh.vertex(e.v1) - mesh.vertex(e.v0)).norm();
    dual[static_cast<size_t>(e.v0)] += half;
    dual[static_cast<size_t>(e.v1)] += half;
  }
  std::vector<double> kg(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    if (mesh.vertex_on_boundary(static_cast<int>(v))) kg[v] = (std::numbers::pi - angle_sum[v]) / dual[v];
  }
  return kg;
}

std::vector<double> quadric_a2(const TriSurfaceMesh& mesh) {
  const auto n = static_cast<size_t>(mesh.num_vertices());
  const auto nb = vertex_neighbours(mesh);
  std::vector<double> a2(n, 0.0);
  for (size_t v = 0; v < n; ++v) {
    // two-ring, grown (up to four rings) until a cubic fit is determined
    std::set<int> ring(nb[v].begin(), nb[v].end());
    for (int grow = 0; grow < 3 && (grow < 1 || ring.size() < 13); ++grow) {
      const std::set<int> current = ring;
      for (int w : current) ring.insert(nb[static_cast<size_t>(w)].begin(), nb[static_cast<size_t>(w)].end());
    }
    ring.erase(static_cast<int>(v));
    const Vec3& nrm = mesh.vertex_normals()[v];
    const Vec3 t1 = any_orthonormal(nrm);
    const Vec3 t2 = nrm.cross(t1);
    const Vec3& o = mesh.vertex(static_cast<int>(v));
    // cubic height function when the ring is large enough, else quadratic
    const int cols = ring.size() >= 12 ? 9 : 5;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(ring.size()), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(ring.size()));
    Eigen::Index row = 0;
    for (int w : ring) {
      const Vec3 d = mesh.vertex(w) - o;
      const double x = d.dot(t1);
      const double y = d.dot(t2);
      a(row, 0) = x * x;
      a(row, 1) = x * y;
      a(row, 2) = y * y;
      a(row, 3) = x;
      a(row, 4) = y;
      if (cols == 9) {
        a(row, 5) = x * x * x;
        a(row, 6) = x * x * y;
        a(row, 7) = x * y * y;
        a(row, 8) = y * y * y;
      }
      b[row] = d.dot(nrm);
      ++row;
    }
    if (row < 5) continue;
    const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
    const Eigen::Vector2d g(c[3], c[4]);
    Eigen::Matrix2d hess;
    hess << 2.0 * c[0], c[1], c[1], 2.0 * c[2];
    const Eigen::Matrix2d metric = Eigen::Matrix2d::Identity() + g * g.transpose();
    const Eigen::Matrix2d shape = metric.inverse() * hess / std::sqrt(1.0 + g.squaredNorm());
    a2[v] = (shape * shape).trace();
  }
  return a2;
}

SurfaceFields discrete_fields(const TriSurfaceMesh& mesh) {
  SurfaceFields f;
  f.a2 = quadric_a2(mesh);
  f.normal = mesh.vertex_normals();
  f.gauss = angle_defect_curvature(mesh);
  f.boundary_curvature = turning_angle_curvature(mesh);
  f.analytic = false;
  return f;
}

std::vector<double> robin_coefficients(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal,
                                       const AmbientDomain& domain, double tolerance) {
  if (normal.size() != static_cast<size_t>(mesh.num_vertices())) {
    throw Error(ErrorKind::MissingField, "normal field size does not match vertex count");
  }
  std::vector<double> robin(normal.size(), 0.0);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    const BoundaryGeometry g = boundary_geometry(domain, mesh.vertex(v), tolerance);
    const Vec3& nv = normal[static_cast<size_t>(v)];
    robin[static_cast<size_t>(v)] = g.second_form_at(nv, nv);
  }
  return robin;
}

SurfaceFields rotate_fields(const SurfaceFields& fields, const Mat3& rotation) {
  SurfaceFields out = fields;
  for (Vec3& nv : out.normal) nv = rotation * nv;
  return out;
}

}  // namespace fbms
