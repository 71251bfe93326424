#pragma once

#include "fbms/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

namespace fbms::testing {

// Degree-4 six-point triangle rule (barycentric point, weight).
inline const std::array<std::pair<Vec3, double>, 6>& dunavant4() {
  static const std::array<std::pair<Vec3, double>, 6> rule = [] {
    const double a1 = 0.445948490915965, b1 = 0.108103018168070, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, b2 = 0.816847572980459, w2 = 0.109951743655322;
    return std::array<std::pair<Vec3, double>, 6>{{{Vec3(b1, a1, a1), w1},
                                                   {Vec3(a1, b1, a1), w1},
                                                   {Vec3(a1, a1, b1), w1},
                                                   {Vec3(b2, a2, a2), w2},
                                                   {Vec3(a2, b2, a2), w2},
                                                   {Vec3(a2, a2, b2), w2}}};
  }();
  return rule;
}

// Gradient of the linear interpolant in a local planar frame of the triangle.
inline Vec3 p1_gradient(const Vec3& p0, const Vec3& p1, const Vec3& p2, double f0, double f1, double f2) {
  const Vec3 e1 = (p1 - p0).normalized();
  const Vec3 n = (p1 - p0).cross(p2 - p0).normalized();
  const Vec3 e2 = n.cross(e1);
  Eigen::Matrix2d a;
  a << (p1 - p0).dot(e1), (p1 - p0).dot(e2), (p2 - p0).dot(e1), (p2 - p0).dot(e2);
  const Eigen::Vector2d g = a.inverse() * Eigen::Vector2d(f1 - f0, f2 - f0);
  return g[0] * e1 + g[1] * e2;
}

// Index form of the piecewise-linear phi by direct quadrature: interpolated
// |A|^2 on triangles, interpolated II(N,N) on boundary edges (3-point Gauss).
inline double quadrature_q(const TriSurfaceMesh& mesh, const std::vector<double>& a2,
                           const std::vector<double>& robin, const Eigen::VectorXd& phi) {
  double q = 0.0;
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Tri& t = mesh.triangle(f);
    const Vec3& p0 = mesh.vertex(t[0]);
    const Vec3& p1 = mesh.vertex(t[1]);
    const Vec3& p2 = mesh.vertex(t[2]);
    const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
    const Vec3 g = p1_gradient(p0, p1, p2, phi[t[0]], phi[t[1]], phi[t[2]]);
    q += area * g.squaredNorm();
    for (const auto& [b, w] : dunavant4()) {
      const double u = b[0] * phi[t[0]] + b[1] * phi[t[1]] + b[2] * phi[t[2]];
      const double pot = b[0] * a2[t[0]] + b[1] * a2[t[1]] + b[2] * a2[t[2]];
      q -= area * w * pot * u * u;
    }
  }
  const double gx = std::sqrt(0.6);
  const std::array<std::pair<double, double>, 3> gauss{{{-gx, 5.0 / 9.0}, {0.0, 8.0 / 9.0}, {gx, 5.0 / 9.0}}};
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (!mesh.edge_on_boundary(e)) continue;
    const int a = mesh.edge(e).v0;
    const int b = mesh.edge(e).v1;
    const double len = (mesh.vertex(a) - mesh.vertex(b)).norm();
    for (const auto& [x, w] : gauss) {
      const double s = 0.5 * (x + 1.0);
      const double u = (1 - s) * phi[a] + s * phi[b];
      const double r = (1 - s) * robin[static_cast<size_t>(a)] + s * robin[static_cast<size_t>(b)];
      q -= 0.5 * len * w * r * u * u;
    }
  }
  return q;
}

}  // namespace fbms::testing
