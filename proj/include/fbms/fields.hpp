#pragma once

#include "fbms/ambient.hpp"
#include "fbms/mesh.hpp"

#include <vector>

namespace fbms {

// Per-vertex geometric data consumed by the spectral and Hodge stages.
struct SurfaceFields {
  std::vector<double> a2;                  // |A|^2
  std::vector<Vec3> normal;                // unit surface normal N
  std::vector<double> gauss;               // Gauss curvature K
  std::vector<double> boundary_curvature;  // geodesic curvature of dM (boundary vertices; 0 elsewhere)
  bool analytic = false;                   // false: estimated from the embedding
};

// Mixed (Voronoi, with obtuse-triangle fallback) vertex areas.
std::vector<double> mixed_areas(const TriSurfaceMesh& mesh);

// Angle defect over mixed area. Boundary vertices have no intrinsic defect and
// take the mean of their interior neighbours (0 if there are none).
std::vector<double> angle_defect_curvature(const TriSurfaceMesh& mesh);

// Boundary turning angle (pi minus the interior angle sum) divided by half the
// length of the two incident boundary edges; 0 at interior vertices.
std::vector<double> turning_angle_curvature(const TriSurfaceMesh& mesh);

// |A|^2 from a least-squares quadric height fit over each vertex's two-ring,
// in the frame of the vertex normal.
std::vector<double> quadric_a2(const TriSurfaceMesh& mesh);

// All fields estimated from the embedding alone; analytic = false.
SurfaceFields discrete_fields(const TriSurfaceMesh& mesh);

// Robin coefficient II(N, N) of the domain boundary at every boundary vertex,
// 0 at interior vertices. Throws Error{NotOnBoundary} if a boundary vertex is
// off the domain boundary by more than `tolerance` (relative).
std::vector<double> robin_coefficients(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal,
                                       const AmbientDomain& domain, double tolerance = 1e-6);

// Rotates normals along with a rigid motion of the mesh.
SurfaceFields rotate_fields(const SurfaceFields& fields, const Mat3& rotation);

}  // namespace fbms
