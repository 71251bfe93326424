#pragma once

#include "fbms/fields.hpp"
#include "fbms/homology.hpp"
#include "fbms/mesh.hpp"

#include <string>
#include <vector>

namespace fbms {

// Boundary condition of a discrete 1-form.
//  Tangential: i_nu w = 0 on dM (absolute condition), harmonic space H^1_N,
//              dimension dim H1(M).
//  Normal:     nu ^ w = 0 on dM (relative condition), harmonic space H^1_T,
//              dimension dim H1(M, dM); boundary-edge DOFs are 0.
enum class Flavor { Tangential, Normal };

std::string to_string(Flavor flavor);
// Accepts "tangential", "normal" and the long names
// "tangential_at_boundary", "normal_at_boundary". Throws Error{ParseError}.
Flavor parse_flavor(const std::string& text);

// One value per mesh edge (line integral along the canonical v0 -> v1
// orientation).
struct EdgeCochain {
  Flavor flavor = Flavor::Tangential;
  Eigen::VectorXd values;
};

// Pencil (L, M) on the active edges of a flavor: L = d1^T M2 d1 + M1 d0 M0^-1 d0^T M1
// with Whitney edge mass M1, lumped vertex mass M0 and M2 = diag(1/area).
// The normal flavor drops boundary edges and boundary vertices.
struct HodgePencil {
  Flavor flavor = Flavor::Tangential;
  SparseMatrix laplacian;
  SparseMatrix mass;
  SparseMatrix curl_part;        // d1^T M2 d1
  SparseMatrix divergence_part;  // M1 d0 M0^-1 d0^T M1
  std::vector<int> edges;        // mesh edge of each DOF
  std::vector<int> vertices;     // mesh vertex of each 0-form DOF
  int total_edges = 0;

  EdgeCochain expand(const Eigen::VectorXd& dofs) const;
  Eigen::VectorXd restrict(const EdgeCochain& w) const;
};

// Whitney mass on all edges: int W_e . W_f.
SparseMatrix whitney_mass(const TriSurfaceMesh& mesh);

HodgePencil hodge_laplacian_1(const TriSurfaceMesh& mesh, Flavor flavor);

struct HarmonicBasis {
  Flavor flavor = Flavor::Tangential;
  std::vector<EdgeCochain> forms;
  Eigen::MatrixXd gram;             // L2 Gram matrix of the forms
  Eigen::VectorXd eigenvalues;      // computed low spectrum of the pencil
  double largest_kernel = 0.0;      // largest eigenvalue counted as harmonic
  double gap = 0.0;                 // smallest eigenvalue not counted
  double threshold = 0.0;
  int homology_dimension = 0;
  std::vector<double> curl_energy;  // ||d w||^2 per form
  std::vector<double> divergence_energy;  // ||delta w||^2 per form
  std::vector<std::string> warnings;

  int dimension() const { return static_cast<int>(forms.size()); }
};

// Harmonic space of the flavor, checked against the homology dimension.
// Throws Error{DimensionMismatch} with the spectral gap in the message.
HarmonicBasis harmonic_basis(const TriSurfaceMesh& mesh, Flavor flavor);

// Vector proxy of w at triangle barycenters (Whitney interpolation).
std::vector<Vec3> barycenter_vectors(const TriSurfaceMesh& mesh, const EdgeCochain& w);
// Area-weighted average of the incident barycenter vectors.
std::vector<Vec3> vertex_vectors(const TriSurfaceMesh& mesh, const EdgeCochain& w);

// Pointwise |<w, nu>| / max |w| over boundary vertices with the discrete
// conormal; tends to 0 for tangential-flavor harmonic forms.
double conormal_contraction(const TriSurfaceMesh& mesh, const EdgeCochain& w);

// Longest run of consecutive boundary edges, as a fraction of its loop, on
// which |w| stays below `relative` * max |w|.
double boundary_vanishing_fraction(const TriSurfaceMesh& mesh, const EdgeCochain& w, double relative = 1e-6);

struct BochnerResult {
  double gradient_term = 0.0;   // int |grad w|^2
  double curvature_term = 0.0;  // int K |w|^2
  double lhs = 0.0;
  double rhs = 0.0;             // -int H |w|^2 (normal) or -int A(w, w) (tangential)
  double relative_residual = 0.0;
};

// Both sides of the Bochner boundary identity for a harmonic form. The
// covariant derivative comes from a least-squares quadratic fit of w over each
// triangle's vertex star, differentiated at the centroid; boundary values of
// |w| from linear fits over boundary vertex two-rings. K is the angle defect
// over mixed area; H^{dM} is read from fields.boundary_curvature.
// Throws Error{MissingGeometry}.
BochnerResult bochner_residuals(const TriSurfaceMesh& mesh, const SurfaceFields& fields, const EdgeCochain& w);

double relative_residual(double lhs, double rhs);

}  // namespace fbms
