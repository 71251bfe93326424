#pragma once

#include "fbms/ambient.hpp"
#include "fbms/eigensolver.hpp"
#include "fbms/exemplars.hpp"
#include "fbms/fields.hpp"
#include "fbms/mesh.hpp"
#include "fbms/parallel.hpp"

#include <string>
#include <vector>

namespace fbms {

// Piecewise-linear discretization of the index form
//   Q(phi, phi) = int |grad phi|^2 - |A|^2 phi^2 - int_{dM} II(N,N) phi^2.
// |A|^2 and II(N,N) are interpolated linearly and integrated exactly.
struct QuadraticFormAssembly {
  SparseMatrix stiffness;  // cotangent stiffness
  SparseMatrix potential;  // int |A|^2 phi psi
  SparseMatrix s;          // stiffness - potential
  SparseMatrix robin;      // boundary term, supported on boundary vertices
  SparseMatrix mass;       // consistent P1 mass

  SparseMatrix form() const { return s - robin; }
  double q(const Eigen::VectorXd& phi) const;
  double q(const Eigen::VectorXd& phi, const Eigen::VectorXd& psi) const;
};

// Per-vertex |A|^2 and per-vertex II(N,N) (read at boundary vertices only).
// Uses FBMS_THREADS worker threads for the per-triangle work; the result does
// not depend on the thread count. Throws Error{MissingField, NegativeTriangleArea}.
QuadraticFormAssembly assemble(const TriSurfaceMesh& mesh, const std::vector<double>& potential,
                               const std::vector<double>& robin);

enum class SolverMode { Auto, Dense, Iterative };
std::string to_string(SolverMode mode);

// Meshes below this many vertices are always solved densely in Auto mode.
inline constexpr int kDenseVertexLimit = 2000;

struct SpectralResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // mass-orthonormal
  Eigen::VectorXd residuals;
  int negative_count = 0;
  double zero_threshold = 0.0;   // eigenvalues below -zero_threshold are negative
  SolverMode mode = SolverMode::Dense;
  int iterations = 0;
  double shift = 0.0;
};

// Relative tolerance defining "negative": lambda < -1e-8 * max |lambda|.
inline constexpr double kZeroThresholdFactor = 1e-8;

SpectralResult solve_spectrum(const QuadraticFormAssembly& assembly, int m, SolverMode mode = SolverMode::Auto,
                              const IterativeOptions& options = {});

// Minimum of the Rayleigh quotient over the mass-orthogonal complement of the
// first k eigenvectors of `spectrum`.
double rayleigh_min_orthogonal(const QuadraticFormAssembly& assembly, const SpectralResult& spectrum, int k,
                               SolverMode mode = SolverMode::Auto);
// Same with an explicit deflation basis (columns need not be orthonormal).
double rayleigh_min_orthogonal(const QuadraticFormAssembly& assembly, const Eigen::MatrixXd& deflation,
                               SolverMode mode = SolverMode::Auto);

// Mesh with the fields needed for the index form.
struct JacobiInput {
  TriSurfaceMesh mesh;
  SurfaceFields fields;
  std::vector<double> robin;  // II(N,N) at boundary vertices
};

// Analytic fields; II(N,N) from `domain` when given, else the exemplar's own.
JacobiInput exemplar_input(const ExemplarSurface& exemplar, const TriSurfaceMesh& mesh,
                           const AmbientDomain* domain = nullptr);
// Fields estimated from the embedding; the domain supplies II(N,N) using the
// discrete vertex normals.
JacobiInput mesh_input(const TriSurfaceMesh& mesh, const AmbientDomain& domain);

struct IndexLevel {
  int vertices = 0;
  int negative_count = 0;
  double lambda1 = 0.0;
  double seconds = 0.0;
  SolverMode mode = SolverMode::Dense;
};

struct MorseIndexReport {
  int index = 0;                 // count at the finest level
  bool stable = true;            // last two levels agree
  std::vector<IndexLevel> levels;
  SpectralResult finest;
};

// Index of a sampled exemplar at `resolution` and `refinements` further
// midpoint refinements (analytic fields re-evaluated at every level). A given
// domain replaces the exemplar's own for the Robin coefficient.
MorseIndexReport morse_index(const ExemplarSurface& exemplar, int resolution, int refinements, int m,
                             SolverMode mode = SolverMode::Auto, const AmbientDomain* domain = nullptr);
// Index of a user mesh; refined boundary vertices are projected onto the
// domain. A supplied |A|^2 field is interpolated linearly onto refined
// vertices; without one, |A|^2 is estimated on every level.
MorseIndexReport morse_index(const TriSurfaceMesh& mesh, const AmbientDomain& domain, int refinements, int m,
                             SolverMode mode = SolverMode::Auto,
                             const std::vector<double>* a2 = nullptr);

}  // namespace fbms
