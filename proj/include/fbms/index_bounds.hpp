#pragma once

#include "fbms/ambient.hpp"
#include "fbms/exemplars.hpp"
#include "fbms/hodge.hpp"
#include "fbms/homology.hpp"
#include "fbms/jacobi.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fbms {

// Pair order of the wedge coordinates: (12, 13, 23).
inline constexpr std::array<std::array<int, 2>, 3> kWedgePairs{{{0, 1}, {0, 2}, {1, 2}}};

// u_ij = <N ^ w, theta_i ^ theta_j> = (N.theta_i)(w.theta_j) - (N.theta_j)(w.theta_i).
// With the standard frame, (u_12, u_13, u_23) = ((N x w)_3, -(N x w)_2, (N x w)_1).
struct TestFunctionSet {
  Flavor flavor = Flavor::Tangential;
  Mat3 frame = Mat3::Identity();  // rows theta_1, theta_2, theta_3
  std::vector<Vec3> omega;        // vertex reconstruction of w
  std::array<Eigen::VectorXd, 3> u;
};

// Throws Error{InvalidInput} if the frame is not orthonormal or sizes differ.
TestFunctionSet build_test_functions(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal, const EdgeCochain& w,
                                     const Mat3& frame = Mat3::Identity());

// sum over pairs of Q(u_ij, u_ij).
double sum_q(const QuadraticFormAssembly& assembly, const TestFunctionSet& t);

// int over dM of w_a^T T w_b for per-vertex tensors T (P1 interpolation of w and T).
double boundary_tensor_integral(const TriSurfaceMesh& mesh, const std::vector<Vec3>& w, const std::vector<Mat3>& tensor);

struct Prop41Result {
  int part = 1;                      // 1: normal flavor, 2: tangential flavor
  double sum_q = 0.0;
  double boundary_integral = 0.0;    // the right-hand side (a negative number)
  double relative_residual = 0.0;
  // Proof identity: sum_q = int |grad w|^2 + K |w|^2 - int_dM II(N,N) |w|^2
  double identity_value = 0.0;
  double identity_residual = 0.0;
};

// Part (1) for the normal flavor: sum Q = -int H^{dOmega} |w|^2.
// Part (2) for the tangential flavor: sum Q = -int II(N,N) |w|^2 + II(w, w).
// Throws Error{MissingGeometry} when fields are incomplete.
Prop41Result prop41_check(const JacobiInput& input, const QuadraticFormAssembly& assembly, const EdgeCochain& w,
                          const AmbientDomain& domain, const Mat3& frame = Mat3::Identity());

// max over boundary vertices of |H^{dM} + II^{dOmega}(N,N) - H^{dOmega}|.
double boundary_algebra_residual(const TriSurfaceMesh& mesh, const SurfaceFields& fields, const AmbientDomain& domain);

struct BalancingMatrix {
  Eigen::MatrixXd matrix;            // rows: harmonic forms; columns: pair * k + q
  Eigen::VectorXd singular_values;
  int rank = 0;
  double smallest_singular = 0.0;    // 0 for an empty matrix
  double relative_smallest = 0.0;    // smallest / largest singular value
  int k = 0;
};

inline constexpr double kBalancingRankCutoff = 1e-8;

// Pairings int u_ij phi_q over the first k = spectrum.negative_count eigenfunctions.
BalancingMatrix balancing_rank(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal, const SparseMatrix& mass,
                               const HarmonicBasis& basis, const SpectralResult& spectrum,
                               const Mat3& frame = Mat3::Identity());

enum class VerdictStatus { Pass, Fail, NotApplicable };
std::string to_string(VerdictStatus status);

struct Verdict {
  std::string theorem;
  double bound = 0.0;        // real-valued bound
  int integer_bound = 0;     // ceil(bound)
  std::string hypothesis;
  bool hypothesis_satisfied = false;
  VerdictStatus status = VerdictStatus::NotApplicable;
  std::string note;
};

// Bounds at n = 2; `index` is the computed Morse index.
Verdict verdict_a(int index, int h1_relative, bool strictly_mean_convex);
Verdict verdict_b(int index, int boundary_components, bool strictly_mean_convex);
Verdict verdict_c(int index, int genus, int boundary_components, bool weakly_mean_convex);
Verdict verdict_f(int index, int h1_relative, double alpha, bool strictly_two_convex);

struct CertifyOptions {
  int resolution = 32;
  int refinements = 2;
  int m = 12;
  double alpha = 0.5;
  SolverMode mode = SolverMode::Auto;
  int convexity_samples = 2000;
  double convexity_margin = 1e-8;
};

struct HodgeSummary {
  Flavor flavor = Flavor::Tangential;
  int dimension = 0;
  int homology_dimension = 0;
  double gap = 0.0;
  double largest_kernel = 0.0;
  std::vector<std::string> warnings;
};

struct IndexCertificate {
  std::string surface;
  bool analytic_fields = false;
  int vertices = 0;           // base mesh
  Topology topology;
  HomologyProfile homology;
  ConvexityReport convexity;
  ConvexityCertificate hypotheses;
  MorseIndexReport morse;
  SpectralResult base_spectrum;
  int index = 0;
  std::vector<HodgeSummary> hodge;
  std::vector<Prop41Result> prop41_1;  // one per normal-flavor form
  std::vector<Prop41Result> prop41_2;  // one per tangential-flavor form
  std::vector<BochnerResult> bochner_1;
  std::vector<BochnerResult> bochner_2;
  std::optional<double> boundary_algebra;
  std::optional<BalancingMatrix> balancing;
  std::array<Verdict, 4> verdicts;     // A, B, C, F
  std::vector<std::string> errors;
  std::vector<std::pair<std::string, double>> timings;

  bool any_not_applicable() const;
  bool any_failed() const;
};

// Full pipeline on a sampled exemplar; `domain` replaces the exemplar's own.
IndexCertificate certify(const ExemplarSurface& exemplar, const AmbientDomain& domain, const CertifyOptions& options);
IndexCertificate certify(const ExemplarSurface& exemplar, const CertifyOptions& options);
// Full pipeline on a user mesh with fields estimated from the embedding
// (|A|^2 from `a2` when given).
IndexCertificate certify(const TriSurfaceMesh& mesh, const AmbientDomain& domain, const CertifyOptions& options,
                         const std::vector<double>* a2 = nullptr, const std::string& name = "mesh");

}  // namespace fbms
