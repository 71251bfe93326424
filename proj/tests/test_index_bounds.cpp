#include "corpus.hpp"
#include "doctest.h"

#include "fbms/errors.hpp"
#include "fbms/index_bounds.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>
#include <random>

using namespace fbms;
using namespace fbms::testing;

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

struct CatenoidCase {
  JacobiInput input;
  QuadraticFormAssembly assembly;
  HarmonicBasis normal;
  HarmonicBasis tangential;
};

CatenoidCase catenoid_case(int res) {
  const ExemplarSurface cat = critical_catenoid();
  CatenoidCase c{exemplar_input(cat, sample_mesh(cat, res)), {}, {}, {}};
  c.assembly = assemble(c.input.mesh, c.input.fields.a2, c.input.robin);
  c.normal = harmonic_basis(c.input.mesh, Flavor::Normal);
  c.tangential = harmonic_basis(c.input.mesh, Flavor::Tangential);
  return c;
}

}  // namespace

TEST_CASE("wedge coordinates of a constant form on the flat disk") {
  const TriSurfaceMesh mesh = fan_disk(16);
  const std::vector<Vec3> normal(mesh.num_vertices(), Vec3(0, 0, 1));
  EdgeCochain dx;
  dx.values.resize(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    dx.values[e] = mesh.vertex(mesh.edge(e).v1).x() - mesh.vertex(mesh.edge(e).v0).x();
  }
  const TestFunctionSet t = build_test_functions(mesh, normal, dx);
  // N ^ dx = e3 ^ e1 = -theta_1 ^ theta_3
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    CHECK(t.u[0][v] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(t.u[1][v] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(t.u[2][v] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("test functions: Lagrange identity and frame checks") {
  const CatenoidCase c = catenoid_case(16);
  const TriSurfaceMesh& mesh = c.input.mesh;
  const TestFunctionSet t = build_test_functions(mesh, c.input.fields.normal, c.normal.forms[0]);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const double sum = t.u[0][v] * t.u[0][v] + t.u[1][v] * t.u[1][v] + t.u[2][v] * t.u[2][v];
    CHECK(sum == doctest::Approx(c.input.fields.normal[v].cross(t.omega[v]).squaredNorm()).epsilon(1e-12));
  }
  Mat3 skew = Mat3::Identity();
  skew(0, 1) = 0.1;
  CHECK_THROWS_AS(build_test_functions(mesh, c.input.fields.normal, c.normal.forms[0], skew), Error);
  const std::vector<Vec3> short_normals(3, Vec3(0, 0, 1));
  CHECK_THROWS_AS(build_test_functions(mesh, short_normals, c.normal.forms[0]), Error);
}

TEST_CASE("sum of Q over wedge coordinates is frame invariant") {
  const CatenoidCase c = catenoid_case(16);
  std::mt19937_64 rng(7);
  for (const HarmonicBasis* b : {&c.normal, &c.tangential}) {
    const TestFunctionSet t0 = build_test_functions(c.input.mesh, c.input.fields.normal, b->forms[0]);
    const double base = sum_q(c.assembly, t0);
    for (int trial = 0; trial < 5; ++trial) {
      const Mat3 frame = random_rotation(rng);
      const TestFunctionSet t = build_test_functions(c.input.mesh, c.input.fields.normal, b->forms[0], frame);
      CHECK(std::abs(sum_q(c.assembly, t) - base) <= 1e-10 * std::abs(base));
    }
  }
}

TEST_CASE("boundary tensor integral of a constant on the unit circle") {
  // int over the polygon of |w|^2 with w = e1 and T = I is the perimeter
  const TriSurfaceMesh mesh = fan_disk(32);
  const std::vector<Vec3> w(mesh.num_vertices(), Vec3(1, 0, 0));
  const std::vector<Mat3> tensor(mesh.num_vertices(), Mat3::Identity());
  const double perimeter = 32 * 2.0 * std::sin(std::numbers::pi / 32);
  CHECK(boundary_tensor_integral(mesh, w, tensor) == doctest::Approx(perimeter).epsilon(1e-12));
}

TEST_CASE("catenoid sum-Q identities converge") {
  double prev1 = 1.0, prev2 = 1.0;
  for (int res : {16, 32, 64}) {
    CAPTURE(res);
    const CatenoidCase c = catenoid_case(res);
    const AmbientDomain ball = ball_domain();
    const Prop41Result p1 = prop41_check(c.input, c.assembly, c.normal.forms[0], ball);
    const Prop41Result p2 = prop41_check(c.input, c.assembly, c.tangential.forms[0], ball);
    CHECK(p1.part == 1);
    CHECK(p2.part == 2);
    CHECK(p1.boundary_integral < 0.0);
    CHECK(p1.relative_residual < prev1);
    CHECK(p2.relative_residual < prev2);
    prev1 = p1.relative_residual;
    prev2 = p2.relative_residual;
    // u_ij in the FEM space: the variational inequality against lambda_1
    const SpectralResult s = solve_spectrum(c.assembly, 1);
    const TestFunctionSet t = build_test_functions(c.input.mesh, c.input.fields.normal, c.normal.forms[0]);
    for (const auto& u : t.u) CHECK(c.assembly.q(u) >= s.eigenvalues[0] * u.dot(c.assembly.mass * u) - 1e-9);
  }
  CHECK(prev1 < 0.05);
  CHECK(prev2 < 0.05);
}

TEST_CASE("boundary algebra holds pointwise with analytic fields") {
  for (const ExemplarSurface& ex : {equatorial_disk(), critical_catenoid()}) {
    CAPTURE(ex.name());
    const TriSurfaceMesh mesh = sample_mesh(ex, 32);
    CHECK(boundary_algebra_residual(mesh, exemplar_fields(ex, mesh), ex.domain()) <= 1e-6);
  }
}

TEST_CASE("balancing matrix rank") {
  SUBCASE("disk has an empty basis") {
    const ExemplarSurface disk = equatorial_disk();
    const JacobiInput in = exemplar_input(disk, sample_mesh(disk, 16));
    const QuadraticFormAssembly a = assemble(in.mesh, in.fields.a2, in.robin);
    const SpectralResult s = solve_spectrum(a, 6);
    const BalancingMatrix b = balancing_rank(in.mesh, in.fields.normal, a.mass, harmonic_basis(in.mesh, Flavor::Normal), s);
    CHECK(b.matrix.rows() == 0);
    CHECK(b.rank == 0);
    CHECK(b.k == 1);
  }
  SUBCASE("catenoid map is injective in any frame") {
    const CatenoidCase c = catenoid_case(32);
    const SpectralResult s = solve_spectrum(c.assembly, 8);
    REQUIRE(s.negative_count == 4);
    const BalancingMatrix b = balancing_rank(c.input.mesh, c.input.fields.normal, c.assembly.mass, c.normal, s);
    CHECK(b.matrix.rows() == 1);
    CHECK(b.matrix.cols() == 12);
    CHECK(b.rank == 1);
    CHECK(b.relative_smallest > 1e-6);
    std::mt19937_64 rng(3);
    const BalancingMatrix r =
        balancing_rank(c.input.mesh, c.input.fields.normal, c.assembly.mass, c.normal, s, random_rotation(rng));
    CHECK(r.rank == 1);
    CHECK(r.singular_values[0] == doctest::Approx(b.singular_values[0]).epsilon(1e-8));
  }
}

TEST_CASE("verdict gating and bounds") {
  const Verdict a = verdict_a(1, 0, true);
  CHECK(a.status == VerdictStatus::Pass);
  CHECK(a.integer_bound == 0);
  const Verdict a1 = verdict_a(4, 1, true);
  CHECK(a1.bound == doctest::Approx(1.0 / 3.0));
  CHECK(a1.integer_bound == 1);
  CHECK(a1.status == VerdictStatus::Pass);
  CHECK(verdict_a(0, 1, true).status == VerdictStatus::Fail);
  CHECK(verdict_a(4, 1, false).status == VerdictStatus::NotApplicable);
  CHECK(verdict_c(4, 1, 1, true).integer_bound == 1);
  CHECK(verdict_c(4, 0, 2, false).status == VerdictStatus::NotApplicable);
  CHECK(verdict_b(4, 2, true).note.find("r - 1") != std::string::npos);
  for (double alpha : {0.0, 0.25, 1.0}) {
    const Verdict f = verdict_f(4, 1, alpha, true);
    CHECK(f.bound == doctest::Approx(verdict_a(4, 1, true).bound));
    CHECK(f.note.find("equals the A bound") != std::string::npos);
  }
  CHECK_THROWS_AS(verdict_f(4, 1, 1.5, true), Error);
  CHECK(to_string(VerdictStatus::NotApplicable) == "not-applicable");
}

TEST_CASE("certify disk and catenoid") {
  CertifyOptions o;
  o.resolution = 16;
  o.refinements = 1;
  const IndexCertificate disk = certify(equatorial_disk(), o);
  CHECK(disk.errors.empty());
  CHECK(disk.index == 1);
  for (const auto& v : disk.verdicts) {
    CHECK(v.status == VerdictStatus::Pass);
    CHECK(v.integer_bound == 0);
  }
  const IndexCertificate cat = certify(critical_catenoid(), o);
  CHECK(cat.errors.empty());
  CHECK(cat.index >= 4);
  CHECK(cat.homology.h1_relative == 1);
  CHECK(cat.prop41_1.size() == 1);
  CHECK(cat.prop41_2.size() == 1);
  REQUIRE(cat.balancing.has_value());
  CHECK(cat.balancing->rank == 1);
  for (const auto& v : cat.verdicts) {
    CHECK(v.status == VerdictStatus::Pass);
    CHECK(v.integer_bound == 1);
  }
  CHECK_FALSE(cat.any_failed());
  CHECK_FALSE(cat.any_not_applicable());
}

TEST_CASE("non mean convex domain makes the verdicts not applicable") {
  CertifyOptions o;
  o.resolution = 16;
  o.refinements = 0;
  const IndexCertificate c = certify(equatorial_disk(), peanut_domain(4.0), o);
  CHECK(c.errors.empty());
  CHECK_FALSE(c.hypotheses.strictly_mean_convex);
  CHECK(c.verdicts[0].status == VerdictStatus::NotApplicable);
  CHECK(c.any_not_applicable());
}

TEST_CASE("pipeline errors are aggregated") {
  CertifyOptions o;
  o.alpha = 2.0;
  CHECK_THROWS_AS(certify(equatorial_disk(), o), Error);
  // a user mesh with an |A|^2 field of the wrong length
  const TriSurfaceMesh mesh = sample_mesh(equatorial_disk(), 8);
  const std::vector<double> bad(3, 0.0);
  CHECK_THROWS_AS(certify(mesh, ball_domain(), CertifyOptions{}, &bad), Error);
}
