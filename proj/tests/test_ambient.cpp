#include "doctest.h"

#include "fbms/ambient.hpp"
#include "fbms/errors.hpp"
#include "fbms/exemplars.hpp"

#include <Eigen/Eigenvalues>

#include <random>

using namespace fbms;

namespace {

// Central finite differences of F alone.
Vec3 fd_gradient(const AmbientDomain& d, const Vec3& p, double h = 1e-5) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (d.level(p + e) - d.level(p - e)) / (2.0 * h);
  }
  return g;
}

Mat3 fd_hessian(const AmbientDomain& d, const Vec3& p, double h = 1e-4) {
  Mat3 hess;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Vec3 ei = Vec3::Zero();
      Vec3 ej = Vec3::Zero();
      ei[i] = h;
      ej[j] = h;
      hess(i, j) = (d.level(p + ei + ej) - d.level(p + ei - ej) - d.level(p - ei + ej) + d.level(p - ei - ej)) /
                   (4.0 * h * h);
    }
  }
  return hess;
}

// Mean curvature from finite-difference derivatives of F only.
double fd_mean_curvature(const AmbientDomain& d, const Vec3& p) {
  const Vec3 g = fd_gradient(d, p);
  const Mat3 h = fd_hessian(d, p);
  const double gn = g.norm();
  const Vec3 n = g / gn;
  return (h.trace() - n.dot(h * n)) / gn;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("unit ball boundary geometry") {
  const auto ball = ball_domain(1.0);
  const auto g = boundary_geometry(ball, Vec3(0, 0, 1));
  CHECK((g.normal - Vec3(0, 0, 1)).norm() < 1e-15);
  CHECK(g.principal[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.principal[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.mean_curvature == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("ball second form is the metric on tangent vectors") {
  const auto ball = ball_domain(1.0);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  for (int i = 0; i < 50; ++i) {
    const Vec3 p = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
    const auto g = boundary_geometry(ball, p);
    Vec3 v(nd(rng), nd(rng), nd(rng));
    v -= v.dot(p) * p;
    CHECK(std::abs(g.second_form_at(v, v) - v.squaredNorm()) <= 1e-10 * v.squaredNorm());
  }
}

TEST_CASE("cylinder curvatures") {
  const double r = 2.0;
  const auto cyl = cylinder_domain(r);
  const auto g = boundary_geometry(cyl, Vec3(r, 0, 0));
  CHECK(g.principal[0] == doctest::Approx(0.0));
  CHECK(g.principal[1] == doctest::Approx(1.0 / r));
  CHECK(g.mean_curvature == doctest::Approx(1.0 / r));
}

TEST_CASE("boundary geometry matches the finite-difference oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (const char* spec : {"ball r=1", "cylinder r=1.5", "ellipsoid a=2,b=1,c=1", "rounded_box a=0.5", "peanut a=4"}) {
    const auto d = make_domain(spec);
    int checked = 0;
    for (int i = 0; i < 40 && checked < 10; ++i) {
      const Vec3 dir = Vec3(nd(rng), nd(rng), nd(rng)).normalized();
      Vec3 p;
      try {
        p = project_to_boundary(d, 0.8 * d.bounding_radius() * dir);
      } catch (const Error&) {
        continue;
      }
      if (d.gradient(p).norm() < 1e-3) continue;
      const auto g = boundary_geometry(d, p);
      CHECK(std::abs(g.mean_curvature - fd_mean_curvature(d, p)) < 1e-6 * std::max(1.0, std::abs(g.mean_curvature)));
      CHECK((g.normal - fd_gradient(d, p).normalized()).norm() < 1e-6);
      ++checked;
    }
    CHECK(checked >= 5);
  }
  const auto ell = make_domain("ellipsoid 2,1,1");
  const Vec3 tip(2, 0, 0);
  const auto g = boundary_geometry(ell, tip);
  // x^2/4 + y^2 + z^2 = 1 at (2,0,0): both principal curvatures equal 2
  CHECK(g.mean_curvature == doctest::Approx(fd_mean_curvature(ell, tip)).epsilon(1e-6));
  CHECK(g.mean_curvature == doctest::Approx(4.0));
}

TEST_CASE("boundary geometry preconditions") {
  const auto ball = ball_domain(1.0);
  CHECK(kind_of([&] { boundary_geometry(ball, Vec3(0, 0, 0.5)); }) == ErrorKind::NotOnBoundary);
  const AmbientDomain flat(
      "degenerate", [](const Vec3&) { return 0.0; }, [](const Vec3&) -> Vec3 { return Vec3::Zero(); },
      [](const Vec3&) -> Mat3 { return Mat3::Zero(); }, 1.0, Vec3::Zero());
  CHECK(kind_of([&] { boundary_geometry(flat, Vec3::Zero()); }) == ErrorKind::DegenerateGradient);
}

TEST_CASE("domain registry") {
  CHECK(make_domain("ball r=1").bounding_radius() == 1.0);
  CHECK(make_domain("ball").bounding_radius() == 1.0);
  CHECK(make_domain("ellipsoid a=3 b=1 c=1").bounding_radius() == 3.0);
  CHECK(make_domain("cylinder 2").spec() == "cylinder r=2");
  CHECK(kind_of([] { make_domain("torus r=1"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { make_domain("cylinder"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { make_domain("ball r=x"); }) == ErrorKind::ParseError);
}

TEST_CASE("convexity classification") {
  const auto ball = classify_convexity(ball_domain(1.0), 200);
  CHECK(ball.samples >= 200);
  CHECK(ball.strictly_convex);
  CHECK(ball.min_principal == doctest::Approx(1.0));

  const auto cyl = classify_convexity(cylinder_domain(1.0), 200);
  CHECK(cyl.strictly_mean_convex);
  CHECK(cyl.strictly_two_convex);
  CHECK_FALSE(cyl.strictly_convex);

  const auto ell = classify_convexity(ellipsoid_domain(2, 1, 0.5), 300);
  CHECK(ell.strictly_convex);

  // flat faces: Hessian vanishes on a patch
  const auto box = classify_convexity(rounded_box_domain(0.5), 400);
  CHECK(std::abs(box.min_mean_curvature) < 1e-8);
  CHECK(box.weakly_mean_convex);
  CHECK_FALSE(box.strictly_mean_convex);
  CHECK_FALSE(box.strictly_two_convex);

  const auto peanut = classify_convexity(peanut_domain(4.0), 400);
  CHECK(peanut.min_mean_curvature < -0.5);
  CHECK_FALSE(peanut.weakly_mean_convex);
  CHECK_FALSE(peanut.effective().strictly_mean_convex);

  for (const auto& r : {ball, cyl, ell, box, peanut}) {
    CHECK((!r.strictly_convex || r.strictly_two_convex));
    CHECK((!r.strictly_two_convex || r.strictly_mean_convex));
    CHECK((!r.strictly_mean_convex || r.weakly_mean_convex));
  }
}

TEST_CASE("peanut waist is the unit circle with negative mean curvature") {
  const auto d = peanut_domain(4.0);
  const auto g = boundary_geometry(d, Vec3(1, 0, 0));
  CHECK((g.normal - Vec3(1, 0, 0)).norm() < 1e-14);
  // circle curvature 1 plus meridian curvature -(a - 1) = -3
  CHECK(g.mean_curvature == doctest::Approx(-2.0));
}

TEST_CASE("free boundary residual of the disk") {
  const auto disk = equatorial_disk();
  const auto mesh = sample_mesh(disk, 16);
  const auto res = free_boundary_residual(mesh, disk.domain());
  CHECK(res.max_onboundary_gap < 1e-12);
  CHECK(res.max_orthogonality_gap < 1e-12);

  const auto shifted = transform_mesh(mesh, Mat3::Identity(), Vec3(0, 0, 0.1));
  const auto bad = free_boundary_residual(shifted, disk.domain());
  // |F| / |grad F| = (1.01 - 1) / (2 sqrt(1.01))
  CHECK(bad.max_onboundary_gap == doctest::Approx(0.01 / (2.0 * std::sqrt(1.01))).epsilon(1e-9));
  CHECK(bad.max_orthogonality_gap > 1e-3);
}

TEST_CASE("catenoid orthogonality gap decreases under refinement") {
  const auto cat = critical_catenoid();
  const auto m16 = sample_mesh(cat, 16);
  const ExemplarReprojection rep(cat);
  const auto m32 = refine(m16, &rep);
  const auto r16 = free_boundary_residual(m16, cat.domain());
  const auto r32 = free_boundary_residual(m32, cat.domain());
  CHECK(r16.max_onboundary_gap < 1e-12);
  CHECK(r32.max_onboundary_gap < 1e-12);
  CHECK(r32.max_orthogonality_gap < r16.max_orthogonality_gap);
}

TEST_CASE("domain reprojection keeps refined boundary on the sphere") {
  const auto disk = equatorial_disk();
  const auto coarse = sample_mesh(disk, 8);
  const DomainReprojection rep(disk.domain());
  const auto fine = refine(coarse, &rep);
  for (int v = 0; v < fine.num_vertices(); ++v) {
    if (fine.vertex_on_boundary(v)) CHECK(std::abs(fine.vertex(v).norm() - 1.0) < 1e-12);
  }
  CHECK(fine.vertex(0).norm() == 0.0);
}
