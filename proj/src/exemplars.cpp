#include "fbms/exemplars.hpp"

#include "fbms/errors.hpp"

#include <cmath>
#include <numbers>

namespace fbms {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

}  // namespace

double catenoid_t0() {
  static const double t0 = [] {
    double lo = 1.0;
    double hi = 2.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (mid * std::tanh(mid) - 1.0 < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return t0;
}

double catenoid_scale() {
  const double t0 = catenoid_t0();
  return 1.0 / std::sqrt(std::cosh(t0) * std::cosh(t0) + t0 * t0);
}

ExemplarSurface equatorial_disk() {
  return ExemplarSurface(ExemplarSurface::Kind::Disk, "disk", 0.0, 1.0, ball_domain(1.0));
}

ExemplarSurface critical_catenoid() {
  const double t0 = catenoid_t0();
  return ExemplarSurface(ExemplarSurface::Kind::Catenoid, "catenoid", -t0, t0, ball_domain(1.0));
}

ExemplarSurface exemplar_by_name(std::string_view name) {
  if (name == "disk") return equatorial_disk();
  if (name == "catenoid") return critical_catenoid();
  throw Error(ErrorKind::InvalidInput, "unknown exemplar '" + std::string(name) + "' (expected disk or catenoid)");
}

Vec3 ExemplarSurface::position(double u, double theta) const {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  if (kind_ == Kind::Disk) return {u * ct, u * st, 0.0};
  const double c = catenoid_scale();
  return c * Vec3(std::cosh(u) * ct, std::cosh(u) * st, u);
}

Vec3 ExemplarSurface::du(double u, double theta) const {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  if (kind_ == Kind::Disk) return {ct, st, 0.0};
  const double c = catenoid_scale();
  return c * Vec3(std::sinh(u) * ct, std::sinh(u) * st, 1.0);
}

Vec3 ExemplarSurface::dtheta(double u, double theta) const {
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  if (kind_ == Kind::Disk) return {-u * st, u * ct, 0.0};
  const double c = catenoid_scale();
  return c * Vec3(-std::cosh(u) * st, std::cosh(u) * ct, 0.0);
}

Vec3 ExemplarSurface::normal(double u, double theta) const {
  if (kind_ == Kind::Disk) return Vec3::UnitZ();
  const double ch = std::cosh(u);
  return Vec3(-std::cos(theta), -std::sin(theta), std::sinh(u)) / ch;
}

double ExemplarSurface::a2(double u, double) const {
  if (kind_ == Kind::Disk) return 0.0;
  const double c = catenoid_scale();
  const double ch2 = std::cosh(u) * std::cosh(u);
  return 2.0 / (c * c * ch2 * ch2);
}

double ExemplarSurface::boundary_curvature(double u) const {
  if (kind_ == Kind::Disk) return 1.0 / u;
  return std::tanh(std::abs(u)) / (catenoid_scale() * std::cosh(u));
}

Vec3 ExemplarSurface::conormal(double u, double theta) const {
  const Vec3 d = du(u, theta).normalized();
  return u < 0.0 ? Vec3(-d) : d;
}

bool ExemplarSurface::on_boundary(double u) const {
  if (u == u_max_) return true;
  return kind_ == Kind::Catenoid && u == u_min_;
}

TriSurfaceMesh sample_mesh(const ExemplarSurface& exemplar, int resolution) {
  if (resolution < 4) {
    throw Error(ErrorKind::ResolutionTooLow, "resolution must be at least 4, got " + std::to_string(resolution));
  }
  const int nt = resolution;
  std::vector<Vec3> vertices;
  std::vector<Vec2> params;
  std::vector<Tri> triangles;
  auto add = [&](double u, double theta) {
    vertices.push_back(exemplar.position(u, theta));
    params.emplace_back(u, theta);
  };
  // ring(i, j): vertex index of parameter row i, angle j (mod nt)
  if (exemplar.has_pole()) {
    const int nr = std::max(1, resolution / 4);
    add(0.0, 0.0);
    for (int i = 1; i <= nr; ++i) {
      const double u = i == nr ? exemplar.u_max() : exemplar.u_max() * i / nr;
      for (int j = 0; j < nt; ++j) add(u, kTwoPi * j / nt);
    }
    auto ring = [&](int i, int j) { return 1 + (i - 1) * nt + (j % nt); };
    for (int j = 0; j < nt; ++j) triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i < nr; ++i) {
      for (int j = 0; j < nt; ++j) {
        triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
        triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
      }
    }
  } else {
    const int nu = std::max(2, resolution / 2);
    const double a = exemplar.u_min();
    const double b = exemplar.u_max();
    for (int i = 0; i <= nu; ++i) {
      const double u = i == 0 ? a : (i == nu ? b : a + (b - a) * i / nu);
      for (int j = 0; j < nt; ++j) add(u, kTwoPi * j / nt);
    }
    auto ring = [&](int i, int j) { return i * nt + (j % nt); };
    for (int i = 0; i < nu; ++i) {
      for (int j = 0; j < nt; ++j) {
        triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
        triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
      }
    }
  }
  return build_mesh(std::move(vertices), std::move(triangles), std::move(params));
}

SurfaceFields exemplar_fields(const ExemplarSurface& exemplar, const TriSurfaceMesh& mesh) {
  if (!mesh.params()) throw Error(ErrorKind::MissingField, "mesh carries no exemplar parameters");
  const auto& params = *mesh.params();
  const auto n = static_cast<size_t>(mesh.num_vertices());
  SurfaceFields f;
  f.a2.resize(n);
  f.normal.resize(n);
  f.gauss.resize(n);
  f.boundary_curvature.assign(n, 0.0);
  f.analytic = true;
  for (size_t v = 0; v < n; ++v) {
    const double u = params[v].x();
    const double th = params[v].y();
    f.a2[v] = exemplar.a2(u, th);
    f.normal[v] = exemplar.normal(u, th);
    f.gauss[v] = exemplar.gauss(u, th);
    if (mesh.vertex_on_boundary(static_cast<int>(v))) f.boundary_curvature[v] = exemplar.boundary_curvature(u);
  }
  return f;
}

VertexSample ExemplarReprojection::midpoint(const TriSurfaceMesh& mesh, int a, int b) const {
  if (!mesh.params()) throw Error(ErrorKind::ProjectionFailed, "mesh carries no exemplar parameters");
  const Vec2& pa = (*mesh.params())[static_cast<size_t>(a)];
  const Vec2& pb = (*mesh.params())[static_cast<size_t>(b)];
  Vec2 mid;
  if (exemplar_.has_pole() && pa.x() == 0.0) {
    mid = {0.5 * pb.x(), pb.y()};
  } else if (exemplar_.has_pole() && pb.x() == 0.0) {
    mid = {0.5 * pa.x(), pa.y()};
  } else {
    const double d = std::remainder(pb.y() - pa.y(), kTwoPi);
    mid = {0.5 * (pa.x() + pb.x()), wrap_angle(pa.y() + 0.5 * d)};
  }
  return {exemplar_.position(mid), mid};
}

}  // namespace fbms
