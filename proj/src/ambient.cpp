#include "fbms/ambient.hpp"

#include "fbms/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace fbms {

AmbientDomain::AmbientDomain(std::string spec, Scalar level, Gradient gradient, Hessian hessian,
                             double bounding_radius, Vec3 interior_point,
                             std::optional<ConvexityCertificate> certificate)
    : spec_(std::move(spec)),
      level_(std::move(level)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      bounding_radius_(bounding_radius),
      interior_point_(std::move(interior_point)),
      certificate_(certificate) {}

double AmbientDomain::boundary_distance(const Vec3& p) const {
  const double g = gradient(p).norm();
  if (g == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(level(p)) / g;
}

namespace {

std::string fmt(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// p(t) = max(|t| - a, 0)^4 and its derivatives.
double quartic(double t, double a) {
  const double s = std::max(std::abs(t) - a, 0.0);
  return s * s * s * s;
}
double quartic_d1(double t, double a) {
  const double s = std::max(std::abs(t) - a, 0.0);
  return 4.0 * s * s * s * (t < 0 ? -1.0 : 1.0);
}
double quartic_d2(double t, double a) {
  const double s = std::max(std::abs(t) - a, 0.0);
  return 12.0 * s * s;
}

}  // namespace

AmbientDomain ball_domain(double radius) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidInput, "ball radius must be positive");
  const double r2 = radius * radius;
  return AmbientDomain(
      "ball r=" + fmt(radius), [r2](const Vec3& p) { return p.squaredNorm() - r2; },
      [](const Vec3& p) -> Vec3 { return 2.0 * p; }, [](const Vec3&) -> Mat3 { return 2.0 * Mat3::Identity(); },
      radius, Vec3::Zero(), ConvexityCertificate{true, true, true, true});
}

AmbientDomain cylinder_domain(double radius) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidInput, "cylinder radius must be positive");
  const double r2 = radius * radius;
  return AmbientDomain(
      "cylinder r=" + fmt(radius),
      [r2](const Vec3& p) { return p.x() * p.x() + p.y() * p.y() - r2; },
      [](const Vec3& p) -> Vec3 { return {2.0 * p.x(), 2.0 * p.y(), 0.0}; },
      [](const Vec3&) -> Mat3 { return Eigen::Vector3d(2.0, 2.0, 0.0).asDiagonal(); }, radius,
      Vec3::Zero(), ConvexityCertificate{false, true, true, true});
}

AmbientDomain ellipsoid_domain(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) throw Error(ErrorKind::InvalidInput, "ellipsoid axes must be positive");
  const Vec3 w(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
  return AmbientDomain(
      "ellipsoid a=" + fmt(a) + ",b=" + fmt(b) + ",c=" + fmt(c),
      [w](const Vec3& p) { return p.cwiseProduct(p).dot(w) - 1.0; },
      [w](const Vec3& p) -> Vec3 { return 2.0 * p.cwiseProduct(w); },
      [w](const Vec3&) -> Mat3 { return (2.0 * w).asDiagonal(); }, std::max({a, b, c}), Vec3::Zero(),
      ConvexityCertificate{true, true, true, true});
}

AmbientDomain rounded_box_domain(double a) {
  if (!(a > 0)) throw Error(ErrorKind::InvalidInput, "rounded_box half-width must be positive");
  return AmbientDomain(
      "rounded_box a=" + fmt(a),
      [a](const Vec3& p) { return quartic(p.x(), a) + quartic(p.y(), a) + quartic(p.z(), a) - 1.0; },
      [a](const Vec3& p) -> Vec3 {
        return {quartic_d1(p.x(), a), quartic_d1(p.y(), a), quartic_d1(p.z(), a)};
      },
      [a](const Vec3& p) -> Mat3 {
        return Eigen::Vector3d(quartic_d2(p.x(), a), quartic_d2(p.y(), a), quartic_d2(p.z(), a))
            .asDiagonal();
      },
      std::sqrt(3.0) * (a + 1.0), Vec3::Zero(), ConvexityCertificate{false, false, false, true});
}

AmbientDomain peanut_domain(double a) {
  if (!(a >= 0)) throw Error(ErrorKind::InvalidInput, "peanut parameter must be nonnegative");
  // g(z) = (1 - z^2)(1 + a z^2) = 1 + (a - 1) z^2 - a z^4
  auto g = [a](double z) { return 1.0 + (a - 1.0) * z * z - a * z * z * z * z; };
  auto g1 = [a](double z) { return 2.0 * (a - 1.0) * z - 4.0 * a * z * z * z; };
  auto g2 = [a](double z) { return 2.0 * (a - 1.0) - 12.0 * a * z * z; };
  // max of g over [-1, 1] bounds the radius
  double gmax = 1.0;
  if (a > 1.0) {
    const double z2 = (a - 1.0) / (2.0 * a);
    gmax = std::max(gmax, g(std::sqrt(z2)));
  }
  const double radius = std::sqrt(gmax + 1.0);
  // Mean convex only when the waist curvature 2 - a is nonnegative.
  std::optional<ConvexityCertificate> cert;
  if (a > 2.0) cert = ConvexityCertificate{false, false, false, false};
  return AmbientDomain(
      "peanut a=" + fmt(a), [g](const Vec3& p) { return p.x() * p.x() + p.y() * p.y() - g(p.z()); },
      [g1](const Vec3& p) -> Vec3 { return {2.0 * p.x(), 2.0 * p.y(), -g1(p.z())}; },
      [g2](const Vec3& p) -> Mat3 { return Eigen::Vector3d(2.0, 2.0, -g2(p.z())).asDiagonal(); },
      radius, Vec3::Zero(), cert);
}

AmbientDomain make_domain(std::string_view spec) {
  std::string text(spec);
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::string name;
  in >> name;
  std::map<std::string, double> named;
  std::vector<double> positional;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    const std::string key = eq == std::string::npos ? std::string() : token.substr(0, eq);
    const std::string value = eq == std::string::npos ? token : token.substr(eq + 1);
    double x = 0.0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), x);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
      throw Error(ErrorKind::ParseError, "bad domain parameter '" + token + "' in '" + std::string(spec) + "'");
    }
    if (key.empty()) {
      positional.push_back(x);
    } else {
      named[key] = x;
    }
  }
  auto param = [&](const std::string& key, size_t pos, std::optional<double> fallback) {
    if (auto it = named.find(key); it != named.end()) return it->second;
    if (pos < positional.size()) return positional[pos];
    if (fallback) return *fallback;
    throw Error(ErrorKind::ParseError, "domain '" + name + "' needs parameter " + key);
  };
  if (name == "ball") return ball_domain(param("r", 0, 1.0));
  if (name == "cylinder") return cylinder_domain(param("r", 0, std::nullopt));
  if (name == "ellipsoid") {
    return ellipsoid_domain(param("a", 0, std::nullopt), param("b", 1, std::nullopt),
                            param("c", 2, std::nullopt));
  }
  if (name == "rounded_box") return rounded_box_domain(param("a", 0, 0.5));
  if (name == "peanut") return peanut_domain(param("a", 0, 4.0));
  throw Error(ErrorKind::ParseError, "unknown domain '" + name + "'");
}

BoundaryGeometry boundary_geometry(const AmbientDomain& domain, const Vec3& p, double tolerance) {
  const Vec3 grad = domain.gradient(p);
  const double gnorm = grad.norm();
  if (!(gnorm > 0.0)) throw Error(ErrorKind::DegenerateGradient, "gradient vanishes");
  const double dist = std::abs(domain.level(p)) / gnorm;
  if (dist > tolerance * domain.bounding_radius()) {
    throw Error(ErrorKind::NotOnBoundary, "point is " + fmt(dist) + " away from the boundary");
  }
  BoundaryGeometry g;
  g.normal = grad / gnorm;
  const Mat3 proj = Mat3::Identity() - g.normal * g.normal.transpose();
  g.second_form = proj * domain.hessian(p) * proj / gnorm;
  g.second_form = 0.5 * (g.second_form + g.second_form.transpose()).eval();
  g.tangent1 = any_orthonormal(g.normal);
  g.tangent2 = g.normal.cross(g.tangent1);
  g.second_form_tangent << g.second_form_at(g.tangent1, g.tangent1), g.second_form_at(g.tangent1, g.tangent2),
      g.second_form_at(g.tangent2, g.tangent1), g.second_form_at(g.tangent2, g.tangent2);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(g.second_form_tangent, Eigen::EigenvaluesOnly);
  g.principal = eig.eigenvalues();
  g.mean_curvature = g.second_form_tangent.trace();
  return g;
}

ConvexityCertificate ConvexityReport::effective() const {
  if (certificate) return *certificate;
  return {strictly_convex, strictly_two_convex, strictly_mean_convex, weakly_mean_convex};
}

ConvexityReport classify_convexity(const AmbientDomain& domain, int n_samples, std::uint64_t seed,
                                   double margin) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidInput, "need at least one sample");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Vec3 origin = domain.interior_point();
  if (!(domain.level(origin) < 0.0)) {
    throw Error(ErrorKind::SamplingFailed, "interior point is not inside the domain");
  }
  const double radius = domain.bounding_radius();
  const double step = radius / 64.0;
  const double t_max = 4.0 * radius + origin.norm();

  ConvexityReport report;
  report.margin = margin;
  report.min_mean_curvature = std::numeric_limits<double>::infinity();
  report.min_pair_sum = std::numeric_limits<double>::infinity();
  report.min_principal = std::numeric_limits<double>::infinity();

  const int max_attempts = 20 * n_samples + 100;
  for (int attempt = 0; attempt < max_attempts && report.samples < n_samples; ++attempt) {
    Vec3 dir(normal(rng), normal(rng), normal(rng));
    if (dir.norm() < 1e-12) continue;
    dir.normalize();
    // march to the first exit, then bisect
    double lo = 0.0;
    double hi = -1.0;
    for (double t = step; t <= t_max; t += step) {
      if (domain.level(origin + t * dir) > 0.0) {
        hi = t;
        break;
      }
      lo = t;
    }
    if (hi < 0.0) continue;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * radius; ++it) {
      const double mid = 0.5 * (lo + hi);
      (domain.level(origin + mid * dir) > 0.0 ? hi : lo) = mid;
    }
    const Vec3 p = origin + 0.5 * (lo + hi) * dir;
    BoundaryGeometry g;
    try {
      g = boundary_geometry(domain, p, 1e-8);
    } catch (const Error&) {
      continue;
    }
    report.min_mean_curvature = std::min(report.min_mean_curvature, g.mean_curvature);
    // On a 2-dimensional boundary the only pair sum is the trace.
    report.min_pair_sum = std::min(report.min_pair_sum, g.principal[0] + g.principal[1]);
    report.min_principal = std::min(report.min_principal, g.principal[0]);
    ++report.samples;
  }
  if (report.samples < n_samples) {
    throw Error(ErrorKind::SamplingFailed,
                "only " + std::to_string(report.samples) + " of " + std::to_string(n_samples) +
                    " rays reached the boundary");
  }
  report.strictly_mean_convex = report.min_mean_curvature > margin;
  report.weakly_mean_convex = report.min_mean_curvature >= -margin;
  report.strictly_two_convex = report.min_pair_sum > margin;
  report.strictly_convex = report.min_principal > margin;
  report.certificate = domain.certificate();
  return report;
}

Vec3 project_to_boundary(const AmbientDomain& domain, const Vec3& p) {
  Vec3 x = p;
  const double tol = 1e-14 * domain.bounding_radius();
  for (int it = 0; it < 100; ++it) {
    const Vec3 g = domain.gradient(x);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) break;
    const Vec3 dx = domain.level(x) / g2 * g;
    x -= dx;
    if (dx.norm() <= tol) return x;
  }
  if (domain.boundary_distance(x) <= 1e-12 * domain.bounding_radius()) return x;
  throw Error(ErrorKind::ProjectionFailed, "Newton projection onto the boundary did not converge");
}

std::vector<Vec3> discrete_conormals(const TriSurfaceMesh& mesh) {
  std::vector<Vec3> conormal(static_cast<size_t>(mesh.num_vertices()), Vec3::Zero());
  for (size_t l = 0; l < mesh.boundary_loops().size(); ++l) {
    const auto& verts = mesh.boundary_loops()[l];
    const auto& edges = mesh.boundary_loop_edges()[l];
    for (size_t i = 0; i < verts.size(); ++i) {
      const int a = verts[i];
      const int b = verts[(i + 1) % verts.size()];
      const int f = mesh.edge(edges[i]).faces[0];
      const Vec3 t = (mesh.vertex(b) - mesh.vertex(a)).normalized();
      const Vec3 out = t.cross(mesh.triangle_normal(f));
      conormal[static_cast<size_t>(a)] += out;
      conormal[static_cast<size_t>(b)] += out;
    }
  }
  for (Vec3& c : conormal) {
    if (c.norm() > 0.0) c.normalize();
  }
  return conormal;
}

FreeBoundaryResidual free_boundary_residual(const TriSurfaceMesh& mesh, const AmbientDomain& domain) {
  FreeBoundaryResidual r;
  const std::vector<Vec3> conormal = discrete_conormals(mesh);
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    const Vec3& p = mesh.vertex(v);
    r.max_onboundary_gap = std::max(r.max_onboundary_gap, domain.boundary_distance(p) / domain.bounding_radius());
    const Vec3 g = domain.gradient(p);
    const double gn = g.norm();
    const double gap = gn > 0.0 ? std::abs(1.0 - conormal[static_cast<size_t>(v)].dot(g / gn)) : 1.0;
    r.max_orthogonality_gap = std::max(r.max_orthogonality_gap, gap);
  }
  return r;
}

VertexSample DomainReprojection::midpoint(const TriSurfaceMesh& mesh, int a, int b) const {
  const Vec3 mid = 0.5 * (mesh.vertex(a) + mesh.vertex(b));
  const int e = mesh.find_edge(a, b);
  if (e >= 0 && mesh.edge_on_boundary(e)) return {project_to_boundary(domain_, mid), std::nullopt};
  return {mid, std::nullopt};
}

}  // namespace fbms
