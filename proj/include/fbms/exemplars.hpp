#pragma once

#include "fbms/ambient.hpp"
#include "fbms/fields.hpp"
#include "fbms/mesh.hpp"

#include <string>
#include <string_view>

namespace fbms {

// Exactly known free boundary minimal surface in the unit ball, parametrized
// over (u, theta) with theta periodic. Parameter u runs over [u_min, u_max];
// for the disk u = rho and u_min = 0 is a pole.
class ExemplarSurface {
 public:
  enum class Kind { Disk, Catenoid };

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double u_min() const { return u_min_; }
  double u_max() const { return u_max_; }
  bool has_pole() const { return kind_ == Kind::Disk; }
  int genus() const { return 0; }
  int boundary_components() const { return kind_ == Kind::Disk ? 1 : 2; }
  const AmbientDomain& domain() const { return domain_; }

  Vec3 position(double u, double theta) const;
  Vec3 position(const Vec2& p) const { return position(p.x(), p.y()); }
  Vec3 du(double u, double theta) const;
  Vec3 dtheta(double u, double theta) const;
  Vec3 normal(double u, double theta) const;
  // |A|^2
  double a2(double u, double theta) const;
  // Gauss curvature; -|A|^2 / 2 for a minimal surface.
  double gauss(double u, double theta) const { return -0.5 * a2(u, theta); }
  // Geodesic curvature of the boundary curve with respect to the outward
  // conormal; defined at u = u_max (and u = u_min for the catenoid).
  double boundary_curvature(double u) const;
  // Outward conormal at a boundary parameter.
  Vec3 conormal(double u, double theta) const;
  bool on_boundary(double u) const;

  friend ExemplarSurface equatorial_disk();
  friend ExemplarSurface critical_catenoid();

 private:
  ExemplarSurface(Kind kind, std::string name, double u_min, double u_max, AmbientDomain domain)
      : kind_(kind), name_(std::move(name)), u_min_(u_min), u_max_(u_max), domain_(std::move(domain)) {}

  Kind kind_;
  std::string name_;
  double u_min_;
  double u_max_;
  AmbientDomain domain_;
};

// Root of t tanh t = 1 by bisection on [1, 2], and the scale
// c = 1 / sqrt(cosh^2 t0 + t0^2) that puts the boundary on the unit sphere.
double catenoid_t0();
double catenoid_scale();

ExemplarSurface equatorial_disk();
ExemplarSurface critical_catenoid();
// "disk" or "catenoid"; throws Error{InvalidInput}.
ExemplarSurface exemplar_by_name(std::string_view name);

// Structured mesh of the parameter rectangle. Disk: `resolution` angular
// segments and resolution/4 radial rings around a pole fan. Catenoid:
// `resolution` angular segments and resolution/2 segments along t. The theta
// seam is identified. Throws Error{ResolutionTooLow} below 4.
TriSurfaceMesh sample_mesh(const ExemplarSurface& exemplar, int resolution);

// Analytic fields at the mesh vertices, located through mesh.params().
// Throws Error{MissingField} when the mesh carries no parameters.
SurfaceFields exemplar_fields(const ExemplarSurface& exemplar, const TriSurfaceMesh& mesh);

// Refinement rule: parameter-space midpoint (circular in theta, radial from
// the pole) mapped through the exact parametrization.
class ExemplarReprojection : public Reprojection {
 public:
  explicit ExemplarReprojection(const ExemplarSurface& exemplar) : exemplar_(exemplar) {}
  VertexSample midpoint(const TriSurfaceMesh& mesh, int a, int b) const override;

 private:
  const ExemplarSurface& exemplar_;
};

}  // namespace fbms
