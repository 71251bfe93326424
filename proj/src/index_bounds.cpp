#include "fbms/index_bounds.hpp"

#include "fbms/errors.hpp"

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace fbms {

namespace {

void check_frame(const Mat3& frame) {
  if ((frame * frame.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::InvalidInput, "frame is not orthonormal");
  }
}

void check_fields(const TriSurfaceMesh& mesh, const SurfaceFields& fields) {
  const auto nv = static_cast<size_t>(mesh.num_vertices());
  if (fields.normal.size() != nv) throw Error(ErrorKind::MissingGeometry, "normal field is missing");
  if (fields.boundary_curvature.size() != nv) throw Error(ErrorKind::MissingGeometry, "boundary curvature field is missing");
}

Verdict make_verdict(std::string theorem, double bound, std::string hypothesis, bool satisfied, int index) {
  Verdict v;
  v.theorem = std::move(theorem);
  v.bound = bound;
  v.integer_bound = static_cast<int>(std::ceil(bound - 1e-12));
  v.hypothesis = std::move(hypothesis);
  v.hypothesis_satisfied = satisfied;
  if (!satisfied) {
    v.status = VerdictStatus::NotApplicable;
  } else {
    v.status = index >= v.integer_bound ? VerdictStatus::Pass : VerdictStatus::Fail;
  }
  return v;
}

}  // namespace

TestFunctionSet build_test_functions(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal, const EdgeCochain& w,
                                     const Mat3& frame) {
  check_frame(frame);
  if (normal.size() != static_cast<size_t>(mesh.num_vertices())) {
    throw Error(ErrorKind::InvalidInput, "normal field size does not match vertex count");
  }
  TestFunctionSet t;
  t.flavor = w.flavor;
  t.frame = frame;
  t.omega = vertex_vectors(mesh, w);
  for (auto& u : t.u) u.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec3 n = frame * normal[static_cast<size_t>(v)];
    const Vec3 o = frame * t.omega[static_cast<size_t>(v)];
    for (size_t p = 0; p < kWedgePairs.size(); ++p) {
      const int i = kWedgePairs[p][0], j = kWedgePairs[p][1];
      t.u[p][v] = n[i] * o[j] - n[j] * o[i];
    }
  }
  return t;
}

double sum_q(const QuadraticFormAssembly& assembly, const TestFunctionSet& t) {
  double s = 0.0;
  for (const auto& u : t.u) s += assembly.q(u);
  return s;
}

double boundary_tensor_integral(const TriSurfaceMesh& mesh, const std::vector<Vec3>& w, const std::vector<Mat3>& tensor) {
  double total = 0.0;
  for (const auto& loop : mesh.boundary_loops()) {
    for (size_t i = 0; i < loop.size(); ++i) {
      const std::array<size_t, 2> ab{static_cast<size_t>(loop[i]), static_cast<size_t>(loop[(i + 1) % loop.size()])};
      const double len = (mesh.vertex(loop[(i + 1) % loop.size()]) - mesh.vertex(loop[i])).norm();
      // int l_a^3 = L/4, int l_a^2 l_b = L/12
      for (size_t x : ab) {
        for (size_t y : ab) {
          for (size_t k : ab) {
            const double moment = (x == y && y == k) ? len / 4.0 : len / 12.0;
            total += moment * w[x].dot(tensor[k] * w[y]);
          }
        }
      }
    }
  }
  return total;
}

Prop41Result prop41_check(const JacobiInput& input, const QuadraticFormAssembly& assembly, const EdgeCochain& w,
                          const AmbientDomain& domain, const Mat3& frame) {
  const TriSurfaceMesh& mesh = input.mesh;
  check_fields(mesh, input.fields);
  if (input.robin.size() != static_cast<size_t>(mesh.num_vertices())) {
    throw Error(ErrorKind::MissingGeometry, "Robin coefficient field is missing");
  }
  const TestFunctionSet t = build_test_functions(mesh, input.fields.normal, w, frame);
  Prop41Result r;
  r.part = w.flavor == Flavor::Normal ? 1 : 2;
  r.sum_q = sum_q(assembly, t);

  const auto nv = static_cast<size_t>(mesh.num_vertices());
  std::vector<Mat3> rhs_tensor(nv, Mat3::Zero());
  std::vector<Mat3> robin_tensor(nv, Mat3::Zero());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    const auto i = static_cast<size_t>(v);
    const BoundaryGeometry g = boundary_geometry(domain, mesh.vertex(v));
    robin_tensor[i] = input.robin[i] * Mat3::Identity();
    rhs_tensor[i] = r.part == 1 ? Mat3(g.mean_curvature * Mat3::Identity()) : Mat3(robin_tensor[i] + g.second_form);
  }
  r.boundary_integral = -boundary_tensor_integral(mesh, t.omega, rhs_tensor);
  r.relative_residual = std::abs(r.sum_q - r.boundary_integral) / std::max(std::abs(r.boundary_integral), 1e-300);

  const BochnerResult b = bochner_residuals(mesh, input.fields, w);
  r.identity_value = b.lhs - boundary_tensor_integral(mesh, t.omega, robin_tensor);
  r.identity_residual = relative_residual(r.identity_value, r.sum_q);
  return r;
}

double boundary_algebra_residual(const TriSurfaceMesh& mesh, const SurfaceFields& fields, const AmbientDomain& domain) {
  check_fields(mesh, fields);
  double worst = 0.0;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    if (!mesh.vertex_on_boundary(v)) continue;
    const auto i = static_cast<size_t>(v);
    const BoundaryGeometry g = boundary_geometry(domain, mesh.vertex(v));
    const double iinn = g.second_form_at(fields.normal[i], fields.normal[i]);
    worst = std::max(worst, std::abs(fields.boundary_curvature[i] + iinn - g.mean_curvature));
  }
  return worst;
}

BalancingMatrix balancing_rank(const TriSurfaceMesh& mesh, const std::vector<Vec3>& normal, const SparseMatrix& mass,
                               const HarmonicBasis& basis, const SpectralResult& spectrum, const Mat3& frame) {
  BalancingMatrix b;
  b.k = spectrum.negative_count;
  if (spectrum.eigenvectors.cols() < b.k) throw Error(ErrorKind::InvalidInput, "spectrum holds fewer than k eigenfunctions");
  const auto rows = static_cast<Eigen::Index>(basis.forms.size());
  b.matrix = Eigen::MatrixXd::Zero(rows, 3 * b.k);
  for (Eigen::Index c = 0; c < rows; ++c) {
    const TestFunctionSet t = build_test_functions(mesh, normal, basis.forms[static_cast<size_t>(c)], frame);
    for (int p = 0; p < 3; ++p) {
      const Eigen::VectorXd mu = mass * t.u[static_cast<size_t>(p)];
      for (int q = 0; q < b.k; ++q) b.matrix(c, p * b.k + q) = mu.dot(spectrum.eigenvectors.col(q));
    }
  }
  if (b.matrix.size() == 0) return b;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.matrix);
  b.singular_values = svd.singularValues();
  const double top = b.singular_values[0];
  for (Eigen::Index i = 0; i < b.singular_values.size(); ++i) {
    if (b.singular_values[i] > kBalancingRankCutoff * top) ++b.rank;
  }
  b.smallest_singular = b.singular_values[b.singular_values.size() - 1];
  b.relative_smallest = top > 0.0 ? b.smallest_singular / top : 0.0;
  return b;
}

std::string to_string(VerdictStatus status) {
  switch (status) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::NotApplicable: return "not-applicable";
  }
  return "unknown";
}

Verdict verdict_a(int index, int h1_relative, bool strictly_mean_convex) {
  return make_verdict("A", h1_relative / 3.0, "strictly mean convex domain", strictly_mean_convex, index);
}

Verdict verdict_b(int index, int boundary_components, bool strictly_mean_convex) {
  Verdict v = make_verdict("B", (boundary_components - 1) / 3.0, "strictly mean convex domain", strictly_mean_convex,
                           index);
  v.note = "stated for n >= 3; at n = 2 it is the r - 1 specialization of A, since dim H1(M,dM) >= r - 1";
  return v;
}

Verdict verdict_c(int index, int genus, int boundary_components, bool weakly_mean_convex) {
  return make_verdict("C", (2 * genus + boundary_components - 1) / 3.0, "mean convex domain", weakly_mean_convex,
                      index);
}

Verdict verdict_f(int index, int h1_relative, double alpha, bool strictly_two_convex) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in [0, 1]");
  // H_{n-1}(M, dM) = H_1(M, dM) at n = 2
  const double bound = (alpha * h1_relative + (1.0 - alpha) * h1_relative) / 3.0;
  Verdict v = make_verdict("F", bound, "strictly two-convex domain", strictly_two_convex, index);
  std::ostringstream note;
  note << "at n = 2, H_{n-1}(M,dM) = H_1(M,dM), so the bound equals the A bound for every alpha (alpha = " << alpha
       << ")";
  v.note = note.str();
  return v;
}

bool IndexCertificate::any_not_applicable() const {
  for (const auto& v : verdicts) {
    if (v.status == VerdictStatus::NotApplicable) return true;
  }
  return false;
}

bool IndexCertificate::any_failed() const {
  for (const auto& v : verdicts) {
    if (v.status == VerdictStatus::Fail) return true;
  }
  return false;
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(IndexCertificate& cert) : cert_(cert) {}
  // Runs `body`; errors are recorded under `stage` rather than propagated.
  bool run(const std::string& stage, const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    try {
      body();
    } catch (const std::exception& e) {
      cert_.errors.push_back(stage + ": " + e.what());
      ok = false;
    }
    cert_.timings.emplace_back(stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return ok;
  }

 private:
  IndexCertificate& cert_;
};

IndexCertificate run_pipeline(const std::string& name, const JacobiInput& input, const AmbientDomain& domain,
                              const CertifyOptions& options, const std::function<MorseIndexReport()>& morse) {
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in [0, 1]");
  IndexCertificate cert;
  cert.surface = name;
  cert.analytic_fields = input.fields.analytic;
  cert.vertices = input.mesh.num_vertices();
  StageTimer stage(cert);
  const TriSurfaceMesh& mesh = input.mesh;

  stage.run("homology", [&] {
    cert.topology = topology(mesh);
    cert.homology = homology_profile(mesh);
  });
  stage.run("convexity", [&] {
    cert.convexity = classify_convexity(domain, options.convexity_samples, 1, options.convexity_margin);
    cert.hypotheses = cert.convexity.effective();
  });
  const bool have_index = stage.run("spectrum", [&] {
    cert.morse = morse();
    cert.index = cert.morse.index;
  });
  QuadraticFormAssembly assembly;
  const bool have_base = stage.run("base spectrum", [&] {
    assembly = assemble(mesh, input.fields.a2, input.robin);
    cert.base_spectrum = solve_spectrum(assembly, options.m, options.mode);
  });
  stage.run("boundary algebra", [&] { cert.boundary_algebra = boundary_algebra_residual(mesh, input.fields, domain); });

  std::optional<HarmonicBasis> normal_basis;
  for (Flavor flavor : {Flavor::Normal, Flavor::Tangential}) {
    stage.run("hodge " + to_string(flavor), [&] {
      HarmonicBasis basis = harmonic_basis(mesh, flavor);
      cert.hodge.push_back({flavor, basis.dimension(), basis.homology_dimension, basis.gap, basis.largest_kernel,
                            basis.warnings});
      for (const EdgeCochain& w : basis.forms) {
        (flavor == Flavor::Normal ? cert.bochner_1 : cert.bochner_2).push_back(bochner_residuals(mesh, input.fields, w));
        if (have_base) {
          (flavor == Flavor::Normal ? cert.prop41_1 : cert.prop41_2).push_back(prop41_check(input, assembly, w, domain));
        }
      }
      if (flavor == Flavor::Normal) normal_basis = std::move(basis);
    });
  }
  if (normal_basis && have_base) {
    stage.run("balancing", [&] {
      cert.balancing = balancing_rank(mesh, input.fields.normal, assembly.mass, *normal_basis, cert.base_spectrum);
    });
  }

  stage.run("verdicts", [&] {
    if (!have_index) throw Error(ErrorKind::SolverNoConvergence, "no index available; verdicts not issued");
    const ConvexityCertificate& h = cert.hypotheses;
    cert.verdicts = {verdict_a(cert.index, cert.homology.h1_relative, h.strictly_mean_convex),
                     verdict_b(cert.index, cert.topology.boundary_components, h.strictly_mean_convex),
                     verdict_c(cert.index, cert.topology.genus, cert.topology.boundary_components, h.weakly_mean_convex),
                     verdict_f(cert.index, cert.homology.h1_relative, options.alpha, h.strictly_two_convex)};
  });
  return cert;
}

}  // namespace

IndexCertificate certify(const ExemplarSurface& exemplar, const AmbientDomain& domain, const CertifyOptions& options) {
  const JacobiInput input = exemplar_input(exemplar, sample_mesh(exemplar, options.resolution), &domain);
  return run_pipeline(exemplar.name(), input, domain, options, [&] {
    return morse_index(exemplar, options.resolution, options.refinements, options.m, options.mode, &domain);
  });
}

IndexCertificate certify(const ExemplarSurface& exemplar, const CertifyOptions& options) {
  return certify(exemplar, exemplar.domain(), options);
}

IndexCertificate certify(const TriSurfaceMesh& mesh, const AmbientDomain& domain, const CertifyOptions& options,
                         const std::vector<double>* a2, const std::string& name) {
  JacobiInput input = mesh_input(mesh, domain);
  if (a2 != nullptr) {
    if (a2->size() != static_cast<size_t>(mesh.num_vertices())) {
      throw Error(ErrorKind::MissingField, "|A|^2 field size does not match vertex count");
    }
    input.fields.a2 = *a2;
  }
  return run_pipeline(name, input, domain, options,
                      [&] { return morse_index(mesh, domain, options.refinements, options.m, options.mode, a2); });
}

}  // namespace fbms
