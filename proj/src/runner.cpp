#include "fbms/runner.hpp"

#include "fbms/errors.hpp"
#include "fbms/mesh_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fbms {

std::string version() { return FBMS_VERSION; }

int RunConfig::effective_resolution() const {
  if (resolution) return *resolution;
  return subcommand == "convergence" ? 16 : 32;
}

void RunConfig::validate() const {
  static const char* kSubcommands[] = {"exemplar", "index", "hodge", "certify", "convergence"};
  bool known = false;
  for (const char* name : kSubcommands) known = known || subcommand == name;
  if (!known) throw Error(ErrorKind::InvalidInput, "unknown subcommand '" + subcommand + "'");
  if (effective_resolution() < 4) throw Error(ErrorKind::InvalidInput, "resolution must be >= 4");
  if (refinements < 0 || refinements > 5) throw Error(ErrorKind::InvalidInput, "refinements must lie in [0, 5]");
  if (m < 1) throw Error(ErrorKind::InvalidInput, "m must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::InvalidInput, "alpha must lie in [0, 1]");
  if (levels < 1 || levels > 6) throw Error(ErrorKind::InvalidInput, "levels must lie in [1, 6]");
  if (convexity_samples < 1) throw Error(ErrorKind::InvalidInput, "convexity samples must be >= 1");
  if (!(convexity_margin >= 0.0)) throw Error(ErrorKind::InvalidInput, "convexity margin must be >= 0");
  parse_mode(mode);
  parse_flavor(flavor);
  const bool has_mesh = !mesh.empty();
  const bool has_exemplar = !exemplar.empty();
  if (subcommand == "exemplar") {
    if (!has_exemplar) throw Error(ErrorKind::InvalidInput, "exemplar needs --name");
    if (out.empty()) throw Error(ErrorKind::InvalidInput, "exemplar needs --out");
  } else if (subcommand == "convergence") {
    if (!has_exemplar) throw Error(ErrorKind::InvalidInput, "convergence needs --exemplar");
  } else {
    if (has_mesh == has_exemplar) throw Error(ErrorKind::InvalidInput, "give exactly one of --mesh or --exemplar");
  }
  if (!fields.empty() && !has_mesh) throw Error(ErrorKind::InvalidInput, "--fields requires --mesh");
}

Json to_json(const RunConfig& c) {
  Json j;
  j["subcommand"] = c.subcommand;
  j["mesh"] = c.mesh;
  j["fields"] = c.fields;
  j["exemplar"] = c.exemplar;
  j["domain"] = c.domain;
  j["flavor"] = c.flavor;
  j["resolution"] = c.effective_resolution();
  j["refinements"] = c.refinements;
  j["m"] = c.m;
  j["alpha"] = c.alpha;
  j["levels"] = c.levels;
  j["mode"] = c.mode;
  j["out"] = c.out;
  j["deterministic"] = c.deterministic;
  j["tolerances"] = {{"convexity_samples", c.convexity_samples}, {"convexity_margin", c.convexity_margin}};
  return j;
}

SolverMode parse_mode(const std::string& text) {
  if (text == "auto") return SolverMode::Auto;
  if (text == "dense") return SolverMode::Dense;
  if (text == "iterative") return SolverMode::Iterative;
  throw Error(ErrorKind::ParseError, "unknown solver mode '" + text + "'");
}

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json verdict_json(const Verdict& v) {
  return {{"bound", v.bound},
          {"integer_bound", v.integer_bound},
          {"hypothesis", v.hypothesis},
          {"hypothesis_satisfied", v.hypothesis_satisfied},
          {"status", to_string(v.status)},
          {"note", v.note}};
}

Json prop41_json(const std::vector<Prop41Result>& results) {
  Json forms = Json::array();
  double worst = 0.0;
  double worst_identity = 0.0;
  for (const auto& r : results) {
    forms.push_back({{"sum_q", r.sum_q},
                     {"boundary_integral", r.boundary_integral},
                     {"relative_residual", r.relative_residual},
                     {"identity_value", r.identity_value},
                     {"identity_residual", r.identity_residual}});
    worst = std::max(worst, r.relative_residual);
    worst_identity = std::max(worst_identity, r.identity_residual);
  }
  if (results.empty()) return {{"applicable", false}, {"forms", forms}};
  return {{"applicable", true},
          {"max_relative_residual", worst},
          {"max_identity_residual", worst_identity},
          {"forms", forms}};
}

Json bochner_json(const std::vector<BochnerResult>& results) {
  Json forms = Json::array();
  double worst = 0.0;
  for (const auto& r : results) {
    forms.push_back({{"gradient_term", r.gradient_term},
                     {"curvature_term", r.curvature_term},
                     {"lhs", r.lhs},
                     {"rhs", r.rhs},
                     {"relative_residual", r.relative_residual}});
    worst = std::max(worst, r.relative_residual);
  }
  if (results.empty()) return {{"applicable", false}, {"forms", forms}};
  return {{"applicable", true}, {"max_relative_residual", worst}, {"forms", forms}};
}

Json levels_json(const MorseIndexReport& morse, bool deterministic) {
  Json levels = Json::array();
  for (const auto& l : morse.levels) {
    Json j = {{"vertices", l.vertices},
              {"negative_count", l.negative_count},
              {"lambda1", l.lambda1},
              {"mode", to_string(l.mode)}};
    if (!deterministic) j["seconds"] = l.seconds;
    levels.push_back(j);
  }
  return levels;
}

Json spectrum_json(const MorseIndexReport& morse, bool deterministic) {
  return {{"eigenvalues", vector_json(morse.finest.eigenvalues)},
          {"index", morse.index},
          {"threshold", morse.finest.zero_threshold},
          {"stable", morse.stable},
          {"mode", to_string(morse.finest.mode)},
          {"iterations", morse.finest.iterations},
          {"max_residual", morse.finest.residuals.size() ? morse.finest.residuals.maxCoeff() : 0.0},
          {"levels", levels_json(morse, deterministic)}};
}

Json error_json(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return {{"kind", std::string(to_string(err->kind()))}, {"message", err->what()}};
  }
  return {{"kind", "Internal"}, {"message", e.what()}};
}

Json envelope(const RunConfig& config) {
  Json j;
  j["tool"] = "fbms";
  j["version"] = version();
  j["config"] = to_json(config);
  return j;
}

std::vector<double> load_fields(const RunConfig& config) {
  if (config.fields.empty()) return {};
  return read_field(std::filesystem::path(config.fields));
}

AmbientDomain resolve_domain(const RunConfig& config, const ExemplarSurface* exemplar) {
  if (!config.domain.empty()) return make_domain(config.domain);
  if (exemplar != nullptr) return exemplar->domain();
  return ball_domain(1.0);
}

CertifyOptions certify_options(const RunConfig& config, int resolution, int refinements) {
  CertifyOptions o;
  o.resolution = resolution;
  o.refinements = refinements;
  o.m = config.m;
  o.alpha = config.alpha;
  o.mode = parse_mode(config.mode);
  o.convexity_samples = config.convexity_samples;
  o.convexity_margin = config.convexity_margin;
  return o;
}

std::filesystem::path sidecar_path(const std::filesystem::path& mesh_path) {
  std::filesystem::path p = mesh_path;
  p.replace_extension(".fields.txt");
  return p;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

RunOutcome run_exemplar(const RunConfig& config) {
  RunOutcome o;
  const ExemplarSurface ex = exemplar_by_name(config.exemplar);
  const TriSurfaceMesh mesh = sample_mesh(ex, config.effective_resolution());
  const SurfaceFields fields = exemplar_fields(ex, mesh);
  const std::filesystem::path mesh_path(config.out);
  const std::filesystem::path field_path = sidecar_path(mesh_path);
  write_mesh(mesh_path, mesh);
  write_field(field_path, fields.a2);
  const Topology t = topology(mesh);
  o.report["surface"] = ex.name();
  o.report["mesh"] = mesh_path.string();
  o.report["fields"] = field_path.string();
  o.report["vertices"] = mesh.num_vertices();
  o.report["triangles"] = mesh.num_triangles();
  o.report["topology"] = {{"g", t.genus}, {"r", t.boundary_components}, {"chi", t.euler_characteristic}};
  o.summary = ex.name() + ": " + std::to_string(mesh.num_vertices()) + " vertices, " +
              std::to_string(mesh.num_triangles()) + " triangles -> " + mesh_path.string() + " (+ " +
              field_path.string() + ")\n";
  return o;
}

RunOutcome run_index(const RunConfig& config) {
  RunOutcome o;
  const SolverMode mode = parse_mode(config.mode);
  MorseIndexReport morse;
  std::string surface;
  if (!config.exemplar.empty()) {
    const ExemplarSurface ex = exemplar_by_name(config.exemplar);
    const AmbientDomain domain = resolve_domain(config, &ex);
    morse = morse_index(ex, config.effective_resolution(), config.refinements, config.m, mode, &domain);
    surface = ex.name();
    o.report["domain"] = domain.spec();
  } else {
    const TriSurfaceMesh mesh = read_mesh(std::filesystem::path(config.mesh));
    const std::vector<double> a2 = load_fields(config);
    const AmbientDomain domain = resolve_domain(config, nullptr);
    if (!a2.empty() && a2.size() != static_cast<size_t>(mesh.num_vertices())) {
      throw Error(ErrorKind::MissingField, "field has " + std::to_string(a2.size()) + " values for " +
                                               std::to_string(mesh.num_vertices()) + " vertices");
    }
    morse = morse_index(mesh, domain, config.refinements, config.m, mode, a2.empty() ? nullptr : &a2);
    surface = config.mesh;
    o.report["domain"] = domain.spec();
  }
  o.report["surface"] = surface;
  o.report["spectrum"] = spectrum_json(morse, config.deterministic);
  std::ostringstream s;
  s << surface << ": Morse index " << morse.index << (morse.stable ? " (stable" : " (NOT stable")
    << " across the last two levels)\n";
  for (const auto& l : morse.levels) {
    s << "  " << std::setw(8) << l.vertices << " vertices  index " << l.negative_count << "  lambda1 " << fmt(l.lambda1, 6)
      << "\n";
  }
  o.summary = s.str();
  return o;
}

RunOutcome run_hodge(const RunConfig& config) {
  RunOutcome o;
  TriSurfaceMesh mesh;
  if (!config.exemplar.empty()) {
    const ExemplarSurface ex = exemplar_by_name(config.exemplar);
    mesh = sample_mesh(ex, config.effective_resolution());
    o.report["surface"] = ex.name();
  } else {
    mesh = read_mesh(std::filesystem::path(config.mesh));
    o.report["surface"] = config.mesh;
  }
  const HarmonicBasis basis = harmonic_basis(mesh, parse_flavor(config.flavor));
  o.report["basis"] = basis_json(mesh, basis);
  o.summary = o.report["surface"].get<std::string>() + ": " + to_string(basis.flavor) + " harmonic dimension " +
              std::to_string(basis.dimension()) + " (homology " + std::to_string(basis.homology_dimension) +
              "), spectral gap " + fmt(basis.gap) + "\n";
  for (const auto& w : basis.warnings) o.summary += "  warning: " + w + "\n";
  return o;
}

std::string certificate_summary(const IndexCertificate& cert) {
  std::ostringstream s;
  s << cert.surface << ": g=" << cert.topology.genus << " r=" << cert.topology.boundary_components
    << " dim H1(M,dM)=" << cert.homology.h1_relative << "  Morse index " << cert.index << "\n";
  for (const auto& h : cert.hodge) {
    s << "  harmonic " << to_string(h.flavor) << ": " << h.dimension << " (gap " << fmt(h.gap) << ")\n";
  }
  auto worst = [](const auto& v) {
    double w = 0.0;
    for (const auto& r : v) w = std::max(w, r.relative_residual);
    return w;
  };
  if (!cert.prop41_1.empty()) s << "  sum Q identity (normal): " << fmt(worst(cert.prop41_1)) << "\n";
  if (!cert.prop41_2.empty()) s << "  sum Q identity (tangential): " << fmt(worst(cert.prop41_2)) << "\n";
  if (!cert.bochner_1.empty()) s << "  Bochner (normal): " << fmt(worst(cert.bochner_1)) << "\n";
  if (!cert.bochner_2.empty()) s << "  Bochner (tangential): " << fmt(worst(cert.bochner_2)) << "\n";
  if (cert.balancing) {
    s << "  balancing rank " << cert.balancing->rank << " of " << cert.balancing->matrix.rows() << "\n";
  }
  for (const auto& v : cert.verdicts) {
    if (v.theorem.empty()) continue;
    s << "  Theorem " << v.theorem << ": " << to_string(v.status) << " (bound " << fmt(v.bound) << " -> "
      << v.integer_bound << ", index " << cert.index << ")\n";
  }
  for (const auto& e : cert.errors) s << "  error: " << e << "\n";
  return s.str();
}

int certificate_exit_code(const IndexCertificate& cert) {
  if (!cert.errors.empty() || cert.any_failed()) return 1;
  if (cert.any_not_applicable()) return 2;
  return 0;
}

IndexCertificate certify_config(const RunConfig& config, int resolution, int refinements) {
  const CertifyOptions options = certify_options(config, resolution, refinements);
  if (!config.exemplar.empty()) {
    const ExemplarSurface ex = exemplar_by_name(config.exemplar);
    return certify(ex, resolve_domain(config, &ex), options);
  }
  const TriSurfaceMesh mesh = read_mesh(std::filesystem::path(config.mesh));
  const std::vector<double> a2 = load_fields(config);
  return certify(mesh, resolve_domain(config, nullptr), options, a2.empty() ? nullptr : &a2, config.mesh);
}

RunOutcome run_certify(const RunConfig& config) {
  RunOutcome o;
  const IndexCertificate cert = certify_config(config, config.effective_resolution(), config.refinements);
  o.report.update(certificate_json(cert, config.deterministic));
  o.summary = certificate_summary(cert);
  o.exit_code = certificate_exit_code(cert);
  return o;
}

RunOutcome run_convergence(const RunConfig& config) {
  RunOutcome o;
  o.report.update(convergence_study(config));
  std::ostringstream s;
  s << o.report["surface"].get<std::string>() << " convergence study\n";
  s << "  resolution  vertices  index  dim_N  dim_T  prop41_1   prop41_2   bochner_1  bochner_2\n";
  auto cell = [](const Json& j) { return j.is_null() ? std::string("-") : fmt(j.get<double>(), 3); };
  for (const auto& l : o.report["levels"]) {
    s << "  " << std::setw(10) << l["resolution"].get<int>() << std::setw(10) << l["vertices"].get<int>()
      << std::setw(7) << l["index"].get<int>() << std::setw(7) << l["harmonic_dims"]["normal"].get<int>()
      << std::setw(7) << l["harmonic_dims"]["tangential"].get<int>();
    for (const char* key : {"prop41_1", "prop41_2", "bochner_1", "bochner_2"}) {
      s << "  " << std::setw(9) << cell(l["residuals"][key]);
    }
    s << "\n";
  }
  s << "  orders:";
  for (const auto& [key, values] : o.report["orders"].items()) {
    s << " " << key << "=[";
    for (size_t i = 0; i < values.size(); ++i) s << (i ? ", " : "") << cell(values[i]);
    s << "]";
  }
  s << "\n";
  o.summary = s.str();
  o.exit_code = o.report["diagnostics"]["errors"].empty() ? 0 : 1;
  return o;
}

}  // namespace

Json certificate_json(const IndexCertificate& cert, bool deterministic) {
  Json j;
  j["surface"] = cert.surface;
  j["analytic_fields"] = cert.analytic_fields;
  j["vertices"] = cert.vertices;
  j["topology"] = {{"g", cert.topology.genus},
                   {"r", cert.topology.boundary_components},
                   {"chi", cert.topology.euler_characteristic}};
  const HomologyProfile& h = cert.homology;
  j["homology"] = {{"h0", h.h0},
                   {"h1", h.h1},
                   {"h1_rel", h.h1_relative},
                   {"im_istar", h.image_istar},
                   {"h0_boundary", h.h0_boundary},
                   {"long_exact_sequence", h.long_exact_sequence_holds()},
                   {"exact_rank_checked", h.exact_rank_checked}};
  const ConvexityReport& c = cert.convexity;
  j["convexity"] = {
      {"flags",
       {{"strictly_convex", c.strictly_convex},
        {"strictly_two_convex", c.strictly_two_convex},
        {"strictly_mean_convex", c.strictly_mean_convex},
        {"weakly_mean_convex", c.weakly_mean_convex}}},
      {"margins",
       {{"min_mean_curvature", c.min_mean_curvature},
        {"min_pair_sum", c.min_pair_sum},
        {"min_principal", c.min_principal},
        {"margin", c.margin},
        {"samples", c.samples}}},
      {"analytic_certificate", c.certificate.has_value()},
      {"effective",
       {{"strictly_convex", cert.hypotheses.strictly_convex},
        {"strictly_two_convex", cert.hypotheses.strictly_two_convex},
        {"strictly_mean_convex", cert.hypotheses.strictly_mean_convex},
        {"weakly_mean_convex", cert.hypotheses.weakly_mean_convex}}}};
  j["spectrum"] = spectrum_json(cert.morse, deterministic);
  j["spectrum"]["index"] = cert.index;
  j["spectrum"]["base_eigenvalues"] = vector_json(cert.base_spectrum.eigenvalues);
  j["spectrum"]["base_index"] = cert.base_spectrum.negative_count;

  Json dims = Json::object(), homology_dims = Json::object(), gaps = Json::object(), warnings = Json::object();
  for (const auto& s : cert.hodge) {
    const std::string key = to_string(s.flavor);
    dims[key] = s.dimension;
    homology_dims[key] = s.homology_dimension;
    gaps[key] = s.gap;
    warnings[key] = s.warnings;
  }
  j["hodge"] = {{"dims", dims}, {"homology_dims", homology_dims}, {"gaps", gaps}, {"warnings", warnings}};

  j["identities"] = {{"prop41_1", prop41_json(cert.prop41_1)},
                     {"prop41_2", prop41_json(cert.prop41_2)},
                     {"bochner_1", bochner_json(cert.bochner_1)},
                     {"bochner_2", bochner_json(cert.bochner_2)},
                     {"boundary_algebra", cert.boundary_algebra ? Json(*cert.boundary_algebra) : Json(nullptr)}};
  if (cert.balancing) {
    const BalancingMatrix& b = *cert.balancing;
    j["balancing"] = {{"rows", b.matrix.rows()},
                      {"columns", b.matrix.cols()},
                      {"k", b.k},
                      {"rank", b.rank},
                      {"singular_values", vector_json(b.singular_values)},
                      {"smallest_singular", b.smallest_singular},
                      {"relative_smallest", b.relative_smallest}};
  } else {
    j["balancing"] = nullptr;
  }
  Json verdicts = Json::object();
  for (const auto& v : cert.verdicts) {
    if (!v.theorem.empty()) verdicts[v.theorem] = verdict_json(v);
  }
  j["verdicts"] = verdicts;
  Json diagnostics;
  diagnostics["errors"] = cert.errors;
  if (!deterministic) {
    Json timings = Json::object();
    for (const auto& [stage, seconds] : cert.timings) timings[stage] = seconds;
    diagnostics["timings"] = timings;
  }
  j["diagnostics"] = diagnostics;
  return j;
}

Json basis_json(const TriSurfaceMesh& mesh, const HarmonicBasis& basis) {
  Json j;
  j["flavor"] = to_string(basis.flavor);
  j["dimension"] = basis.dimension();
  j["homology_dimension"] = basis.homology_dimension;
  j["largest_kernel"] = basis.largest_kernel;
  j["gap"] = basis.gap;
  j["threshold"] = basis.threshold;
  j["eigenvalues"] = vector_json(basis.eigenvalues);
  Json edges = Json::array();
  for (const auto& e : mesh.edges()) edges.push_back({e.v0, e.v1});
  j["edges"] = edges;
  Json forms = Json::array();
  for (const auto& w : basis.forms) forms.push_back(vector_json(w.values));
  j["forms"] = forms;
  Json gram = Json::array();
  for (Eigen::Index r = 0; r < basis.gram.rows(); ++r) gram.push_back(vector_json(basis.gram.row(r).transpose()));
  j["gram"] = gram;
  j["curl_energy"] = basis.curl_energy;
  j["divergence_energy"] = basis.divergence_energy;
  j["warnings"] = basis.warnings;
  return j;
}

Json convergence_study(const RunConfig& config) {
  const ExemplarSurface ex = exemplar_by_name(config.exemplar);
  Json report;
  report["surface"] = ex.name();
  Json levels = Json::array();
  Json errors = Json::array();
  static const char* kKeys[] = {"prop41_1", "prop41_2", "identity_1", "identity_2", "bochner_1", "bochner_2"};
  auto worst = [](const auto& v, auto member) -> Json {
    if (v.empty()) return nullptr;
    double w = 0.0;
    for (const auto& r : v) w = std::max(w, r.*member);
    return w;
  };
  for (int level = 0; level < config.levels; ++level) {
    const int resolution = config.effective_resolution() << level;
    const IndexCertificate cert = certify_config(config, resolution, 0);
    Json row;
    row["level"] = level;
    row["resolution"] = resolution;
    row["vertices"] = cert.vertices;
    row["index"] = cert.index;
    row["h1"] = cert.homology.h1;
    row["h1_rel"] = cert.homology.h1_relative;
    Json dims = {{"normal", 0}, {"tangential", 0}};
    for (const auto& s : cert.hodge) dims[to_string(s.flavor)] = s.dimension;
    row["harmonic_dims"] = dims;
    Json residuals;
    residuals["prop41_1"] = worst(cert.prop41_1, &Prop41Result::relative_residual);
    residuals["prop41_2"] = worst(cert.prop41_2, &Prop41Result::relative_residual);
    residuals["identity_1"] = worst(cert.prop41_1, &Prop41Result::identity_residual);
    residuals["identity_2"] = worst(cert.prop41_2, &Prop41Result::identity_residual);
    residuals["bochner_1"] = worst(cert.bochner_1, &BochnerResult::relative_residual);
    residuals["bochner_2"] = worst(cert.bochner_2, &BochnerResult::relative_residual);
    residuals["boundary_algebra"] = cert.boundary_algebra ? Json(*cert.boundary_algebra) : Json(nullptr);
    row["residuals"] = residuals;
    row["balancing_rank"] = cert.balancing ? Json(cert.balancing->rank) : Json(nullptr);
    for (const auto& e : cert.errors) errors.push_back("resolution " + std::to_string(resolution) + ": " + e);
    levels.push_back(row);
  }
  Json orders = Json::object();
  for (const char* key : kKeys) {
    Json column = Json::array();
    for (size_t l = 0; l + 1 < levels.size(); ++l) {
      const Json& a = levels[l]["residuals"][key];
      const Json& b = levels[l + 1]["residuals"][key];
      if (a.is_number() && b.is_number() && a.get<double>() > 0.0 && b.get<double>() > 0.0) {
        column.push_back(std::log2(a.get<double>() / b.get<double>()));
      } else {
        column.push_back(nullptr);
      }
    }
    orders[key] = column;
  }
  report["levels"] = levels;
  report["orders"] = orders;
  report["diagnostics"] = {{"errors", errors}};
  return report;
}

RunOutcome execute(const RunConfig& config) {
  RunOutcome o;
  o.report = envelope(config);
  try {
    config.validate();
    RunOutcome body;
    if (config.subcommand == "exemplar") body = run_exemplar(config);
    else if (config.subcommand == "index") body = run_index(config);
    else if (config.subcommand == "hodge") body = run_hodge(config);
    else if (config.subcommand == "certify") body = run_certify(config);
    else body = run_convergence(config);
    o.report.update(body.report);
    o.summary = body.summary;
    o.exit_code = body.exit_code;
  } catch (const std::exception& e) {
    o.report["diagnostics"]["errors"].push_back(error_json(e));
    o.summary = std::string("error: ") + e.what() + "\n";
    o.exit_code = 1;
  }
  o.report["exit_code"] = o.exit_code;
  return o;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  RunOutcome o = execute(config);
  (o.summary.rfind("error: ", 0) == 0 ? err : out) << o.summary;
  // The exemplar subcommand's --out is the mesh itself.
  if (!config.out.empty() && config.subcommand != "exemplar") {
    std::ofstream file(config.out);
    if (!file) {
      err << "error: cannot write report to " << config.out << "\n";
      return 1;
    }
    file << o.report.dump(2) << "\n";
  }
  return o.exit_code;
}

}  // namespace fbms
