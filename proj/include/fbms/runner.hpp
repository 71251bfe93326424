#pragma once

#include "fbms/index_bounds.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace fbms {

using Json = nlohmann::ordered_json;

std::string version();

struct RunConfig {
  std::string subcommand;               // exemplar | index | hodge | certify | convergence
  std::string mesh;                     // mesh path
  std::string fields;                   // |A|^2 sidecar path (optional)
  std::string exemplar;                 // exemplar name
  std::string domain;                   // empty: the exemplar's own, "ball r=1" for meshes
  std::string flavor = "normal";
  std::optional<int> resolution;        // default 32, 16 for convergence
  int refinements = 2;
  int m = 12;
  double alpha = 0.5;
  int levels = 3;
  std::string mode = "auto";            // auto | dense | iterative
  std::string out;
  bool deterministic = false;
  // tolerance overrides
  int convexity_samples = 2000;
  double convexity_margin = 1e-8;

  int effective_resolution() const;
  // Throws Error{InvalidInput} on out-of-range values.
  void validate() const;
};

Json to_json(const RunConfig& config);
SolverMode parse_mode(const std::string& text);

Json certificate_json(const IndexCertificate& cert, bool deterministic);
Json basis_json(const TriSurfaceMesh& mesh, const HarmonicBasis& basis);

// Per-level table for an exemplar at resolutions r, 2r, 4r, ... with index,
// harmonic dimensions and all identity residuals, plus log2 ratios of
// successive residuals. Orders are reported, not judged.
Json convergence_study(const RunConfig& config);

struct RunOutcome {
  int exit_code = 0;
  Json report;
  std::string summary;
};

// Executes the subcommand without touching the report file. Pipeline errors
// are caught and serialized into the report with exit code 1.
RunOutcome execute(const RunConfig& config);

// execute() plus report persistence (config.out) and the printed summary.
// Exit codes: 0 success, 2 some verdict not applicable, 1 errors or a failed verdict.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace fbms
