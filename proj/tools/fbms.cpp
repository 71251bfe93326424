// fbms: Morse index and harmonic form checks for free boundary minimal surfaces.

#include "fbms/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_common(CLI::App* app, fbms::RunConfig& c) {
  app->add_option("--out", c.out, "Report path (JSON)");
  app->add_flag("--deterministic", c.deterministic, "Omit timings so repeated runs give identical reports");
  app->add_option("--mode", c.mode, "Eigensolver: auto, dense or iterative")
      ->check(CLI::IsMember({"auto", "dense", "iterative"}));
}

void add_source(CLI::App* app, fbms::RunConfig& c) {
  app->add_option("--mesh", c.mesh, "Mesh file (FBMS-MESH)");
  app->add_option("--exemplar", c.exemplar, "Built-in exemplar: disk or catenoid");
  app->add_option("--resolution", c.resolution, "Exemplar sampling resolution (>= 4)");
}

void add_domain(CLI::App* app, fbms::RunConfig& c) {
  app->add_option("--domain", c.domain, "Ambient domain, e.g. \"ball r=1\", \"ellipsoid a=2,b=1,c=1\"");
}

void add_spectrum(CLI::App* app, fbms::RunConfig& c) {
  app->add_option("--refine", c.refinements, "Midpoint refinement levels in [0, 5]");
  app->add_option("--m", c.m, "Number of eigenpairs");
}

void add_tolerances(CLI::App* app, fbms::RunConfig& c) {
  app->add_option("--convexity-samples", c.convexity_samples, "Boundary samples for the convexity classifier");
  app->add_option("--convexity-margin", c.convexity_margin, "Strictness margin for convexity flags");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Morse index verification for free boundary minimal surfaces"};
  app.set_version_flag("--version", fbms::version());
  app.require_subcommand(1);
  fbms::RunConfig c;

  auto* exemplar = app.add_subcommand("exemplar", "Write an exemplar mesh and its |A|^2 sidecar");
  exemplar->add_option("--name", c.exemplar, "disk or catenoid")->required();
  exemplar->add_option("--resolution", c.resolution, "Sampling resolution (>= 4)");
  exemplar->add_option("--out", c.out, "Mesh path; the sidecar goes next to it as <stem>.fields.txt")->required();

  auto* index = app.add_subcommand("index", "Morse index with the Robin boundary term");
  add_source(index, c);
  index->add_option("--fields", c.fields, "Per-vertex |A|^2 sidecar (FBMS-FIELD)");
  add_domain(index, c);
  add_spectrum(index, c);
  add_common(index, c);

  auto* hodge = app.add_subcommand("hodge", "Harmonic 1-form basis");
  add_source(hodge, c);
  hodge->add_option("--flavor", c.flavor, "normal or tangential boundary condition");
  add_common(hodge, c);

  auto* certify = app.add_subcommand("certify", "Full pipeline: index, harmonic forms, identities, verdicts");
  add_source(certify, c);
  certify->add_option("--fields", c.fields, "Per-vertex |A|^2 sidecar (FBMS-FIELD)");
  add_domain(certify, c);
  add_spectrum(certify, c);
  certify->add_option("--alpha", c.alpha, "Weight in [0, 1] for Theorem F");
  add_tolerances(certify, c);
  add_common(certify, c);

  auto* convergence = app.add_subcommand("convergence", "Residuals over resolutions r, 2r, 4r, ...");
  convergence->add_option("--exemplar", c.exemplar, "disk or catenoid")->required();
  convergence->add_option("--resolution", c.resolution, "Base resolution (default 16)");
  convergence->add_option("--levels", c.levels, "Number of levels");
  add_domain(convergence, c);
  convergence->add_option("--m", c.m, "Number of eigenpairs");
  add_tolerances(convergence, c);
  add_common(convergence, c);

  CLI11_PARSE(app, argc, argv);
  c.subcommand = app.get_subcommands().front()->get_name();
  return fbms::run(c, std::cout, std::cerr);
}
