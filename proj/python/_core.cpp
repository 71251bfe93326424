#include "fbms/errors.hpp"
#include "fbms/mesh_io.hpp"
#include "fbms/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fbms;

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrixXd vertex_array(const TriSurfaceMesh& m) {
  RowMatrixXd v(m.num_vertices(), 3);
  for (int i = 0; i < m.num_vertices(); ++i) v.row(i) = m.vertex(i).transpose();
  return v;
}

RowMatrixXi triangle_array(const TriSurfaceMesh& m) {
  RowMatrixXi t(m.num_triangles(), 3);
  for (int f = 0; f < m.num_triangles(); ++f) {
    for (int k = 0; k < 3; ++k) t(f, k) = m.triangle(f)[k];
  }
  return t;
}

RowMatrixXi edge_array(const TriSurfaceMesh& m) {
  RowMatrixXi e(m.num_edges(), 2);
  for (int i = 0; i < m.num_edges(); ++i) {
    e(i, 0) = m.edge(i).v0;
    e(i, 1) = m.edge(i).v1;
  }
  return e;
}

TriSurfaceMesh mesh_from_arrays(const RowMatrixXd& v, const RowMatrixXi& t) {
  if (v.cols() != 3 || t.cols() != 3) throw Error(ErrorKind::InvalidInput, "expected (n, 3) arrays");
  std::vector<Vec3> verts(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) verts[i] = v.row(i).transpose();
  std::vector<Tri> tris(t.rows());
  for (Eigen::Index f = 0; f < t.rows(); ++f) tris[f] = {t(f, 0), t(f, 1), t(f, 2)};
  return build_mesh(std::move(verts), std::move(tris));
}

py::dict morse_dict(const MorseIndexReport& r) {
  py::dict d;
  d["index"] = r.index;
  d["stable"] = r.stable;
  d["eigenvalues"] = r.finest.eigenvalues;
  d["threshold"] = r.finest.zero_threshold;
  py::list levels;
  for (const auto& l : r.levels) {
    levels.append(py::dict(py::arg("vertices") = l.vertices, py::arg("negative_count") = l.negative_count,
                           py::arg("lambda1") = l.lambda1));
  }
  d["levels"] = levels;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Morse index and harmonic form checks for free boundary minimal surfaces";

  static py::exception<Error> error(m, "FbmsError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object kind = py::str(std::string(to_string(e.kind())));
      PyErr_SetObject(error.ptr(), py::make_tuple(py::str(e.what()), kind).ptr());
    }
  });

  m.def("version", &version);

  py::class_<TriSurfaceMesh>(m, "Mesh")
      .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("triangles"))
      .def_property_readonly("num_vertices", &TriSurfaceMesh::num_vertices)
      .def_property_readonly("num_edges", &TriSurfaceMesh::num_edges)
      .def_property_readonly("num_triangles", &TriSurfaceMesh::num_triangles)
      .def_property_readonly("vertices", &vertex_array)
      .def_property_readonly("triangles", &triangle_array)
      .def_property_readonly("edges", &edge_array)
      .def("topology", [](const TriSurfaceMesh& mesh) {
        const Topology t = topology(mesh);
        return py::dict(py::arg("g") = t.genus, py::arg("r") = t.boundary_components,
                        py::arg("chi") = t.euler_characteristic);
      })
      .def("homology", [](const TriSurfaceMesh& mesh) {
        const HomologyProfile h = homology_profile(mesh);
        return py::dict(py::arg("h0") = h.h0, py::arg("h1") = h.h1, py::arg("h1_rel") = h.h1_relative,
                        py::arg("im_istar") = h.image_istar,
                        py::arg("long_exact_sequence") = h.long_exact_sequence_holds());
      });

  m.def("read_mesh", [](const std::filesystem::path& p) { return read_mesh(p); }, py::arg("path"));
  m.def("write_mesh", [](const std::filesystem::path& p, const TriSurfaceMesh& mesh) { write_mesh(p, mesh); },
        py::arg("path"), py::arg("mesh"));
  m.def("exemplar_mesh", [](const std::string& name, int resolution) {
        return sample_mesh(exemplar_by_name(name), resolution);
      },
        py::arg("name"), py::arg("resolution") = 32);

  m.def("morse_index",
        [](const std::string& name, int resolution, int refinements, int m_) {
          return morse_dict(morse_index(exemplar_by_name(name), resolution, refinements, m_));
        },
        py::arg("exemplar"), py::arg("resolution") = 32, py::arg("refinements") = 2, py::arg("m") = 12);
  m.def("morse_index_mesh",
        [](const TriSurfaceMesh& mesh, const std::string& domain, int refinements, int m_) {
          return morse_dict(morse_index(mesh, make_domain(domain), refinements, m_));
        },
        py::arg("mesh"), py::arg("domain") = "ball r=1", py::arg("refinements") = 0, py::arg("m") = 12);

  m.def("harmonic_basis",
        [](const TriSurfaceMesh& mesh, const std::string& flavor) {
          const HarmonicBasis b = harmonic_basis(mesh, parse_flavor(flavor));
          Eigen::MatrixXd forms(b.dimension(), mesh.num_edges());
          for (int i = 0; i < b.dimension(); ++i) forms.row(i) = b.forms[i].values.transpose();
          return py::dict(py::arg("flavor") = to_string(b.flavor), py::arg("dimension") = b.dimension(),
                          py::arg("homology_dimension") = b.homology_dimension, py::arg("gap") = b.gap,
                          py::arg("forms") = forms, py::arg("gram") = b.gram);
        },
        py::arg("mesh"), py::arg("flavor") = "normal");

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("subcommand", &RunConfig::subcommand)
      .def_readwrite("mesh", &RunConfig::mesh)
      .def_readwrite("fields", &RunConfig::fields)
      .def_readwrite("exemplar", &RunConfig::exemplar)
      .def_readwrite("domain", &RunConfig::domain)
      .def_readwrite("flavor", &RunConfig::flavor)
      .def_readwrite("resolution", &RunConfig::resolution)
      .def_readwrite("refinements", &RunConfig::refinements)
      .def_readwrite("m", &RunConfig::m)
      .def_readwrite("alpha", &RunConfig::alpha)
      .def_readwrite("levels", &RunConfig::levels)
      .def_readwrite("mode", &RunConfig::mode)
      .def_readwrite("out", &RunConfig::out)
      .def_readwrite("deterministic", &RunConfig::deterministic)
      .def_readwrite("convexity_samples", &RunConfig::convexity_samples)
      .def_readwrite("convexity_margin", &RunConfig::convexity_margin)
      .def("validate", &RunConfig::validate);

  // (exit code, report as JSON text, summary)
  m.def("execute", [](const RunConfig& config) {
    RunOutcome o;
    {
      py::gil_scoped_release release;
      o = execute(config);
    }
    return py::make_tuple(o.exit_code, o.report.dump(), o.summary);
  });
}
