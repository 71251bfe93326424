#include "corpus.hpp"
#include "doctest.h"

#include "fbms/errors.hpp"
#include "fbms/homology.hpp"
#include "fbms/mesh.hpp"
#include "fbms/mesh_io.hpp"

#include <Eigen/Dense>

#include <numeric>
#include <random>
#include <sstream>

using namespace fbms;
using namespace fbms::testing;

namespace {

// Independent dense rank oracle.
int dense_rank(const SparseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::MatrixXd d(a);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
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

TEST_CASE("single triangle is a disk") {
  const auto m = single_triangle();
  CHECK(m.num_edges() == 3);
  REQUIRE(m.boundary_loops().size() == 1);
  CHECK(m.boundary_loops()[0].size() == 3);
  const Topology t = topology(m);
  CHECK(t.genus == 0);
  CHECK(t.boundary_components == 1);
  CHECK(t.euler_characteristic == 1);
}

TEST_CASE("mismatched winding is repaired") {
  const auto m = build_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
  CHECK_FALSE(m.orientation_repaired());
  const auto r = build_mesh({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 3, 2}});
  CHECK(r.orientation_repaired());
  REQUIRE(r.boundary_loops().size() == 1);
  CHECK(r.boundary_loops()[0].size() == 4);
  // interior edge traversed once in each direction
  const int e = r.find_edge(0, 2);
  REQUIRE(e >= 0);
  int sum = 0;
  for (int f : r.edge(e).faces) {
    for (int k = 0; k < 3; ++k) {
      if (r.face_edges(f)[k] == e) sum += r.face_edge_signs(f)[k];
    }
  }
  CHECK(sum == 0);
  CHECK(r.triangle_normal(0).dot(r.triangle_normal(1)) > 0.99);
}

TEST_CASE("moebius band is rejected") {
  CHECK(kind_of([] { build_mesh(moebius_vertices(), moebius_triangles()); }) == ErrorKind::Unorientable);
}

TEST_CASE("invalid connectivity is rejected") {
  std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
  CHECK(kind_of([&] { build_mesh(v, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}); }) == ErrorKind::NonManifoldEdge);
  std::vector<Vec3> w{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {6, 0, 0}, {5, 1, 0}};
  CHECK(kind_of([&] { build_mesh(w, {{0, 1, 2}, {3, 4, 5}}); }) == ErrorKind::Disconnected);
  CHECK(kind_of([&] { build_mesh(v, {{0, 1, 7}}); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { build_mesh({{0, 0, 0}, {1, 0, 0}}, {}); }) == ErrorKind::InvalidInput);
  // closed tetrahedron has no boundary
  std::vector<Vec3> tet{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(kind_of([&] { build_mesh(tet, {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}}); }) == ErrorKind::NoBoundary);
}

TEST_CASE("topology of the corpus") {
  const Topology disk = topology(fan_disk(8));
  CHECK(disk.genus == 0);
  CHECK(disk.boundary_components == 1);
  CHECK(disk.euler_characteristic == 1);
  const Topology ann = topology(flat_annulus());
  CHECK(ann.genus == 0);
  CHECK(ann.boundary_components == 2);
  CHECK(ann.euler_characteristic == 0);
  const auto torus = punctured_torus();
  // counted directly: V = 36, E = 108, F = 71
  CHECK(torus.num_vertices() - torus.num_edges() + torus.num_triangles() == -1);
  const Topology tt = topology(torus);
  CHECK(tt.genus == 1);
  CHECK(tt.boundary_components == 1);
  CHECK(tt.euler_characteristic == -1);
}

TEST_CASE("mesh invariants") {
  for (const auto& m : {fan_disk(8), flat_annulus(), punctured_torus()}) {
    for (const Vec3& n : m.vertex_normals()) CHECK(std::abs(n.norm() - 1.0) < 1e-12);
    int boundary_edges = 0;
    for (const auto& e : m.edges()) {
      CHECK((e.face_count == 1 || e.face_count == 2));
      boundary_edges += e.on_boundary() ? 1 : 0;
    }
    size_t loop_edges = 0;
    for (const auto& l : m.boundary_loop_edges()) loop_edges += l.size();
    CHECK(static_cast<int>(loop_edges) == boundary_edges);
    // loops ordered by descending length
    for (size_t l = 1; l < m.boundary_loops().size(); ++l) {
      CHECK(m.boundary_loops()[l - 1].size() >= m.boundary_loops()[l].size());
    }
  }
}

TEST_CASE("boundary loops follow the triangle orientation") {
  const auto m = fan_disk(8);
  const auto& loop = m.boundary_loops()[0];
  // counterclockwise seen from +z
  double signed_area = 0.0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const Vec3& a = m.vertex(loop[i]);
    const Vec3& b = m.vertex(loop[(i + 1) % loop.size()]);
    signed_area += a.x() * b.y() - a.y() * b.x();
  }
  CHECK(signed_area > 0.0);
}

TEST_CASE("homology of the disk") {
  const HomologyProfile h = homology_profile(fan_disk(8));
  CHECK(h.h0 == 1);
  CHECK(h.h1 == 0);
  CHECK(h.h1_relative == 0);
  CHECK(h.h0_boundary == 1);
  CHECK(h.long_exact_sequence_holds());
}

TEST_CASE("homology of the annulus matches the rank oracle") {
  const auto m = flat_annulus();
  const HomologyProfile h = homology_profile(m);
  const SparseMatrix d0 = coboundary0(m);  // transpose of the boundary map on edges
  const SparseMatrix d1 = coboundary1(m);
  const int rank1 = dense_rank(d0);
  const int rank2 = dense_rank(d1);
  const int nv = m.num_vertices();
  const int ne = m.num_edges();
  CHECK(h.h1 == ne - rank1 - rank2);
  CHECK(h.h0 == nv - rank1);
  CHECK(h.h1 == 1);
  CHECK(h.image_istar == 1);
  CHECK(h.h1_relative == 1);
  CHECK(h.h1_relative == (h.h0_boundary - 1) + (h.h1 - h.image_istar));
  CHECK(h.exact_rank_checked);
}

TEST_CASE("homology of the punctured torus") {
  const auto m = punctured_torus();
  const HomologyProfile h = homology_profile(m);
  CHECK(h.h1 == 2);
  CHECK(h.image_istar == 0);
  CHECK(h.h1_relative == 2);
  CHECK(h.long_exact_sequence_holds());
  // the boundary curve is null-homologous: adding it to the image of the
  // boundary map does not raise the rank
  const SparseMatrix b2 = SparseMatrix(coboundary1(m).transpose());
  Eigen::MatrixXd aug(b2.rows(), b2.cols() + 1);
  aug.leftCols(b2.cols()) = Eigen::MatrixXd(b2);
  aug.col(b2.cols()) = boundary_loop_chain(m, 0);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(aug);
  lu.setThreshold(1e-10);
  CHECK(static_cast<int>(lu.rank()) == dense_rank(b2));
}

TEST_CASE("relative homology equals 2g + r - 1") {
  for (const auto& m : {single_triangle(), fan_disk(8), flat_annulus(), punctured_torus()}) {
    const Topology t = topology(m);
    const HomologyProfile h = homology_profile(m);
    CHECK(h.h1_relative == 2 * t.genus + t.boundary_components - 1);
    CHECK(h.h0_boundary == t.boundary_components);
  }
}

TEST_CASE("exact and numerical rank agree") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> val(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd d(7, 9);
    for (int i = 0; i < d.rows(); ++i) {
      for (int j = 0; j < d.cols(); ++j) d(i, j) = (val(rng) % 2 == 0) ? 0.0 : val(rng);
    }
    d.row(5) = d.row(1) - 2.0 * d.row(3);
    const SparseMatrix s = d.sparseView();
    const auto exact = exact_rank(s);
    REQUIRE(exact.has_value());
    CHECK(*exact == dense_rank(s));
    CHECK(numerical_rank(s) == *exact);
  }
}

TEST_CASE("refinement quadruples faces and keeps topology") {
  const auto m = fan_disk(8);
  const auto r1 = refine(m);
  CHECK(r1.num_triangles() == 32);
  CHECK(topology(r1).genus == 0);
  CHECK(topology(r1).boundary_components == 1);
  const auto r2 = refine(r1);
  CHECK(r2.num_triangles() == 4 * r1.num_triangles());
  CHECK(r2.num_edges() == 2 * r1.num_edges() + 3 * r1.num_triangles());
  const auto t = punctured_torus();
  const auto tr = refine(t);
  CHECK(topology(tr).genus == 1);
  CHECK(topology(tr).euler_characteristic == topology(t).euler_characteristic);
  CHECK(homology_profile(tr).h1_relative == 2);
  // orientation preserved: refined normals agree with the parent
  const Vec3 n0 = t.triangle_normal(0);
  CHECK(tr.triangle_normal(0).dot(n0) > 0.0);
}

TEST_CASE("vertex relabeling preserves structure") {
  const auto m = flat_annulus(12, 3);
  std::vector<int> perm(static_cast<size_t>(m.num_vertices()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(7));
  const auto p = permute_vertices(m, perm);
  CHECK(p.num_edges() == m.num_edges());
  for (int v = 0; v < m.num_vertices(); ++v) {
    CHECK((p.vertex(perm[static_cast<size_t>(v)]) - m.vertex(v)).norm() == 0.0);
  }
  CHECK(homology_profile(p).h1_relative == 1);
}

TEST_CASE("mesh and field text round trip") {
  const auto m = punctured_torus(4, 5);
  std::stringstream s;
  write_mesh(s, m);
  const auto back = read_mesh(s);
  CHECK(back.num_vertices() == m.num_vertices());
  CHECK(back.num_triangles() == m.num_triangles());
  for (int v = 0; v < m.num_vertices(); ++v) CHECK((back.vertex(v) - m.vertex(v)).norm() == 0.0);

  std::stringstream c("# comment\nFBMS-MESH 1\n\nv 0 0 0\nv 1 0 0\n# x\nv 0 1 0\nf 0 1 2\n");
  CHECK(read_mesh(c).num_triangles() == 1);

  std::stringstream f;
  write_field(f, {1.5, -2.0, 1e-300});
  const auto vals = read_field(f);
  REQUIRE(vals.size() == 3);
  CHECK(vals[2] == 1e-300);

  std::stringstream bad("FBMS-MESH 1\nv 0 0\n");
  CHECK(kind_of([&] { read_mesh(bad); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { read_mesh(std::filesystem::path("/nonexistent/missing.fbm")); }) == ErrorKind::FileNotFound);
}
