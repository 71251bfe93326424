#include "fbms/homology.hpp"

#include "fbms/errors.hpp"

#include <Eigen/SPQRSupport>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <unordered_map>
#include <vector>

namespace fbms {

namespace {

using Triplet = Eigen::Triplet<double>;

// Restriction to a subset of rows/columns, keeping order.
SparseMatrix restrict(const SparseMatrix& a, const std::vector<int>& rows,
                      const std::vector<int>& cols) {
  std::vector<int> row_map(static_cast<size_t>(a.rows()), -1);
  std::vector<int> col_map(static_cast<size_t>(a.cols()), -1);
  for (size_t i = 0; i < rows.size(); ++i) row_map[static_cast<size_t>(rows[i])] = static_cast<int>(i);
  for (size_t j = 0; j < cols.size(); ++j) col_map[static_cast<size_t>(cols[j])] = static_cast<int>(j);
  std::vector<Triplet> t;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      const int r = row_map[static_cast<size_t>(it.row())];
      const int c = col_map[static_cast<size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

using IntVec = std::vector<std::pair<int, std::int64_t>>;

bool fits(__int128 x) {
  return x <= static_cast<__int128>(INT64_MAX) && x >= static_cast<__int128>(INT64_MIN);
}

// b * x - a * y, both sorted by index; nullopt on overflow.
std::optional<IntVec> combine(const IntVec& x, std::int64_t b, const IntVec& y, std::int64_t a) {
  IntVec out;
  out.reserve(x.size() + y.size());
  size_t i = 0;
  size_t j = 0;
  while (i < x.size() || j < y.size()) {
    int idx;
    __int128 v = 0;
    if (j >= y.size() || (i < x.size() && x[i].first < y[j].first)) {
      idx = x[i].first;
      v = static_cast<__int128>(b) * x[i].second;
      ++i;
    } else if (i >= x.size() || y[j].first < x[i].first) {
      idx = y[j].first;
      v = -static_cast<__int128>(a) * y[j].second;
      ++j;
    } else {
      idx = x[i].first;
      v = static_cast<__int128>(b) * x[i].second - static_cast<__int128>(a) * y[j].second;
      ++i;
      ++j;
    }
    if (!fits(v)) return std::nullopt;
    if (v != 0) out.emplace_back(idx, static_cast<std::int64_t>(v));
  }
  std::int64_t g = 0;
  for (const auto& [idx, v] : out) g = std::gcd(g, v < 0 ? -v : v);
  if (g > 1) {
    for (auto& [idx, v] : out) v /= g;
  }
  return out;
}

}  // namespace

SparseMatrix coboundary0(const TriSurfaceMesh& mesh) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(2 * mesh.num_edges()));
  for (int e = 0; e < mesh.num_edges(); ++e) {
    t.emplace_back(e, mesh.edge(e).v0, -1.0);
    t.emplace_back(e, mesh.edge(e).v1, 1.0);
  }
  SparseMatrix d0(mesh.num_edges(), mesh.num_vertices());
  d0.setFromTriplets(t.begin(), t.end());
  return d0;
}

SparseMatrix coboundary1(const TriSurfaceMesh& mesh) {
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(3 * mesh.num_triangles()));
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    for (int k = 0; k < 3; ++k) {
      t.emplace_back(f, mesh.face_edges(f)[static_cast<size_t>(k)],
                     static_cast<double>(mesh.face_edge_signs(f)[static_cast<size_t>(k)]));
    }
  }
  SparseMatrix d1(mesh.num_triangles(), mesh.num_edges());
  d1.setFromTriplets(t.begin(), t.end());
  return d1;
}

Eigen::VectorXd boundary_loop_chain(const TriSurfaceMesh& mesh, int loop) {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(mesh.num_edges());
  const auto& verts = mesh.boundary_loops()[static_cast<size_t>(loop)];
  const auto& edges = mesh.boundary_loop_edges()[static_cast<size_t>(loop)];
  for (size_t i = 0; i < verts.size(); ++i) {
    const int e = edges[i];
    z[e] = (mesh.edge(e).v0 == verts[i]) ? 1.0 : -1.0;
  }
  return z;
}

int numerical_rank(const SparseMatrix& a, double relative_cutoff) {
  if (a.rows() == 0 || a.cols() == 0 || a.nonZeros() == 0) return 0;
  double max_col = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) max_col = std::max(max_col, a.col(k).norm());
  SparseMatrix work = a;
  work.makeCompressed();
  Eigen::SPQR<SparseMatrix> qr;
  qr.setPivotThreshold(relative_cutoff * max_col);
  qr.compute(work);
  if (qr.info() != Eigen::Success) {
    throw Error(ErrorKind::InconsistentRank, "sparse QR failed");
  }
  return static_cast<int>(qr.rank());
}

std::optional<int> exact_rank(const SparseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  // Eliminate along whichever dimension has sparser vectors.
  const SparseMatrix by_col = a;  // column-major: outer = columns
  const SparseMatrix transposed = a.transpose();
  const double col_density = static_cast<double>(a.nonZeros()) / static_cast<double>(a.cols());
  const double row_density = static_cast<double>(a.nonZeros()) / static_cast<double>(a.rows());
  const SparseMatrix& m = col_density <= row_density ? by_col : transposed;

  std::unordered_map<int, IntVec> pivots;
  int rank = 0;
  for (int k = 0; k < m.outerSize(); ++k) {
    IntVec v;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const double x = it.value();
      if (x != std::round(x)) {
        throw Error(ErrorKind::InvalidInput, "exact_rank needs integer entries");
      }
      if (x != 0.0) v.emplace_back(static_cast<int>(it.index()), static_cast<std::int64_t>(x));
    }
    std::sort(v.begin(), v.end());
    while (!v.empty()) {
      auto it = pivots.find(v.front().first);
      if (it == pivots.end()) break;
      auto reduced = combine(v, it->second.front().second, it->second, v.front().second);
      if (!reduced) return std::nullopt;
      v = std::move(*reduced);
    }
    if (!v.empty()) {
      const int lead = v.front().first;
      pivots.emplace(lead, std::move(v));
      ++rank;
    }
  }
  return rank;
}

int checked_rank(const SparseMatrix& a, long exact_nonzero_limit) {
  const int r = numerical_rank(a);
  if (a.nonZeros() < exact_nonzero_limit) {
    const auto exact = exact_rank(a);
    if (exact && *exact != r) {
      throw Error(ErrorKind::InconsistentRank, "numerical rank " + std::to_string(r) +
                                                   " disagrees with exact rank " +
                                                   std::to_string(*exact));
    }
  }
  return r;
}

HomologyProfile homology_profile(const TriSurfaceMesh& mesh) {
  const SparseMatrix boundary1 = coboundary0(mesh).transpose();  // V x E
  const SparseMatrix boundary2 = coboundary1(mesh).transpose();  // E x F
  const int nv = mesh.num_vertices();
  const int ne = mesh.num_edges();
  const int nf = mesh.num_triangles();
  const int r = static_cast<int>(mesh.boundary_loops().size());

  HomologyProfile h;
  h.exact_rank_checked = boundary2.nonZeros() < 20000;
  const int rank1 = checked_rank(boundary1);
  const int rank2 = checked_rank(boundary2);
  h.h0 = nv - rank1;
  h.h1 = ne - rank1 - rank2;
  h.h2 = nf - rank2;
  h.h0_boundary = r;
  h.h1_boundary = r;

  std::vector<int> interior_vertices;
  std::vector<int> interior_edges;
  std::vector<int> all_faces(static_cast<size_t>(nf));
  std::iota(all_faces.begin(), all_faces.end(), 0);
  for (int v = 0; v < nv; ++v) {
    if (!mesh.vertex_on_boundary(v)) interior_vertices.push_back(v);
  }
  for (int e = 0; e < ne; ++e) {
    if (!mesh.edge_on_boundary(e)) interior_edges.push_back(e);
  }
  const int rank1_rel = checked_rank(restrict(boundary1, interior_vertices, interior_edges));
  const int rank2_rel = checked_rank(restrict(boundary2, interior_edges, all_faces));
  h.h0_relative = static_cast<int>(interior_vertices.size()) - rank1_rel;
  h.h1_relative = static_cast<int>(interior_edges.size()) - rank1_rel - rank2_rel;
  h.h2_relative = nf - rank2_rel;

  // Im(i_*) = span of loop cycles modulo boundaries.
  std::vector<Triplet> t;
  for (int k = 0; k < boundary2.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(boundary2, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (int l = 0; l < r; ++l) {
    const Eigen::VectorXd z = boundary_loop_chain(mesh, l);
    for (int e = 0; e < ne; ++e) {
      if (z[e] != 0.0) t.emplace_back(e, nf + l, z[e]);
    }
  }
  SparseMatrix augmented(ne, nf + r);
  augmented.setFromTriplets(t.begin(), t.end());
  h.image_istar = checked_rank(augmented) - rank2;
  return h;
}

}  // namespace fbms
