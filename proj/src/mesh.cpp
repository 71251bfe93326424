#include "fbms/mesh.hpp"

#include "fbms/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <string>

namespace fbms {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonManifoldEdge: return "NonManifoldEdge";
    case ErrorKind::NonManifoldVertex: return "NonManifoldVertex";
    case ErrorKind::Unorientable: return "Unorientable";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::NoBoundary: return "NoBoundary";
    case ErrorKind::InconsistentTopology: return "InconsistentTopology";
    case ErrorKind::InconsistentRank: return "InconsistentRank";
    case ErrorKind::ProjectionFailed: return "ProjectionFailed";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::DegenerateGradient: return "DegenerateGradient";
    case ErrorKind::SamplingFailed: return "SamplingFailed";
    case ErrorKind::ResolutionTooLow: return "ResolutionTooLow";
    case ErrorKind::MissingField: return "MissingField";
    case ErrorKind::NegativeTriangleArea: return "NegativeTriangleArea";
    case ErrorKind::SolverNoConvergence: return "SolverNoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingGeometry: return "MissingGeometry";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

struct HalfEdgeUse {
  int face;
  int from;
  int to;
};

// Orientation repair by BFS over the triangle adjacency. flip[f] says whether
// triangle f must be reversed.
std::vector<char> orient_triangles(const std::vector<Tri>& triangles,
                                   const std::map<std::uint64_t, std::vector<HalfEdgeUse>>& uses) {
  const size_t nf = triangles.size();
  std::vector<char> flip(nf, 0);
  std::vector<char> visited(nf, 0);
  std::vector<std::vector<std::pair<int, std::uint64_t>>> neighbors(nf);
  for (const auto& [key, list] : uses) {
    if (list.size() == 2) {
      neighbors[static_cast<size_t>(list[0].face)].push_back({list[1].face, key});
      neighbors[static_cast<size_t>(list[1].face)].push_back({list[0].face, key});
    }
  }

  // direction of edge `key` as traversed by face f, honoring its flip
  auto traverses_forward = [&](int f, int a, int b) {
    const Tri& t = triangles[static_cast<size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      if (t[static_cast<size_t>(k)] == a && t[static_cast<size_t>((k + 1) % 3)] == b) {
        return flip[static_cast<size_t>(f)] == 0;
      }
    }
    return flip[static_cast<size_t>(f)] != 0;
  };

  std::deque<int> queue{0};
  visited[0] = 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    for (const auto& [g, key] : neighbors[static_cast<size_t>(f)]) {
      const int a = static_cast<int>(key >> 32);
      const int b = static_cast<int>(key & 0xffffffffu);
      const bool f_forward = traverses_forward(f, a, b);
      if (!visited[static_cast<size_t>(g)]) {
        flip[static_cast<size_t>(g)] = 0;
        if (traverses_forward(g, a, b) == f_forward) flip[static_cast<size_t>(g)] = 1;
        visited[static_cast<size_t>(g)] = 1;
        queue.push_back(g);
      } else if (traverses_forward(g, a, b) == f_forward) {
        throw Error(ErrorKind::Unorientable,
                    "no consistent orientation (conflict across edge " + std::to_string(a) + "-" +
                        std::to_string(b) + ")");
      }
    }
  }
  if (std::find(visited.begin(), visited.end(), 0) != visited.end()) {
    throw Error(ErrorKind::Disconnected, "triangles form more than one connected component");
  }
  return flip;
}

}  // namespace

int TriSurfaceMesh::num_boundary_vertices() const {
  return static_cast<int>(std::count(vertex_on_boundary_.begin(), vertex_on_boundary_.end(), 1));
}

int TriSurfaceMesh::num_boundary_edges() const {
  return static_cast<int>(
      std::count_if(edges_.begin(), edges_.end(), [](const MeshEdge& e) { return e.on_boundary(); }));
}

int TriSurfaceMesh::find_edge(int a, int b) const {
  auto it = edge_lookup_.find(edge_key(a, b));
  return it == edge_lookup_.end() ? -1 : it->second;
}

double TriSurfaceMesh::triangle_area(int f) const {
  const Tri& t = triangle(f);
  return 0.5 * (vertex(t[1]) - vertex(t[0])).cross(vertex(t[2]) - vertex(t[0])).norm();
}

Vec3 TriSurfaceMesh::triangle_normal(int f) const {
  const Tri& t = triangle(f);
  return (vertex(t[1]) - vertex(t[0])).cross(vertex(t[2]) - vertex(t[0])).normalized();
}

Vec3 TriSurfaceMesh::triangle_centroid(int f) const {
  const Tri& t = triangle(f);
  return (vertex(t[0]) + vertex(t[1]) + vertex(t[2])) / 3.0;
}

double TriSurfaceMesh::max_triangle_diameter() const {
  double d = 0.0;
  for (const MeshEdge& e : edges_) d = std::max(d, (vertex(e.v1) - vertex(e.v0)).norm());
  return d;
}

TriSurfaceMesh build_mesh(std::vector<Vec3> vertices, std::vector<Tri> triangles,
                          std::optional<std::vector<Vec2>> params) {
  const int nv = static_cast<int>(vertices.size());
  if (nv < 3) throw Error(ErrorKind::InvalidInput, "a mesh needs at least 3 vertices");
  if (triangles.empty()) throw Error(ErrorKind::InvalidInput, "a mesh needs at least one triangle");
  if (params && params->size() != vertices.size()) {
    throw Error(ErrorKind::InvalidInput, "parameter array size does not match vertex count");
  }
  for (const Vec3& p : vertices) {
    if (!p.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite vertex coordinate");
  }
  std::vector<char> used(static_cast<size_t>(nv), 0);
  for (const Tri& t : triangles) {
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorKind::InvalidInput, "triangle index out of range: " + std::to_string(v));
      }
      used[static_cast<size_t>(v)] = 1;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorKind::InvalidInput, "triangle with repeated vertex");
    }
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw Error(ErrorKind::Disconnected, "mesh has vertices not referenced by any triangle");
  }

  std::map<std::uint64_t, std::vector<HalfEdgeUse>> uses;
  for (int f = 0; f < static_cast<int>(triangles.size()); ++f) {
    const Tri& t = triangles[static_cast<size_t>(f)];
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<size_t>(k)];
      const int b = t[static_cast<size_t>((k + 1) % 3)];
      auto& list = uses[edge_key(a, b)];
      list.push_back({f, a, b});
      if (list.size() > 2) {
        throw Error(ErrorKind::NonManifoldEdge, "edge " + std::to_string(std::min(a, b)) + "-" +
                                                    std::to_string(std::max(a, b)) +
                                                    " has three or more incident triangles");
      }
      if (list.size() == 2 && list[0].face == f) {
        throw Error(ErrorKind::InvalidInput, "triangle uses the same edge twice");
      }
    }
  }

  const std::vector<char> flip = orient_triangles(triangles, uses);

  TriSurfaceMesh mesh;
  for (size_t f = 0; f < triangles.size(); ++f) {
    if (flip[f]) {
      std::swap(triangles[f][1], triangles[f][2]);
      mesh.orientation_repaired_ = true;
    }
  }
  mesh.vertices_ = std::move(vertices);
  mesh.triangles_ = std::move(triangles);
  mesh.params_ = std::move(params);

  // Edges in lexicographic (v0, v1) order: std::map iterates keys sorted.
  mesh.edges_.reserve(uses.size());
  for (const auto& [key, list] : uses) {
    MeshEdge e;
    e.v0 = static_cast<int>(key >> 32);
    e.v1 = static_cast<int>(key & 0xffffffffu);
    e.face_count = static_cast<int>(list.size());
    for (size_t i = 0; i < list.size(); ++i) e.faces[i] = list[i].face;
    mesh.edge_lookup_.emplace(key, static_cast<int>(mesh.edges_.size()));
    mesh.edges_.push_back(e);
  }

  const int nf = mesh.num_triangles();
  mesh.face_edges_.resize(static_cast<size_t>(nf));
  mesh.face_edge_signs_.resize(static_cast<size_t>(nf));
  mesh.vertex_faces_.assign(static_cast<size_t>(nv), {});
  for (int f = 0; f < nf; ++f) {
    const Tri& t = mesh.triangle(f);
    for (int k = 0; k < 3; ++k) {
      const int a = t[static_cast<size_t>(k)];
      const int b = t[static_cast<size_t>((k + 1) % 3)];
      mesh.face_edges_[static_cast<size_t>(f)][static_cast<size_t>(k)] = mesh.find_edge(a, b);
      mesh.face_edge_signs_[static_cast<size_t>(f)][static_cast<size_t>(k)] = a < b ? 1 : -1;
      mesh.vertex_faces_[static_cast<size_t>(a)].push_back(f);
    }
  }

  // Each vertex star must be a single fan (rules out bow-tie vertices).
  for (int v = 0; v < nv; ++v) {
    const auto& faces = mesh.vertex_faces_[static_cast<size_t>(v)];
    std::vector<int> parent(faces.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
      while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)];
      return i;
    };
    for (size_t i = 0; i < faces.size(); ++i) {
      for (size_t j = i + 1; j < faces.size(); ++j) {
        int shared = 0;
        for (int a : mesh.triangle(faces[i])) {
          if (a == v) continue;
          for (int b : mesh.triangle(faces[j])) shared += (a == b);
        }
        if (shared > 0) parent[static_cast<size_t>(find(static_cast<int>(i)))] = find(static_cast<int>(j));
      }
    }
    int roots = 0;
    for (size_t i = 0; i < faces.size(); ++i) roots += (find(static_cast<int>(i)) == static_cast<int>(i));
    if (roots > 1) {
      throw Error(ErrorKind::NonManifoldVertex, "vertex " + std::to_string(v) + " joins several fans");
    }
  }

  // Boundary half-edges follow the orientation of their single face.
  mesh.vertex_on_boundary_.assign(static_cast<size_t>(nv), 0);
  std::vector<int> next_boundary(static_cast<size_t>(nv), -1);
  int boundary_edges = 0;
  for (int f = 0; f < nf; ++f) {
    const Tri& t = mesh.triangle(f);
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.face_edges_[static_cast<size_t>(f)][static_cast<size_t>(k)];
      if (!mesh.edges_[static_cast<size_t>(e)].on_boundary()) continue;
      const int a = t[static_cast<size_t>(k)];
      const int b = t[static_cast<size_t>((k + 1) % 3)];
      if (next_boundary[static_cast<size_t>(a)] != -1) {
        throw Error(ErrorKind::NonManifoldVertex,
                    "boundary vertex " + std::to_string(a) + " lies on several boundary loops");
      }
      next_boundary[static_cast<size_t>(a)] = b;
      mesh.vertex_on_boundary_[static_cast<size_t>(a)] = 1;
      mesh.vertex_on_boundary_[static_cast<size_t>(b)] = 1;
      ++boundary_edges;
    }
  }
  if (boundary_edges == 0) throw Error(ErrorKind::NoBoundary, "surface has empty boundary");

  std::vector<char> seen(static_cast<size_t>(nv), 0);
  for (int v = 0; v < nv; ++v) {
    if (next_boundary[static_cast<size_t>(v)] == -1 || seen[static_cast<size_t>(v)]) continue;
    std::vector<int> loop;
    int cur = v;
    while (!seen[static_cast<size_t>(cur)]) {
      seen[static_cast<size_t>(cur)] = 1;
      loop.push_back(cur);
      cur = next_boundary[static_cast<size_t>(cur)];
      if (cur == -1) throw Error(ErrorKind::NonManifoldVertex, "open boundary chain");
    }
    if (cur != v) throw Error(ErrorKind::NonManifoldVertex, "boundary chain does not close");
    mesh.boundary_loops_.push_back(std::move(loop));
  }
  // Longest loop first; ties by smallest vertex id. Loops start at their
  // smallest vertex (v is increasing, so the first visited vertex is minimal).
  std::sort(mesh.boundary_loops_.begin(), mesh.boundary_loops_.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() > b.size();
              return a.front() < b.front();
            });
  for (const auto& loop : mesh.boundary_loops_) {
    std::vector<int> loop_edges;
    for (size_t i = 0; i < loop.size(); ++i) {
      loop_edges.push_back(mesh.find_edge(loop[i], loop[(i + 1) % loop.size()]));
    }
    mesh.boundary_loop_edges_.push_back(std::move(loop_edges));
  }

  // Angle-weighted vertex normals.
  mesh.vertex_normals_.assign(static_cast<size_t>(nv), Vec3::Zero());
  for (int f = 0; f < nf; ++f) {
    const Tri& t = mesh.triangle(f);
    const Vec3 n = (mesh.vertex(t[1]) - mesh.vertex(t[0])).cross(mesh.vertex(t[2]) - mesh.vertex(t[0]));
    if (n.norm() == 0.0) continue;
    const Vec3 unit = n.normalized();
    for (int k = 0; k < 3; ++k) {
      const Vec3& p = mesh.vertex(t[static_cast<size_t>(k)]);
      const double angle = angle_between(mesh.vertex(t[static_cast<size_t>((k + 1) % 3)]) - p,
                                         mesh.vertex(t[static_cast<size_t>((k + 2) % 3)]) - p);
      mesh.vertex_normals_[static_cast<size_t>(t[static_cast<size_t>(k)])] += angle * unit;
    }
  }
  for (Vec3& n : mesh.vertex_normals_) {
    const double len = n.norm();
    if (!(len > 0.0)) throw Error(ErrorKind::InvalidInput, "degenerate vertex star (zero normal)");
    n /= len;
  }
  return mesh;
}

Topology topology(const TriSurfaceMesh& mesh) {
  Topology topo;
  topo.euler_characteristic = mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles();
  topo.boundary_components = static_cast<int>(mesh.boundary_loops().size());
  const int twice_genus = 2 - topo.boundary_components - topo.euler_characteristic;
  if (twice_genus < 0 || twice_genus % 2 != 0) {
    throw Error(ErrorKind::InconsistentTopology,
                "2 - r - chi = " + std::to_string(twice_genus) + " is not a nonnegative even integer");
  }
  topo.genus = twice_genus / 2;
  return topo;
}

TriSurfaceMesh refine(const TriSurfaceMesh& mesh, const Reprojection* reprojection) {
  const int nv = mesh.num_vertices();
  std::vector<Vec3> vertices = mesh.vertices();
  std::optional<std::vector<Vec2>> params = mesh.params();
  vertices.reserve(static_cast<size_t>(nv + mesh.num_edges()));
  bool keep_params = params.has_value();
  for (const MeshEdge& e : mesh.edges()) {
    if (reprojection) {
      VertexSample s = reprojection->midpoint(mesh, e.v0, e.v1);
      vertices.push_back(s.position);
      if (keep_params && s.param) {
        params->push_back(*s.param);
      } else {
        keep_params = false;
      }
    } else {
      vertices.push_back(0.5 * (mesh.vertex(e.v0) + mesh.vertex(e.v1)));
      keep_params = false;
    }
  }
  if (!keep_params) params.reset();

  std::vector<Tri> triangles;
  triangles.reserve(static_cast<size_t>(4 * mesh.num_triangles()));
  for (int f = 0; f < mesh.num_triangles(); ++f) {
    const Tri& t = mesh.triangle(f);
    const auto& fe = mesh.face_edges(f);
    const int m01 = nv + fe[0];
    const int m12 = nv + fe[1];
    const int m20 = nv + fe[2];
    triangles.push_back({t[0], m01, m20});
    triangles.push_back({m01, t[1], m12});
    triangles.push_back({m20, m12, t[2]});
    triangles.push_back({m01, m12, m20});
  }
  return build_mesh(std::move(vertices), std::move(triangles), std::move(params));
}

TriSurfaceMesh permute_vertices(const TriSurfaceMesh& mesh, std::span<const int> permutation) {
  const int nv = mesh.num_vertices();
  if (static_cast<int>(permutation.size()) != nv) {
    throw Error(ErrorKind::InvalidInput, "permutation size does not match vertex count");
  }
  std::vector<Vec3> vertices(static_cast<size_t>(nv));
  std::optional<std::vector<Vec2>> params;
  if (mesh.params()) params.emplace(static_cast<size_t>(nv));
  std::vector<char> hit(static_cast<size_t>(nv), 0);
  for (int v = 0; v < nv; ++v) {
    const int w = permutation[static_cast<size_t>(v)];
    if (w < 0 || w >= nv || hit[static_cast<size_t>(w)]) {
      throw Error(ErrorKind::InvalidInput, "not a permutation");
    }
    hit[static_cast<size_t>(w)] = 1;
    vertices[static_cast<size_t>(w)] = mesh.vertex(v);
    if (params) (*params)[static_cast<size_t>(w)] = (*mesh.params())[static_cast<size_t>(v)];
  }
  std::vector<Tri> triangles = mesh.triangles();
  for (Tri& t : triangles) {
    for (int& v : t) v = permutation[static_cast<size_t>(v)];
  }
  return build_mesh(std::move(vertices), std::move(triangles), std::move(params));
}

TriSurfaceMesh transform_mesh(const TriSurfaceMesh& mesh, const Mat3& linear, const Vec3& offset) {
  std::vector<Vec3> vertices = mesh.vertices();
  for (Vec3& p : vertices) p = linear * p + offset;
  return build_mesh(std::move(vertices), mesh.triangles(), mesh.params());
}

}  // namespace fbms
