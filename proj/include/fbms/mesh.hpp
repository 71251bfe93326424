#pragma once

#include "fbms/geometry.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace fbms {

// Undirected edge with canonical orientation v0 < v1. Edge cochains use this
// orientation for the sign of their values.
struct MeshEdge {
  int v0 = -1;
  int v1 = -1;
  std::array<int, 2> faces{-1, -1};
  int face_count = 0;

  bool on_boundary() const { return face_count == 1; }
};

// Oriented triangulated surface with boundary, immutable after construction.
//
// Invariants established by build_mesh():
//  * every edge has one or two incident triangles, one exactly on the boundary;
//  * triangle windings are globally consistent;
//  * boundary edges form r >= 1 disjoint simple loops, each traversed in the
//    direction induced by the triangle orientation;
//  * vertex normals are unit length.
class TriSurfaceMesh {
 public:
  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Tri>& triangles() const { return triangles_; }
  const std::vector<MeshEdge>& edges() const { return edges_; }
  const std::vector<Vec3>& vertex_normals() const { return vertex_normals_; }

  const Vec3& vertex(int v) const { return vertices_[static_cast<size_t>(v)]; }
  const Tri& triangle(int f) const { return triangles_[static_cast<size_t>(f)]; }
  const MeshEdge& edge(int e) const { return edges_[static_cast<size_t>(e)]; }

  // Boundary loops as closed vertex cycles (first vertex not repeated), and
  // the matching edge indices: loop_edges[l][i] joins loop[l][i] and
  // loop[l][i+1 mod n].
  const std::vector<std::vector<int>>& boundary_loops() const { return boundary_loops_; }
  const std::vector<std::vector<int>>& boundary_loop_edges() const { return boundary_loop_edges_; }

  bool vertex_on_boundary(int v) const { return vertex_on_boundary_[static_cast<size_t>(v)] != 0; }
  bool edge_on_boundary(int e) const { return edges_[static_cast<size_t>(e)].on_boundary(); }
  int num_boundary_vertices() const;
  int num_boundary_edges() const;

  // Edge between a and b, or -1.
  int find_edge(int a, int b) const;

  // face_edges(f)[k] is the edge joining triangle(f)[k] and triangle(f)[(k+1)%3];
  // face_edge_signs(f)[k] is +1 when that traversal agrees with the canonical
  // edge orientation.
  const std::array<int, 3>& face_edges(int f) const { return face_edges_[static_cast<size_t>(f)]; }
  const std::array<int, 3>& face_edge_signs(int f) const {
    return face_edge_signs_[static_cast<size_t>(f)];
  }
  const std::vector<int>& vertex_faces(int v) const { return vertex_faces_[static_cast<size_t>(v)]; }

  double triangle_area(int f) const;
  Vec3 triangle_normal(int f) const;
  Vec3 triangle_centroid(int f) const;
  double max_triangle_diameter() const;

  // Optional per-vertex parameter coordinates (set for sampled exemplars).
  const std::optional<std::vector<Vec2>>& params() const { return params_; }

  // True when build_mesh flipped at least one input triangle.
  bool orientation_repaired() const { return orientation_repaired_; }

 private:
  friend TriSurfaceMesh build_mesh(std::vector<Vec3>, std::vector<Tri>,
                                   std::optional<std::vector<Vec2>>);

  std::vector<Vec3> vertices_;
  std::vector<Tri> triangles_;
  std::vector<MeshEdge> edges_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::array<int, 3>> face_edge_signs_;
  std::vector<std::vector<int>> vertex_faces_;
  std::vector<std::vector<int>> boundary_loops_;
  std::vector<std::vector<int>> boundary_loop_edges_;
  std::vector<Vec3> vertex_normals_;
  std::vector<std::uint8_t> vertex_on_boundary_;
  std::unordered_map<std::uint64_t, int> edge_lookup_;
  std::optional<std::vector<Vec2>> params_;
  bool orientation_repaired_ = false;
};

// Validates connectivity, repairs orientation by breadth-first propagation and
// derives edges, boundary loops and vertex normals.
// Throws Error{NonManifoldEdge | NonManifoldVertex | Unorientable |
// Disconnected | NoBoundary | InvalidInput}.
TriSurfaceMesh build_mesh(std::vector<Vec3> vertices, std::vector<Tri> triangles,
                          std::optional<std::vector<Vec2>> params = std::nullopt);

struct Topology {
  int genus = 0;
  int boundary_components = 0;
  int euler_characteristic = 0;
};

Topology topology(const TriSurfaceMesh& mesh);

// Position (and optionally parameter) of a vertex inserted on an edge during
// refinement.
struct VertexSample {
  Vec3 position;
  std::optional<Vec2> param;
};

class Reprojection {
 public:
  virtual ~Reprojection() = default;
  virtual VertexSample midpoint(const TriSurfaceMesh& mesh, int a, int b) const = 0;
};

// 1-to-4 midpoint subdivision. New vertices are appended in edge order. With a
// reprojection the inserted vertices are placed by it instead of at the chord
// midpoint.
TriSurfaceMesh refine(const TriSurfaceMesh& mesh, const Reprojection* reprojection = nullptr);

// Relabels vertices: new index of old vertex v is permutation[v].
TriSurfaceMesh permute_vertices(const TriSurfaceMesh& mesh, std::span<const int> permutation);

// Applies x -> linear * x + offset to every vertex; connectivity and params kept.
TriSurfaceMesh transform_mesh(const TriSurfaceMesh& mesh, const Mat3& linear, const Vec3& offset);

}  // namespace fbms
