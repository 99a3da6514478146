#pragma once

// Triangulations of polygonal domains with full edge connectivity.
//
// Conventions used throughout the library:
//   * triangles are stored counter-clockwise,
//   * edge i of a triangle is the edge opposite vertex i,
//   * an edge stores its endpoints with ascending vertex ids; the edge
//     parameterization and the facet bases on it follow that global order,
//   * the stored unit normal of an edge points out of edge.tri[0].

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rshdg {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::sqrt(dot(a, a)); }

struct Triangle {
  std::array<int, 3> v{-1, -1, -1};  // vertex ids, CCW
  std::array<int, 3> e{-1, -1, -1};  // edge ids, e[i] opposite v[i]
  double h = 0.0;                    // longest side
};

struct Edge {
  std::array<int, 2> v{-1, -1};      // endpoint ids, v[0] < v[1]
  std::array<int, 2> tri{-1, -1};    // adjacent triangles, tri[1] = -1 on the boundary
  bool boundary = false;
  double length = 0.0;
  Point2 normal;                     // unit normal pointing out of tri[0]
};

struct Mesh {
  std::vector<Point2> vertices;
  std::vector<Triangle> triangles;
  std::vector<Edge> edges;
  double h = 0.0;                    // max over triangle diameters

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  int num_boundary_edges() const {
    int n = 0;
    for (const Edge& e : edges) n += e.boundary ? 1 : 0;
    return n;
  }
  int num_interior_edges() const { return num_edges() - num_boundary_edges(); }

  std::array<Point2, 3> corners(int t) const {
    const Triangle& tri = triangles[t];
    return {vertices[tri.v[0]], vertices[tri.v[1]], vertices[tri.v[2]]};
  }

  double signed_area(int t) const {
    auto c = corners(t);
    return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
  }

  double area(int t) const { return std::abs(signed_area(t)); }

  Point2 centroid(int t) const {
    auto c = corners(t);
    return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
  }

  Point2 edge_midpoint(int e) const {
    const Edge& ed = edges[e];
    return 0.5 * (vertices[ed.v[0]] + vertices[ed.v[1]]);
  }

  // Local index of edge id `e` within triangle `t`, or -1.
  int local_edge(int t, int e) const {
    for (int j = 0; j < 3; ++j)
      if (triangles[t].e[j] == e) return j;
    return -1;
  }

  // Outward unit normal of edge `e` as seen from triangle `t`.
  Point2 outward_normal(int e, int t) const {
    const Edge& ed = edges[e];
    return (ed.tri[0] == t) ? ed.normal : -1.0 * ed.normal;
  }
};

namespace detail {

// Derives edges, adjacency and size metrics for a raw vertex/cell soup.
inline Mesh build_mesh(std::vector<Point2> vertices,
                       const std::vector<std::array<int, 3>>& cells) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.triangles.resize(cells.size());

  const int nv = m.num_vertices();
  std::map<std::pair<int, int>, int> edge_ids;

  for (std::size_t t = 0; t < cells.size(); ++t) {
    Triangle& tri = m.triangles[t];
    tri.v = cells[t];
    for (int i = 0; i < 3; ++i) {
      if (tri.v[i] < 0 || tri.v[i] >= nv)
        throw std::runtime_error("build_mesh: vertex id out of range in cell " +
                                 std::to_string(t));
    }
    for (int i = 0; i < 3; ++i) {
      const int a = tri.v[(i + 1) % 3];
      const int b = tri.v[(i + 2) % 3];
      if (a == b)
        throw std::runtime_error("build_mesh: degenerate cell " + std::to_string(t));
      const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
      auto [it, inserted] = edge_ids.try_emplace(key, m.num_edges());
      if (inserted) {
        Edge e;
        e.v = {key.first, key.second};
        e.tri[0] = static_cast<int>(t);
        m.edges.push_back(e);
      } else {
        Edge& e = m.edges[it->second];
        if (e.tri[1] != -1)
          throw std::runtime_error("build_mesh: edge shared by more than two cells");
        e.tri[1] = static_cast<int>(t);
      }
      tri.e[i] = it->second;
    }
  }

  for (int id = 0; id < m.num_edges(); ++id) {
    Edge& e = m.edges[id];
    e.boundary = (e.tri[1] == -1);
    e.length = norm(m.vertices[e.v[1]] - m.vertices[e.v[0]]);
    // Outward direction w.r.t. tri[0]: rotate the CCW traversal direction of
    // that triangle by -90 degrees.
    const Triangle& t0 = m.triangles[e.tri[0]];
    int j = 0;
    while (j < 2 && t0.e[j] != id) ++j;
    const Point2 a = m.vertices[t0.v[(j + 1) % 3]];
    const Point2 b = m.vertices[t0.v[(j + 2) % 3]];
    const Point2 s = b - a;
    const double len = norm(s);
    if (len <= 0.0) throw std::runtime_error("build_mesh: zero-length edge");
    e.normal = {s.y / len, -s.x / len};
  }

  m.h = 0.0;
  for (Triangle& tri : m.triangles) {
    tri.h = 0.0;
    for (int j = 0; j < 3; ++j) tri.h = std::max(tri.h, m.edges[tri.e[j]].length);
    m.h = std::max(m.h, tri.h);
  }
  return m;
}

}  // namespace detail

// Uniform triangulation of the unit square: n x n cells, each split along the
// lower-left to upper-right diagonal.  2n^2 triangles, mesh size sqrt(2)/n.
inline Mesh structured_unit_square(int n) {
  if (n < 1) throw std::invalid_argument("structured_unit_square: n must be >= 1");
  std::vector<Point2> verts;
  verts.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});

  auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int ll = vid(i, j), lr = vid(i + 1, j);
      const int ul = vid(i, j + 1), ur = vid(i + 1, j + 1);
      cells.push_back({ll, lr, ur});
      cells.push_back({ll, ur, ul});
    }
  return detail::build_mesh(std::move(verts), cells);
}

// Red refinement: each triangle is split into four congruent children by
// connecting the edge midpoints.  Every child diameter is half the parent's.
inline Mesh uniform_refine(const Mesh& m) {
  std::vector<Point2> verts = m.vertices;
  verts.reserve(verts.size() + m.edges.size());
  const int nv = m.num_vertices();
  for (const Edge& e : m.edges) {
    const Point2 a = m.vertices[e.v[0]];
    const Point2 b = m.vertices[e.v[1]];
    verts.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  std::vector<std::array<int, 3>> cells;
  cells.reserve(4 * m.num_triangles());
  for (const Triangle& tri : m.triangles) {
    const int v0 = tri.v[0], v1 = tri.v[1], v2 = tri.v[2];
    const int m0 = nv + tri.e[0];  // midpoint of edge opposite v0
    const int m1 = nv + tri.e[1];
    const int m2 = nv + tri.e[2];
    cells.push_back({v0, m2, m1});
    cells.push_back({v1, m0, m2});
    cells.push_back({v2, m1, m0});
    cells.push_back({m0, m1, m2});
  }
  return detail::build_mesh(std::move(verts), cells);
}

struct MeshReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Structural audit: orientation, adjacency symmetry, Euler characteristic and
// boundary placement (for meshes of the unit square).  Report only, no throw.
inline MeshReport validate(const Mesh& m) {
  MeshReport rep;
  auto flag = [&rep](std::string msg) { rep.issues.push_back(std::move(msg)); };

  for (int t = 0; t < m.num_triangles(); ++t) {
    if (m.signed_area(t) <= 0.0)
      flag("triangle " + std::to_string(t) + " is not counter-clockwise");
    double longest = 0.0;
    for (int j = 0; j < 3; ++j) {
      const int e = m.triangles[t].e[j];
      if (e < 0 || e >= m.num_edges()) {
        flag("triangle " + std::to_string(t) + " references invalid edge");
        continue;
      }
      longest = std::max(longest, m.edges[e].length);
      const Edge& ed = m.edges[e];
      if (ed.tri[0] != t && ed.tri[1] != t)
        flag("edge " + std::to_string(e) + " does not list adjacent triangle " +
             std::to_string(t));
      const int a = m.triangles[t].v[(j + 1) % 3];
      const int b = m.triangles[t].v[(j + 2) % 3];
      if (std::min(a, b) != ed.v[0] || std::max(a, b) != ed.v[1])
        flag("edge " + std::to_string(e) + " endpoint mismatch in triangle " +
             std::to_string(t));
    }
    if (std::abs(longest - m.triangles[t].h) > 1e-14 * (1.0 + longest))
      flag("triangle " + std::to_string(t) + " has stale diameter");
  }

  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edges[e];
    if (ed.boundary != (ed.tri[1] == -1))
      flag("edge " + std::to_string(e) + " has inconsistent boundary flag");
    for (int s = 0; s < 2; ++s) {
      const int t = ed.tri[s];
      if (t == -1) continue;
      if (t < 0 || t >= m.num_triangles()) {
        flag("edge " + std::to_string(e) + " references invalid triangle");
        continue;
      }
      if (m.local_edge(t, e) == -1)
        flag("triangle " + std::to_string(t) + " does not list adjacent edge " +
             std::to_string(e));
    }
    if (ed.boundary) {
      const Point2 a = m.vertices[ed.v[0]];
      const Point2 b = m.vertices[ed.v[1]];
      auto on_side = [](double ax, double bx) {
        return (std::abs(ax) < 1e-12 && std::abs(bx) < 1e-12) ||
               (std::abs(ax - 1.0) < 1e-12 && std::abs(bx - 1.0) < 1e-12);
      };
      if (!on_side(a.x, b.x) && !on_side(a.y, b.y))
        flag("boundary edge " + std::to_string(e) + " is not on the unit square boundary");
    }
  }

  const int euler = m.num_vertices() - m.num_edges() + m.num_triangles();
  if (euler != 1)
    flag("Euler characteristic V-E+T = " + std::to_string(euler) + ", expected 1");
  return rep;
}

// Plain-text mesh input.  First line: vertex and triangle counts.  Then one
// `x y` line per vertex and one `i j k` line per triangle (0-based, CCW).
inline Mesh read_mesh(std::istream& in) {
  int nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw std::runtime_error("read_mesh: missing header counts");
  if (nv < 3 || nt < 1) throw std::runtime_error("read_mesh: implausible header counts");

  std::vector<Point2> verts(nv);
  for (int i = 0; i < nv; ++i)
    if (!(in >> verts[i].x >> verts[i].y))
      throw std::runtime_error("read_mesh: truncated vertex list at entry " +
                               std::to_string(i));

  std::vector<std::array<int, 3>> cells(nt);
  for (int t = 0; t < nt; ++t) {
    if (!(in >> cells[t][0] >> cells[t][1] >> cells[t][2]))
      throw std::runtime_error("read_mesh: truncated triangle list at entry " +
                               std::to_string(t));
    for (int j = 0; j < 3; ++j)
      if (cells[t][j] < 0 || cells[t][j] >= nv)
        throw std::runtime_error("read_mesh: vertex index out of range in triangle " +
                                 std::to_string(t));
  }

  Mesh m = detail::build_mesh(std::move(verts), cells);
  for (int t = 0; t < m.num_triangles(); ++t)
    if (m.signed_area(t) <= 0.0)
      throw std::runtime_error("read_mesh: triangle " + std::to_string(t) +
                               " is not counter-clockwise");
  return m;
}

inline Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  return read_mesh(in);
}

}  // namespace rshdg
