#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "rshdg/mesh.hpp"

using namespace rshdg;

namespace {

double total_area(const Mesh& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) a += m.area(t);
  return a;
}

}  // namespace

TEST_CASE("structured mesh counts") {
  for (int n : {1, 2, 3, 4, 8}) {
    const Mesh m = structured_unit_square(n);
    CHECK(m.num_vertices() == (n + 1) * (n + 1));
    CHECK(m.num_triangles() == 2 * n * n);
    CHECK(m.num_edges() == 3 * n * n + 2 * n);
    CHECK(m.num_boundary_edges() == 4 * n);
    CHECK(m.num_interior_edges() == 3 * n * n - 2 * n);
  }
}

TEST_CASE("structured mesh size") {
  const Mesh m = structured_unit_square(4);
  CHECK(m.h == Catch::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-15));
  for (const Triangle& t : m.triangles)
    CHECK(t.h == Catch::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-15));
}

TEST_CASE("structured mesh rejects nonpositive n") {
  CHECK_THROWS_AS(structured_unit_square(0), std::invalid_argument);
  CHECK_THROWS_AS(structured_unit_square(-2), std::invalid_argument);
}

TEST_CASE("Euler characteristic equals one") {
  for (int n = 1; n <= 16; ++n) {
    const Mesh m = structured_unit_square(n);
    CHECK(m.num_vertices() - m.num_edges() + m.num_triangles() == 1);
  }
}

TEST_CASE("triangles are counter-clockwise and cover the square") {
  for (int n : {1, 3, 7}) {
    const Mesh m = structured_unit_square(n);
    for (int t = 0; t < m.num_triangles(); ++t) CHECK(m.signed_area(t) > 0.0);
    CHECK(total_area(m) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("edge records are mutually consistent with triangles") {
  const Mesh m = structured_unit_square(5);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edges[e];
    CHECK(ed.v[0] < ed.v[1]);
    CHECK(ed.boundary == (ed.tri[1] == -1));
    for (int s = 0; s < 2; ++s) {
      if (ed.tri[s] == -1) continue;
      const int j = m.local_edge(ed.tri[s], e);
      REQUIRE(j != -1);
      // edge j spans the two triangle vertices other than vertex j
      const Triangle& tri = m.triangles[ed.tri[s]];
      std::set<int> expect{tri.v[(j + 1) % 3], tri.v[(j + 2) % 3]};
      CHECK(expect == std::set<int>{ed.v[0], ed.v[1]});
    }
  }
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int j = 0; j < 3; ++j) {
      const Edge& ed = m.edges[m.triangles[t].e[j]];
      CHECK((ed.tri[0] == t || ed.tri[1] == t));
    }
}

TEST_CASE("edge normals are unit and point out of the first adjacent triangle") {
  const Mesh m = structured_unit_square(3);
  for (int e = 0; e < m.num_edges(); ++e) {
    const Edge& ed = m.edges[e];
    CHECK(norm(ed.normal) == Catch::Approx(1.0).epsilon(1e-14));
    const Point2 to_centroid = m.centroid(ed.tri[0]) - m.edge_midpoint(e);
    CHECK(dot(ed.normal, to_centroid) < 0.0);
    if (!ed.boundary) {
      const Point2 to_other = m.centroid(ed.tri[1]) - m.edge_midpoint(e);
      CHECK(dot(ed.normal, to_other) > 0.0);
      CHECK(dot(m.outward_normal(e, ed.tri[0]), m.outward_normal(e, ed.tri[1])) ==
            Catch::Approx(-1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("edge normals are orthogonal to the edge") {
  const Mesh m = structured_unit_square(2);
  for (const Edge& ed : m.edges) {
    const Point2 d = m.vertices[ed.v[1]] - m.vertices[ed.v[0]];
    CHECK(std::abs(dot(ed.normal, d)) < 1e-14);
  }
}

TEST_CASE("uniform refinement counts") {
  const Mesh m = structured_unit_square(2);
  const Mesh r = uniform_refine(m);
  CHECK(r.num_triangles() == 4 * m.num_triangles());
  CHECK(r.num_vertices() == m.num_vertices() + m.num_edges());
  CHECK(r.num_edges() == 2 * m.num_edges() + 3 * m.num_triangles());
  CHECK(r.num_vertices() - r.num_edges() + r.num_triangles() == 1);
  CHECK(total_area(r) == Catch::Approx(1.0).margin(1e-12));
  CHECK(validate(r).ok());

  const Mesh rr = uniform_refine(r);
  CHECK(rr.num_triangles() == 128);
  CHECK(validate(rr).ok());
}

TEST_CASE("refinement halves the mesh size exactly on dyadic meshes") {
  for (int n : {2, 4}) {
    const Mesh m = structured_unit_square(n);
    const Mesh r = uniform_refine(m);
    CHECK(r.h == m.h / 2.0);  // dyadic coordinates make this exact
    for (const Triangle& t : r.triangles) CHECK(t.h == m.h / 2.0);
  }
  const Mesh m3 = structured_unit_square(3);
  const Mesh r3 = uniform_refine(m3);
  CHECK(r3.h == Catch::Approx(m3.h / 2.0).epsilon(1e-15));
}

TEST_CASE("refinement matches the next structured mesh in size") {
  const Mesh r = uniform_refine(structured_unit_square(2));
  const Mesh s = structured_unit_square(4);
  CHECK(r.num_triangles() == s.num_triangles());
  CHECK(r.num_edges() == s.num_edges());
  CHECK(r.h == Catch::Approx(s.h).epsilon(1e-15));
}

TEST_CASE("validate passes on structured and refined meshes") {
  CHECK(validate(structured_unit_square(1)).ok());
  CHECK(validate(structured_unit_square(6)).ok());
  CHECK(validate(uniform_refine(structured_unit_square(3))).ok());
}

TEST_CASE("validate flags a flipped triangle") {
  Mesh m = structured_unit_square(2);
  std::swap(m.triangles[3].v[0], m.triangles[3].v[1]);
  const MeshReport rep = validate(m);
  CHECK_FALSE(rep.ok());
  bool found = false;
  for (const std::string& s : rep.issues)
    if (s.find("counter-clockwise") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("validate flags broken adjacency") {
  Mesh m = structured_unit_square(2);
  m.edges[5].tri[0] = (m.edges[5].tri[0] + 1) % m.num_triangles();
  CHECK_FALSE(validate(m).ok());
}

TEST_CASE("validate flags a broken Euler characteristic") {
  Mesh m = structured_unit_square(2);
  m.vertices.push_back({0.25, 0.25});  // unused vertex
  const MeshReport rep = validate(m);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("mesh file import") {
  // one square, two triangles
  std::istringstream in(
      "4 2\n"
      "0 0\n1 0\n1 1\n0 1\n"
      "0 1 2\n0 2 3\n");
  const Mesh m = read_mesh(in);
  CHECK(m.num_vertices() == 4);
  CHECK(m.num_triangles() == 2);
  CHECK(m.num_edges() == 5);
  CHECK(validate(m).ok());
  CHECK(total_area(m) == Catch::Approx(1.0).margin(1e-14));
}

TEST_CASE("mesh file import rejects malformed input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_mesh(empty), std::runtime_error);

  std::istringstream truncated("4 2\n0 0\n1 0\n");
  CHECK_THROWS_AS(read_mesh(truncated), std::runtime_error);

  std::istringstream bad_index(
      "4 2\n0 0\n1 0\n1 1\n0 1\n"
      "0 1 7\n0 2 3\n");
  CHECK_THROWS_AS(read_mesh(bad_index), std::runtime_error);

  std::istringstream clockwise(
      "3 1\n0 0\n1 0\n0 1\n"
      "0 2 1\n");
  CHECK_THROWS_AS(read_mesh(clockwise), std::runtime_error);
}

TEST_CASE("single-triangle mesh") {
  std::istringstream in("3 1\n0 0\n1 0\n0 1\n0 1 2\n");
  const Mesh m = read_mesh(in);
  CHECK(m.num_triangles() == 1);
  CHECK(m.num_edges() == 3);
  CHECK(m.num_boundary_edges() == 3);
  CHECK(m.area(0) == Catch::Approx(0.5).epsilon(1e-15));
}
