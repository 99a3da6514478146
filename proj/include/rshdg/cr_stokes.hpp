#pragma once

// Nonconforming P1-P0 (Crouzeix-Raviart) Stokes solver, used as the limit
// reference for the lowest-order hybridized method.
//
// Velocity unknowns are the two components of the edge-mean values, one pair
// per interior edge; boundary edges carry the edge mean of the Dirichlet
// datum.  The pressure is piecewise constant with area-weighted zero mean,
// enforced by a scalar multiplier.  The load functional uses the same
// triangle quadrature rule as the hybridized assembly so that the two
// discretizations see identical data.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rshdg/assemble.hpp"
#include "rshdg/local_forms.hpp"
#include "rshdg/mesh.hpp"
#include "rshdg/sparse.hpp"

namespace rshdg {

struct CrSolution {
  Mesh mesh;
  std::vector<Eigen::Vector2d> velocity;  // per edge: mean value over the edge
  std::vector<double> pressure;           // per element constant
  double multiplier = 0.0;
};

namespace detail {

// Gradients of the three nonconforming basis functions 1 - 2*lambda_i on the
// physical element; function i is associated with edge i (opposite vertex i).
inline std::array<Eigen::Vector2d, 3> cr_gradients(const ElementGeometry& geo) {
  const Eigen::Matrix2d bit = geo.Binv.transpose();
  const Eigen::Vector2d gl1 = bit * Eigen::Vector2d(1.0, 0.0);
  const Eigen::Vector2d gl2 = bit * Eigen::Vector2d(0.0, 1.0);
  const Eigen::Vector2d gl0 = -gl1 - gl2;
  return {-2.0 * gl0, -2.0 * gl1, -2.0 * gl2};
}

inline double cr_value(int i, double xi, double eta) {
  const double lambda = (i == 0) ? 1.0 - xi - eta : (i == 1 ? xi : eta);
  return 1.0 - 2.0 * lambda;
}

}  // namespace detail

inline CrSolution solve_cr(const Mesh& mesh, const VectorField& f,
                           const VectorField* dirichlet = nullptr, int quad_boost = 4) {
  std::vector<int> interior(mesh.num_edges(), -1);
  int n_int = 0;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edges[e].boundary) interior[e] = n_int++;

  const int nvel = 2 * n_int;
  const int dim = nvel + mesh.num_triangles() + 1;
  SparseMatrix matrix(dim);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  // boundary edge means of the Dirichlet datum, same quadrature as the
  // hybridized facet projection at the lowest order
  std::vector<Eigen::Vector2d> bvals(mesh.num_edges(), Eigen::Vector2d::Zero());
  if (dirichlet) {
    const EdgeQuadRule brule = gauss_legendre(2 + (quad_boost + 1) / 2);
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (!mesh.edges[e].boundary) continue;
      const Point2 a = mesh.vertices[mesh.edges[e].v[0]];
      const Point2 b = mesh.vertices[mesh.edges[e].v[1]];
      Eigen::Vector2d mean = Eigen::Vector2d::Zero();
      for (int q = 0; q < brule.size(); ++q) {
        const double t = brule.points[q];
        mean += 0.5 * brule.weights[q] *
                (*dirichlet)(0.5 * (a.x + b.x) + 0.5 * t * (b.x - a.x),
                             0.5 * (a.y + b.y) + 0.5 * t * (b.y - a.y));
      }
      bvals[e] = mean;
    }
  }

  const TriQuadRule f_rule = tri_quadrature(2 + quad_boost);
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(mesh, elem);
    const double area = 0.5 * geo.detB;
    const auto grads = detail::cr_gradients(geo);
    const int prow = nvel + elem;

    Eigen::Vector3d load[2] = {Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero()};
    for (int q = 0; q < f_rule.size(); ++q) {
      const double xi = f_rule.points[q].x, eta = f_rule.points[q].y;
      const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
      const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
      const double w = f_rule.weights[q] * geo.detB;
      const Eigen::Vector2d fv = f(x, y);
      for (int i = 0; i < 3; ++i) {
        const double v = detail::cr_value(i, xi, eta);
        load[0][i] += w * fv[0] * v;
        load[1][i] += w * fv[1] * v;
      }
    }

    for (int i = 0; i < 3; ++i) {
      const int ei = mesh.triangles[elem].e[i];
      for (int c = 0; c < 2; ++c) {
        const double bval = -area * grads[i][c];  // -(div v, q) coupling
        if (interior[ei] != -1) {
          const int row = 2 * interior[ei] + c;
          rhs[row] += load[c][i];
          matrix.add(prow, row, bval);
          matrix.add(row, prow, bval);
          for (int j = 0; j < 3; ++j) {
            const int ej = mesh.triangles[elem].e[j];
            const double a_ij = area * grads[i].dot(grads[j]);
            if (interior[ej] != -1)
              matrix.add(row, 2 * interior[ej] + c, a_ij);
            else
              rhs[row] -= a_ij * bvals[ej][c];
          }
        } else {
          rhs[prow] -= bval * bvals[ei][c];
        }
      }
    }

    matrix.add(prow, dim - 1, area);
    matrix.add(dim - 1, prow, area);
  }

  matrix.compress();
  const Eigen::VectorXd x = factorize(matrix).solve(rhs);

  CrSolution sol;
  sol.mesh = mesh;
  sol.velocity.assign(mesh.num_edges(), Eigen::Vector2d::Zero());
  for (int e = 0; e < mesh.num_edges(); ++e)
    sol.velocity[e] = (interior[e] != -1)
                          ? Eigen::Vector2d(x[2 * interior[e]], x[2 * interior[e] + 1])
                          : bvals[e];
  sol.pressure.resize(mesh.num_triangles());
  for (int elem = 0; elem < mesh.num_triangles(); ++elem)
    sol.pressure[elem] = x[nvel + elem];
  sol.multiplier = x[dim - 1];
  return sol;
}

// Pointwise evaluation of the nonconforming velocity on one element.
inline Eigen::Vector2d cr_velocity_value(const CrSolution& sol, int elem, double xi,
                                         double eta) {
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int i = 0; i < 3; ++i)
    v += detail::cr_value(i, xi, eta) * sol.velocity[sol.mesh.triangles[elem].e[i]];
  return v;
}

// Edge means of a lowest-order facet field.  The nonconforming interpolant
// defined by matching edge integrals takes exactly these values at the edge
// midpoints, so this is the velocity part of the interpolated solution.
inline std::vector<Eigen::Vector2d> facet_edge_means(const HdgSolution& hdg) {
  if (hdg.spec.k != 0)
    throw std::invalid_argument("facet_edge_means: requires lowest-order facet space");
  std::vector<Eigen::Vector2d> means(hdg.mesh.num_edges());
  for (int e = 0; e < hdg.mesh.num_edges(); ++e) {
    const double scale = 1.0 / std::sqrt(hdg.mesh.edges[e].length);
    means[e] = Eigen::Vector2d(hdg.uhat[e][0] * scale, hdg.uhat[e][1] * scale);
  }
  return means;
}

struct CrDiscrepancy {
  double velocity = 0.0;  // max over edges of the midpoint-value difference
  double pressure = 0.0;  // max over elements of the constant-value difference
};

// Distance between a lowest-order hybridized solution and a nonconforming
// solution on the same mesh: facet values against edge means, elementwise
// pressure constants against each other.
inline CrDiscrepancy compare_with_cr(const HdgSolution& hdg, const CrSolution& cr) {
  if (hdg.spec.k != 0)
    throw std::invalid_argument("compare_with_cr: requires lowest-order facet space");
  if (hdg.mesh.num_edges() != cr.mesh.num_edges() ||
      hdg.mesh.num_triangles() != cr.mesh.num_triangles())
    throw std::invalid_argument("compare_with_cr: mesh mismatch");

  CrDiscrepancy d;
  const std::vector<Eigen::Vector2d> means = facet_edge_means(hdg);
  for (int e = 0; e < hdg.mesh.num_edges(); ++e)
    d.velocity = std::max(d.velocity, (means[e] - cr.velocity[e]).cwiseAbs().maxCoeff());
  for (int elem = 0; elem < hdg.mesh.num_triangles(); ++elem) {
    const double area = hdg.mesh.area(elem);
    const double hp = hdg.p[elem][0] / std::sqrt(area);
    d.pressure = std::max(d.pressure, std::abs(hp - cr.pressure[elem]));
  }
  return d;
}

// Broken H1 seminorm of (nonconforming velocity - hybridized velocity).
inline double cr_h1_diff(const CrSolution& cr, const HdgSolution& hdg) {
  if (hdg.spec.k != 0)
    throw std::invalid_argument("cr_h1_diff: requires lowest-order velocity space");
  const ElementBases bases(hdg.spec);
  const TriQuadRule rule = tri_quadrature(2);
  double s = 0.0;
  for (int elem = 0; elem < hdg.mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(hdg.mesh, elem);
    const auto grads = detail::cr_gradients(geo);
    Eigen::Matrix2d gcr = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 3; ++i)
      gcr += cr.velocity[hdg.mesh.triangles[elem].e[i]] * grads[i].transpose();
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix2d gh = velocity_gradient(geo, bases.velocity, hdg.u[elem],
                                                   rule.points[q].x, rule.points[q].y);
      s += rule.weights[q] * geo.detB * (gcr - gh).squaredNorm();
    }
  }
  return std::sqrt(s);
}

// L2 distance of the two piecewise-constant pressures.
inline double cr_pressure_diff(const CrSolution& cr, const HdgSolution& hdg) {
  if (hdg.spec.k != 0)
    throw std::invalid_argument("cr_pressure_diff: requires piecewise-constant pressure");
  double s = 0.0;
  for (int elem = 0; elem < hdg.mesh.num_triangles(); ++elem) {
    const double area = hdg.mesh.area(elem);
    const double d = cr.pressure[elem] - hdg.p[elem][0] / std::sqrt(area);
    s += area * d * d;
  }
  return std::sqrt(s);
}

}  // namespace rshdg
