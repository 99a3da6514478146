#pragma once

// Element-local matrices of the hybridized Stokes discretization.
//
// All bases are scaled by 1/sqrt(det B) so they are orthonormal in L2 of the
// physical element (resp. edge).  Velocity components are kept in separate
// blocks: a local velocity vector stacks [u_x coefficients, u_y coefficients],
// and facet vectors stack the two components the same way.
//
// The stabilization uses the projected jump: on every edge the trace of the
// element velocity is L2-projected onto the degree-k facet polynomials before
// being compared with the facet unknown.  With orthonormal facet bases that
// projection is the plain coefficient vector T * U, so the stabilization
// blocks below are assembled from the trace-projection matrix T directly.

#include <array>
#include <functional>

#include <Eigen/Dense>

#include "rshdg/basis.hpp"
#include "rshdg/mesh.hpp"
#include "rshdg/quadrature.hpp"
#include "rshdg/space.hpp"

namespace rshdg {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Eigen::Vector2d(double, double)>;

struct ElementGeometry {
  Point2 v0;
  Eigen::Matrix2d B;     // reference-to-physical Jacobian
  Eigen::Matrix2d Binv;
  double detB = 0.0;     // = 2 * area, positive for CCW elements
  double scale = 0.0;    // 1 / sqrt(detB); basis normalization factor
};

inline ElementGeometry element_geometry(const Mesh& mesh, int elem) {
  const auto c = mesh.corners(elem);
  ElementGeometry g;
  g.v0 = c[0];
  g.B << c[1].x - c[0].x, c[2].x - c[0].x, c[1].y - c[0].y, c[2].y - c[0].y;
  g.detB = g.B(0, 0) * g.B(1, 1) - g.B(0, 1) * g.B(1, 0);
  if (g.detB <= 0.0)
    throw std::runtime_error("element_geometry: element is not counter-clockwise");
  g.Binv << g.B(1, 1) / g.detB, -g.B(0, 1) / g.detB, -g.B(1, 0) / g.detB,
      g.B(0, 0) / g.detB;
  g.scale = 1.0 / std::sqrt(g.detB);
  return g;
}

inline Eigen::Vector2d to_reference(const ElementGeometry& g, double x, double y) {
  return g.Binv * Eigen::Vector2d(x - g.v0.x, y - g.v0.y);
}

// Shared basis objects for one choice of k.
struct ElementBases {
  explicit ElementBases(const SpaceSpec& spec)
      : velocity(spec.k + 1), pressure(spec.k), facet(spec.k) {}
  TriBasis velocity;
  TriBasis pressure;
  EdgeBasis facet;
};

struct LocalForms {
  // Laplacian block with consistency and stabilization terms folded in.
  Eigen::MatrixXd A_uu;                 // ndof_u x ndof_u
  std::array<Eigen::MatrixXd, 3> A_hu;  // ndof_uhat x ndof_u, per local edge
  std::array<Eigen::MatrixXd, 3> A_hh;  // ndof_uhat x ndof_uhat, per local edge
  // Divergence coupling: rows are pressure test functions.
  Eigen::MatrixXd B_u;                  // nb_p x ndof_u
  std::array<Eigen::MatrixXd, 3> B_h;   // nb_p x ndof_uhat, per local edge
  // Scalar facet trace projection, per local edge: (T * u_c) are the facet
  // coefficients of the projected trace of one velocity component.
  std::array<Eigen::MatrixXd, 3> T;     // nf x nb_u
};

inline LocalForms local_forms(const Mesh& mesh, int elem, const SpaceSpec& spec,
                              const ElementBases& bases) {
  const ElementGeometry geo = element_geometry(mesh, elem);
  const int nb = spec.nb_u(), np = spec.nb_p(), nf = spec.nf(), k = spec.k;

  // Volume terms: grad-grad stiffness and pressure-divergence coupling.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd G0 = Eigen::MatrixXd::Zero(np, nb);
  Eigen::MatrixXd G1 = Eigen::MatrixXd::Zero(np, nb);
  const TriQuadRule vol_rule = tri_quadrature(2 * (k + 1));
  for (int q = 0; q < vol_rule.size(); ++q) {
    const double xi = vol_rule.points[q].x, eta = vol_rule.points[q].y;
    const double w = vol_rule.weights[q] * geo.detB;
    const Eigen::MatrixXd grad =
        geo.scale * bases.velocity.gradients(xi, eta) * geo.Binv;  // nb x 2, physical
    const Eigen::VectorXd pv = geo.scale * bases.pressure.values(xi, eta);
    S += w * grad * grad.transpose();
    G0 += w * pv * grad.col(0).transpose();
    G1 += w * pv * grad.col(1).transpose();
  }

  LocalForms lf;
  lf.A_uu = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
  lf.B_u = Eigen::MatrixXd::Zero(np, 2 * nb);
  lf.B_u.block(0, 0, np, nb) = -G0;
  lf.B_u.block(0, nb, np, nb) = -G1;

  Eigen::MatrixXd Suu = S;  // accumulated scalar A_uu block

  const EdgeQuadRule edge_rule = gauss_legendre(k + 2);
  for (int j = 0; j < 3; ++j) {
    const int eid = mesh.triangles[elem].e[j];
    const Edge& edge = mesh.edges[eid];
    const double he = edge.length;
    const Point2 n2 = mesh.outward_normal(eid, elem);
    const Eigen::Vector2d n(n2.x, n2.y);
    const Point2 a = mesh.vertices[edge.v[0]];
    const Point2 b = mesh.vertices[edge.v[1]];

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(nb, nb);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nf, nb);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(nf, nb);
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(np, nb);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(np, nf);
    for (int q = 0; q < edge_rule.size(); ++q) {
      const double t = edge_rule.points[q];
      const double x = 0.5 * (a.x + b.x) + 0.5 * t * (b.x - a.x);
      const double y = 0.5 * (a.y + b.y) + 0.5 * t * (b.y - a.y);
      const Eigen::Vector2d ref = to_reference(geo, x, y);
      const double w = edge_rule.weights[q] * 0.5 * he;
      const Eigen::VectorXd vals = geo.scale * bases.velocity.values(ref[0], ref[1]);
      const Eigen::VectorXd dn =
          (geo.scale * bases.velocity.gradients(ref[0], ref[1]) * geo.Binv) * n;
      const Eigen::VectorXd pv = geo.scale * bases.pressure.values(ref[0], ref[1]);
      const Eigen::VectorXd mu = std::sqrt(2.0 / he) * bases.facet.values(t);
      C += w * vals * dn.transpose();
      D += w * mu * dn.transpose();
      T += w * mu * vals.transpose();
      Z += w * pv * vals.transpose();
      W += w * pv * mu.transpose();
    }

    const double stab = spec.tau / he;
    Suu += -C - C.transpose() + stab * T.transpose() * T;

    lf.A_hu[j] = Eigen::MatrixXd::Zero(2 * nf, 2 * nb);
    lf.A_hh[j] = Eigen::MatrixXd::Zero(2 * nf, 2 * nf);
    lf.B_h[j] = Eigen::MatrixXd::Zero(np, 2 * nf);
    for (int c = 0; c < 2; ++c) {
      lf.A_hu[j].block(c * nf, c * nb, nf, nb) = D - stab * T;
      lf.A_hh[j].block(c * nf, c * nf, nf, nf) =
          stab * Eigen::MatrixXd::Identity(nf, nf);
      lf.B_h[j].block(0, c * nf, np, nf) = -n[c] * W;
      lf.B_u.block(0, c * nb, np, nb) += n[c] * Z;
    }
    lf.T[j] = T;
  }

  for (int c = 0; c < 2; ++c) lf.A_uu.block(c * nb, c * nb, nb, nb) = Suu;
  return lf;
}

inline LocalForms local_forms(const Mesh& mesh, int elem, const SpaceSpec& spec) {
  return local_forms(mesh, elem, spec, ElementBases(spec));
}

// Element load vector (f, v)_K against the velocity basis.
inline Eigen::VectorXd local_load(const Mesh& mesh, int elem, const SpaceSpec& spec,
                                  const ElementBases& bases, const VectorField& f,
                                  int quad_boost) {
  const ElementGeometry geo = element_geometry(mesh, elem);
  const int nb = spec.nb_u();
  const TriQuadRule rule = tri_quadrature(2 * (spec.k + 1) + quad_boost);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(2 * nb);
  for (int q = 0; q < rule.size(); ++q) {
    const double xi = rule.points[q].x, eta = rule.points[q].y;
    const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
    const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
    const double w = rule.weights[q] * geo.detB;
    const Eigen::VectorXd vals = geo.scale * bases.velocity.values(xi, eta);
    const Eigen::Vector2d fv = f(x, y);
    F.segment(0, nb) += w * fv[0] * vals;
    F.segment(nb, nb) += w * fv[1] * vals;
  }
  return F;
}

// L2 projection of a vector field onto the element velocity space.
inline Eigen::VectorXd project_velocity(const Mesh& mesh, int elem, const SpaceSpec& spec,
                                        const ElementBases& bases, const VectorField& v,
                                        int exactness) {
  const ElementGeometry geo = element_geometry(mesh, elem);
  const int nb = spec.nb_u();
  const TriQuadRule rule = tri_quadrature(exactness);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * nb);
  for (int q = 0; q < rule.size(); ++q) {
    const double xi = rule.points[q].x, eta = rule.points[q].y;
    const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
    const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
    const double w = rule.weights[q] * geo.detB;
    const Eigen::VectorXd vals = geo.scale * bases.velocity.values(xi, eta);
    const Eigen::Vector2d vv = v(x, y);
    c.segment(0, nb) += w * vv[0] * vals;
    c.segment(nb, nb) += w * vv[1] * vals;
  }
  return c;
}

// L2 projection of a scalar field onto the element pressure space.
inline Eigen::VectorXd project_pressure(const Mesh& mesh, int elem, const SpaceSpec& spec,
                                        const ElementBases& bases, const ScalarField& p,
                                        int exactness) {
  const ElementGeometry geo = element_geometry(mesh, elem);
  const TriQuadRule rule = tri_quadrature(exactness);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.nb_p());
  for (int q = 0; q < rule.size(); ++q) {
    const double xi = rule.points[q].x, eta = rule.points[q].y;
    const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
    const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
    const double w = rule.weights[q] * geo.detB;
    c += w * p(x, y) * (geo.scale * bases.pressure.values(xi, eta));
  }
  return c;
}

// L2 projection of the two components of a vector field onto the facet
// polynomials of one edge, against the orthonormal facet basis.
inline Eigen::VectorXd project_facet(const Mesh& mesh, int edge_id, const SpaceSpec& spec,
                                     const ElementBases& bases, const VectorField& g,
                                     int npoints) {
  const Edge& edge = mesh.edges[edge_id];
  const Point2 a = mesh.vertices[edge.v[0]];
  const Point2 b = mesh.vertices[edge.v[1]];
  const double he = edge.length;
  const int nf = spec.nf();
  const EdgeQuadRule rule = gauss_legendre(npoints);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * nf);
  for (int q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q];
    const double x = 0.5 * (a.x + b.x) + 0.5 * t * (b.x - a.x);
    const double y = 0.5 * (a.y + b.y) + 0.5 * t * (b.y - a.y);
    const double w = rule.weights[q] * 0.5 * he;
    const Eigen::VectorXd mu = std::sqrt(2.0 / he) * bases.facet.values(t);
    const Eigen::Vector2d gv = g(x, y);
    c.segment(0, nf) += w * gv[0] * mu;
    c.segment(nf, nf) += w * gv[1] * mu;
  }
  return c;
}

// Pointwise evaluation of a discrete velocity given its coefficient vector.
inline Eigen::Vector2d velocity_value(const ElementGeometry& geo, const TriBasis& basis,
                                      const Eigen::VectorXd& coeffs, double xi, double eta) {
  const int nb = basis.size();
  const Eigen::VectorXd vals = geo.scale * basis.values(xi, eta);
  return Eigen::Vector2d(coeffs.segment(0, nb).dot(vals), coeffs.segment(nb, nb).dot(vals));
}

// Physical gradient; entry (c, d) = d u_c / d x_d.
inline Eigen::Matrix2d velocity_gradient(const ElementGeometry& geo, const TriBasis& basis,
                                         const Eigen::VectorXd& coeffs, double xi,
                                         double eta) {
  const int nb = basis.size();
  const Eigen::MatrixXd grad = geo.scale * basis.gradients(xi, eta) * geo.Binv;  // nb x 2
  Eigen::Matrix2d g;
  for (int c = 0; c < 2; ++c)
    for (int d = 0; d < 2; ++d) g(c, d) = coeffs.segment(c * nb, nb).dot(grad.col(d));
  return g;
}

// Physical second derivatives of both components; [c] is the Hessian of u_c.
inline std::array<Eigen::Matrix2d, 2> velocity_hessian(const ElementGeometry& geo,
                                                       const TriBasis& basis,
                                                       const Eigen::VectorXd& coeffs,
                                                       double xi, double eta) {
  const int nb = basis.size();
  const Eigen::MatrixXd href = basis.hessians(xi, eta);  // nb x 3: (xx, xy, yy) reference
  std::array<Eigen::Matrix2d, 2> out;
  for (int c = 0; c < 2; ++c) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    for (int i = 0; i < nb; ++i) {
      Eigen::Matrix2d hr;
      hr << href(i, 0), href(i, 1), href(i, 1), href(i, 2);
      h += coeffs[c * nb + i] * hr;
    }
    out[c] = geo.scale * geo.Binv.transpose() * h * geo.Binv;
  }
  return out;
}

inline double pressure_value(const ElementGeometry& geo, const TriBasis& basis,
                             const Eigen::VectorXd& coeffs, double xi, double eta) {
  return coeffs.dot(geo.scale * basis.values(xi, eta));
}

}  // namespace rshdg
