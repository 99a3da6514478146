#pragma once

// Global saddle-point assembly of the hybridized Stokes system, the full
// (uncondensed) solve, and operator-level diagnostics: the energy quadratic
// form, consistency residuals of manufactured solutions, the Fortin defect of
// the projection pair, and the discrete divergence residual.
//
// Unknown layout follows DofMap: element velocities, interior facet unknowns,
// element pressures, one scalar multiplier tying the pressure mean to zero.
// Boundary facet values are eliminated up front: the Dirichlet datum is
// projected edgewise onto the facet polynomials and its couplings moved to
// the right-hand side.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "rshdg/exact.hpp"
#include "rshdg/local_forms.hpp"
#include "rshdg/mesh.hpp"
#include "rshdg/space.hpp"
#include "rshdg/sparse.hpp"

namespace rshdg {

struct AssemblyOptions {
  int quad_boost = 4;  // extra quadrature exactness for data integrals
};

struct GlobalSystem {
  Mesh mesh;
  SpaceSpec spec;
  DofMap dofs;
  SparseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<Eigen::VectorXd> boundary_uhat;  // per edge; empty on interior edges
  std::vector<Eigen::VectorXd> load;           // per element, kept for condensation
  double f_l2 = 0.0;                           // L2 norm of the body force
  int quad_boost = 4;
};

inline GlobalSystem assemble(const Mesh& mesh, const SpaceSpec& spec, const VectorField& f,
                             const VectorField& g, const AssemblyOptions& options = {}) {
  const DofMap dofs(mesh, spec);
  const ElementBases bases(spec);
  const int nb = spec.nb_u(), np = spec.nb_p(), nf = spec.nf();

  GlobalSystem sys{mesh,
                   spec,
                   dofs,
                   SparseMatrix(dofs.dimension()),
                   Eigen::VectorXd::Zero(dofs.dimension()),
                   {},
                   {},
                   0.0,
                   options.quad_boost};

  // Edgewise projection of the Dirichlet datum onto the facet space.
  sys.boundary_uhat.resize(mesh.num_edges());
  const int g_points = spec.k + 2 + (options.quad_boost + 1) / 2;
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edges[e].boundary)
      sys.boundary_uhat[e] = project_facet(mesh, e, spec, bases, g, g_points);

  sys.load.resize(mesh.num_triangles());
  double f_l2_sq = 0.0;
  const TriQuadRule f_rule = tri_quadrature(2 * (spec.k + 1) + options.quad_boost);

  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const LocalForms lf = local_forms(mesh, elem, spec, bases);
    sys.load[elem] = local_load(mesh, elem, spec, bases, f, options.quad_boost);

    const int u0 = dofs.u_begin(elem);
    const int p0 = dofs.p_begin(elem);

    for (int i = 0; i < 2 * nb; ++i) {
      sys.rhs[u0 + i] += sys.load[elem][i];
      for (int j = 0; j < 2 * nb; ++j) sys.matrix.add(u0 + i, u0 + j, lf.A_uu(i, j));
    }
    for (int m = 0; m < np; ++m)
      for (int i = 0; i < 2 * nb; ++i) {
        sys.matrix.add(p0 + m, u0 + i, lf.B_u(m, i));
        sys.matrix.add(u0 + i, p0 + m, lf.B_u(m, i));
      }

    for (int j = 0; j < 3; ++j) {
      const int eid = mesh.triangles[elem].e[j];
      const int h0 = dofs.uhat_begin(eid);
      if (h0 != -1) {
        for (int r = 0; r < 2 * nf; ++r) {
          for (int i = 0; i < 2 * nb; ++i) {
            sys.matrix.add(h0 + r, u0 + i, lf.A_hu[j](r, i));
            sys.matrix.add(u0 + i, h0 + r, lf.A_hu[j](r, i));
          }
          for (int s = 0; s < 2 * nf; ++s) sys.matrix.add(h0 + r, h0 + s, lf.A_hh[j](r, s));
          for (int m = 0; m < np; ++m) {
            sys.matrix.add(p0 + m, h0 + r, lf.B_h[j](m, r));
            sys.matrix.add(h0 + r, p0 + m, lf.B_h[j](m, r));
          }
        }
      } else {
        const Eigen::VectorXd& ghat = sys.boundary_uhat[eid];
        const Eigen::VectorXd ru = lf.A_hu[j].transpose() * ghat;
        const Eigen::VectorXd rp = lf.B_h[j] * ghat;
        for (int i = 0; i < 2 * nb; ++i) sys.rhs[u0 + i] -= ru[i];
        for (int m = 0; m < np; ++m) sys.rhs[p0 + m] -= rp[m];
      }
    }

    // Zero-mean pressure constraint: the constant pressure mode integrates to
    // sqrt(area); higher modes have zero mean by orthogonality.
    const double root_area = std::sqrt(mesh.area(elem));
    sys.matrix.add(p0, dofs.multiplier(), root_area);
    sys.matrix.add(dofs.multiplier(), p0, root_area);

    const ElementGeometry geo = element_geometry(mesh, elem);
    for (int q = 0; q < f_rule.size(); ++q) {
      const double x = geo.v0.x + geo.B(0, 0) * f_rule.points[q].x +
                       geo.B(0, 1) * f_rule.points[q].y;
      const double y = geo.v0.y + geo.B(1, 0) * f_rule.points[q].x +
                       geo.B(1, 1) * f_rule.points[q].y;
      f_l2_sq += f_rule.weights[q] * geo.detB * f(x, y).squaredNorm();
    }
  }

  sys.f_l2 = std::sqrt(f_l2_sq);
  sys.matrix.compress();
  return sys;
}

struct HdgSolution {
  Mesh mesh;
  SpaceSpec spec;
  std::vector<Eigen::VectorXd> u;     // per element, 2 * nb_u
  std::vector<Eigen::VectorXd> uhat;  // per edge, 2 * nf; boundary edges carry data
  std::vector<Eigen::VectorXd> p;     // per element, nb_p
  double multiplier = 0.0;
};

inline HdgSolution unpack_solution(const GlobalSystem& sys, const Eigen::VectorXd& x) {
  const DofMap& dofs = sys.dofs;
  HdgSolution sol{sys.mesh, sys.spec, {}, {}, {}, x[dofs.multiplier()]};
  sol.u.resize(sys.mesh.num_triangles());
  sol.p.resize(sys.mesh.num_triangles());
  for (int elem = 0; elem < sys.mesh.num_triangles(); ++elem) {
    sol.u[elem] = x.segment(dofs.u_begin(elem), sys.spec.ndof_u());
    sol.p[elem] = x.segment(dofs.p_begin(elem), sys.spec.nb_p());
  }
  sol.uhat.resize(sys.mesh.num_edges());
  for (int e = 0; e < sys.mesh.num_edges(); ++e)
    sol.uhat[e] = sys.mesh.edges[e].boundary
                      ? sys.boundary_uhat[e]
                      : Eigen::VectorXd(x.segment(dofs.uhat_begin(e), sys.spec.ndof_uhat()));
  return sol;
}

inline HdgSolution solve_full(const GlobalSystem& sys, SolveReport* report = nullptr,
                              Ordering ordering = Ordering::fill_reducing) {
  const SparseFactorization fac(sys.matrix, ordering);
  return unpack_solution(sys, fac.solve(sys.rhs, report));
}

// Value of the energy bilinear form a_h((u, uhat), (u, uhat)) for a discrete
// velocity pair given by per-element and per-edge coefficients.
inline double a_form_value(const Mesh& mesh, const SpaceSpec& spec,
                           const std::vector<Eigen::VectorXd>& u,
                           const std::vector<Eigen::VectorXd>& uhat) {
  const ElementBases bases(spec);
  double value = 0.0;
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const LocalForms lf = local_forms(mesh, elem, spec, bases);
    value += u[elem].dot(lf.A_uu * u[elem]);
    for (int j = 0; j < 3; ++j) {
      const Eigen::VectorXd& h = uhat[mesh.triangles[elem].e[j]];
      value += 2.0 * h.dot(lf.A_hu[j] * u[elem]) + h.dot(lf.A_hh[j] * h);
    }
  }
  return value;
}

// Broken H1 seminorm squared of a discrete velocity.
inline double h1_seminorm_sq(const Mesh& mesh, const SpaceSpec& spec,
                             const std::vector<Eigen::VectorXd>& u) {
  const ElementBases bases(spec);
  const TriQuadRule rule = tri_quadrature(2 * spec.k);
  double value = 0.0;
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(mesh, elem);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Matrix2d g = velocity_gradient(geo, bases.velocity, u[elem],
                                                  rule.points[q].x, rule.points[q].y);
      value += rule.weights[q] * geo.detB * g.squaredNorm();
    }
  }
  return value;
}

// Squared jump seminorm: sum over element edges of |P_k(uhat - u)|^2 / h_e,
// where P_k is the facet projection.
inline double jump_seminorm_sq(const Mesh& mesh, const SpaceSpec& spec,
                               const std::vector<Eigen::VectorXd>& u,
                               const std::vector<Eigen::VectorXd>& uhat) {
  const ElementBases bases(spec);
  const int nb = spec.nb_u(), nf = spec.nf();
  double value = 0.0;
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const LocalForms lf = local_forms(mesh, elem, spec, bases);
    for (int j = 0; j < 3; ++j) {
      const int eid = mesh.triangles[elem].e[j];
      const double he = mesh.edges[eid].length;
      for (int c = 0; c < 2; ++c) {
        const Eigen::VectorXd d = uhat[eid].segment(c * nf, nf) -
                                  lf.T[j] * u[elem].segment(c * nb, nb);
        value += d.squaredNorm() / he;
      }
    }
  }
  return value;
}

// Residual of the discrete divergence equations b_h((u, uhat), q) = 0, taken
// elementwise over the orthonormal pressure basis; boundary facets use the
// stored data.  Returns the largest absolute residual entry.
inline double divergence_residual(const HdgSolution& sol) {
  const ElementBases bases(sol.spec);
  double residual = 0.0;
  for (int elem = 0; elem < sol.mesh.num_triangles(); ++elem) {
    const LocalForms lf = local_forms(sol.mesh, elem, sol.spec, bases);
    Eigen::VectorXd r = lf.B_u * sol.u[elem];
    for (int j = 0; j < 3; ++j) r += lf.B_h[j] * sol.uhat[sol.mesh.triangles[elem].e[j]];
    residual = std::max(residual, r.cwiseAbs().maxCoeff());
  }
  return residual;
}

struct ConsistencyResidual {
  double momentum = 0.0;    // largest momentum-row residual
  double divergence = 0.0;  // largest divergence-row residual
  double max() const { return std::max(momentum, divergence); }
};

// Inserts an exact solution into the discrete equations by direct quadrature
// and reports the largest residual over all test basis functions.  For
// polynomial data and sufficient quadrature the residual is at rounding
// level; for smooth data it decays as the quadrature degree is raised.
inline ConsistencyResidual consistency_residual(const ExactSolution& exact, const Mesh& mesh,
                                                const SpaceSpec& spec, int quad_boost) {
  const ElementBases bases(spec);
  const int nb = spec.nb_u(), np = spec.nb_p(), nf = spec.nf(), k = spec.k;
  const TriQuadRule vol_rule = tri_quadrature(2 * (k + 1) + quad_boost);
  const EdgeQuadRule edge_rule = gauss_legendre(k + 2 + (quad_boost + 1) / 2);

  ConsistencyResidual res;
  std::vector<Eigen::VectorXd> facet_residual(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
    facet_residual[e] = Eigen::VectorXd::Zero(2 * nf);

  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(mesh, elem);
    Eigen::VectorXd r_u = Eigen::VectorXd::Zero(2 * nb);
    Eigen::VectorXd r_p = Eigen::VectorXd::Zero(np);

    for (int q = 0; q < vol_rule.size(); ++q) {
      const double xi = vol_rule.points[q].x, eta = vol_rule.points[q].y;
      const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
      const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
      const double w = vol_rule.weights[q] * geo.detB;
      const Eigen::MatrixXd grad =
          geo.scale * bases.velocity.gradients(xi, eta) * geo.Binv;
      const Eigen::VectorXd vals = geo.scale * bases.velocity.values(xi, eta);
      const Eigen::VectorXd pv = geo.scale * bases.pressure.values(xi, eta);
      const Eigen::Matrix2d gu = exact.velocity_gradient(x, y);
      const double p = exact.pressure(x, y);
      const Eigen::Vector2d f = exact.body_force(x, y);
      for (int c = 0; c < 2; ++c)
        r_u.segment(c * nb, nb) +=
            w * (grad * gu.row(c).transpose() - p * grad.col(c) - f[c] * vals);
      r_p -= w * (gu(0, 0) + gu(1, 1)) * pv;
    }

    for (int j = 0; j < 3; ++j) {
      const int eid = mesh.triangles[elem].e[j];
      const Edge& edge = mesh.edges[eid];
      const double he = edge.length;
      const Point2 n2 = mesh.outward_normal(eid, elem);
      const Eigen::Vector2d n(n2.x, n2.y);
      const Point2 a = mesh.vertices[edge.v[0]];
      const Point2 b = mesh.vertices[edge.v[1]];
      for (int q = 0; q < edge_rule.size(); ++q) {
        const double t = edge_rule.points[q];
        const double x = 0.5 * (a.x + b.x) + 0.5 * t * (b.x - a.x);
        const double y = 0.5 * (a.y + b.y) + 0.5 * t * (b.y - a.y);
        const Eigen::Vector2d ref = to_reference(geo, x, y);
        const double w = edge_rule.weights[q] * 0.5 * he;
        const Eigen::VectorXd vals = geo.scale * bases.velocity.values(ref[0], ref[1]);
        const Eigen::VectorXd dn =
            (geo.scale * bases.velocity.gradients(ref[0], ref[1]) * geo.Binv) * n;
        const Eigen::VectorXd mu = std::sqrt(2.0 / he) * bases.facet.values(t);
        const Eigen::Vector2d du_dn = exact.velocity_gradient(x, y) * n;
        const double p = exact.pressure(x, y);
        // The jump uhat - u vanishes identically when both are the exact
        // trace, so the stabilization and the second consistency term drop
        // out; what remains couples the exact normal stress to the tests.
        for (int c = 0; c < 2; ++c) {
          r_u.segment(c * nb, nb) += w * (-du_dn[c] * vals + p * n[c] * vals);
          facet_residual[eid].segment(c * nf, nf) +=
              w * (du_dn[c] * mu - p * n[c] * mu);
        }
      }
    }
    res.momentum = std::max(res.momentum, r_u.cwiseAbs().maxCoeff());
    res.divergence = std::max(res.divergence, r_p.cwiseAbs().maxCoeff());
  }

  for (int e = 0; e < mesh.num_edges(); ++e)
    if (!mesh.edges[e].boundary)
      res.momentum = std::max(res.momentum, facet_residual[e].cwiseAbs().maxCoeff());
  return res;
}

struct SmoothField {
  VectorField value;
  ScalarField divergence;
  int degree = 0;  // polynomial degree, used to pick exact quadrature
};

// Defect of the commuting-projection property: projecting a smooth field into
// the discrete velocity pair and applying the discrete divergence operator
// must reproduce the moments of the true divergence.  Returns the largest
// defect over all pressure test functions.
inline double fortin_defect(const SmoothField& v, const Mesh& mesh, const SpaceSpec& spec) {
  const ElementBases bases(spec);
  const int vol_exact = std::max(2 * (spec.k + 1), v.degree + spec.k + 1);
  const int edge_points = spec.k + 2 + (v.degree + 1) / 2;

  std::vector<Eigen::VectorXd> vhat(mesh.num_edges());
  for (int e = 0; e < mesh.num_edges(); ++e)
    vhat[e] = project_facet(mesh, e, spec, bases, v.value, edge_points);

  const TriQuadRule div_rule = tri_quadrature(std::max(v.degree - 1 + spec.k, 0));
  double defect = 0.0;
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const LocalForms lf = local_forms(mesh, elem, spec, bases);
    const Eigen::VectorXd pv = project_velocity(mesh, elem, spec, bases, v.value, vol_exact);
    Eigen::VectorXd r = lf.B_u * pv;
    for (int j = 0; j < 3; ++j) r += lf.B_h[j] * vhat[mesh.triangles[elem].e[j]];

    const ElementGeometry geo = element_geometry(mesh, elem);
    for (int q = 0; q < div_rule.size(); ++q) {
      const double xi = div_rule.points[q].x, eta = div_rule.points[q].y;
      const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
      const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
      const double w = div_rule.weights[q] * geo.detB;
      r += w * v.divergence(x, y) * (geo.scale * bases.pressure.values(xi, eta));
    }
    defect = std::max(defect, r.cwiseAbs().maxCoeff());
  }
  return defect;
}

}  // namespace rshdg
