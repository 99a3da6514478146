#pragma once

// Error measurement, convergence-order tables and the discrete inf-sup
// estimator.
//
// The energy error combines the broken H1 seminorm, the h-weighted broken H2
// seminorm and the projected-jump seminorm.  Since the exact velocity trace
// is single valued, the jump part of the error equals the jump of the
// discrete pair itself and is evaluated from coefficients, exactly.
//
// The inf-sup estimator assembles the velocity energy Gram matrix and the
// divergence coupling densely (with a hard dimension guard), restricts to the
// complement of the constant pressure mode and returns the square root of the
// smallest eigenvalue of the projected Schur complement.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rshdg/assemble.hpp"
#include "rshdg/exact.hpp"
#include "rshdg/local_forms.hpp"

namespace rshdg {

struct ErrorReport {
  double h = 0.0;
  double l2_u = 0.0;
  double h1_u = 0.0;
  double h2_weighted = 0.0;  // sum_K h_K^2 |u - u_h|_{2,K}^2, square-rooted
  double jump = 0.0;
  double energy = 0.0;       // sqrt(h1^2 + h2_weighted^2 + jump^2)
  double l2_p = 0.0;
};

inline ErrorReport compute_errors(const HdgSolution& sol, const ExactSolution& exact,
                                  int quad_boost = 4) {
  const Mesh& mesh = sol.mesh;
  const SpaceSpec& spec = sol.spec;
  const ElementBases bases(spec);
  const TriQuadRule rule = tri_quadrature(2 * (spec.k + 1) + quad_boost);

  double l2 = 0.0, h1 = 0.0, h2 = 0.0, l2p = 0.0;
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(mesh, elem);
    const double hk2 = mesh.triangles[elem].h * mesh.triangles[elem].h;
    for (int q = 0; q < rule.size(); ++q) {
      const double xi = rule.points[q].x, eta = rule.points[q].y;
      const double x = geo.v0.x + geo.B(0, 0) * xi + geo.B(0, 1) * eta;
      const double y = geo.v0.y + geo.B(1, 0) * xi + geo.B(1, 1) * eta;
      const double w = rule.weights[q] * geo.detB;

      const Eigen::Vector2d du =
          exact.velocity(x, y) - velocity_value(geo, bases.velocity, sol.u[elem], xi, eta);
      l2 += w * du.squaredNorm();

      const Eigen::Matrix2d dg = exact.velocity_gradient(x, y) -
                                 velocity_gradient(geo, bases.velocity, sol.u[elem], xi, eta);
      h1 += w * dg.squaredNorm();

      const auto hex = exact.velocity_hessian(x, y);
      const auto hdis = velocity_hessian(geo, bases.velocity, sol.u[elem], xi, eta);
      for (int c = 0; c < 2; ++c) {
        const Eigen::Matrix2d dh = hex[c] - hdis[c];
        // multi-index convention: xx, xy, yy each counted once
        h2 += w * hk2 * (dh(0, 0) * dh(0, 0) + dh(0, 1) * dh(0, 1) + dh(1, 1) * dh(1, 1));
      }

      const double dp =
          exact.pressure(x, y) - pressure_value(geo, bases.pressure, sol.p[elem], xi, eta);
      l2p += w * dp * dp;
    }
  }

  const double jump2 = jump_seminorm_sq(mesh, spec, sol.u, sol.uhat);
  ErrorReport rep;
  rep.h = mesh.h;
  rep.l2_u = std::sqrt(l2);
  rep.h1_u = std::sqrt(h1);
  rep.h2_weighted = std::sqrt(h2);
  rep.jump = std::sqrt(jump2);
  rep.energy = std::sqrt(h1 + h2 + jump2);
  rep.l2_p = std::sqrt(l2p);
  return rep;
}

enum class ErrorColumn { l2_u, h1_u, h2_weighted, jump, energy, l2_p };

inline double error_value(const ErrorReport& rep, ErrorColumn col) {
  switch (col) {
    case ErrorColumn::l2_u: return rep.l2_u;
    case ErrorColumn::h1_u: return rep.h1_u;
    case ErrorColumn::h2_weighted: return rep.h2_weighted;
    case ErrorColumn::jump: return rep.jump;
    case ErrorColumn::energy: return rep.energy;
    case ErrorColumn::l2_p: return rep.l2_p;
  }
  return 0.0;
}

// Experimental order of convergence between consecutive refinement levels.
struct EocTable {
  std::vector<ErrorReport> rows;

  // order between rows i-1 and i; i >= 1
  double order(ErrorColumn col, int i) const {
    if (i < 1 || i >= static_cast<int>(rows.size()))
      throw std::out_of_range("EocTable::order: level index out of range");
    const double e0 = error_value(rows[i - 1], col), e1 = error_value(rows[i], col);
    if (!(e0 > 0.0) || !(e1 > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log(e0 / e1) / std::log(rows[i - 1].h / rows[i].h);
  }
};

// Builds a convergence table from per-level reports, finest level last.
inline EocTable eoc(std::vector<ErrorReport> reports) {
  if (reports.size() < 2)
    throw std::invalid_argument("eoc: need at least two refinement levels");
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (!(reports[i].h < reports[i - 1].h))
      throw std::invalid_argument("eoc: mesh sizes must decrease strictly");
  return EocTable{std::move(reports)};
}

// Broken H1 seminorm of the velocity difference of two discrete solutions on
// the same mesh and space.
inline double h1_seminorm_diff(const HdgSolution& a, const HdgSolution& b) {
  if (a.u.size() != b.u.size() || a.spec.k != b.spec.k)
    throw std::invalid_argument("h1_seminorm_diff: incompatible solutions");
  std::vector<Eigen::VectorXd> diff(a.u.size());
  for (std::size_t e = 0; e < a.u.size(); ++e) diff[e] = a.u[e] - b.u[e];
  return std::sqrt(h1_seminorm_sq(a.mesh, a.spec, diff));
}

// L2 norm of the pressure difference; exact, via orthonormal coefficients.
inline double pressure_l2_diff(const HdgSolution& a, const HdgSolution& b) {
  if (a.p.size() != b.p.size() || a.spec.k != b.spec.k)
    throw std::invalid_argument("pressure_l2_diff: incompatible solutions");
  double s = 0.0;
  for (std::size_t e = 0; e < a.p.size(); ++e) s += (a.p[e] - b.p[e]).squaredNorm();
  return std::sqrt(s);
}

inline double jump_value(const HdgSolution& sol) {
  return std::sqrt(jump_seminorm_sq(sol.mesh, sol.spec, sol.u, sol.uhat));
}

class DimensionGuardError : public std::runtime_error {
 public:
  DimensionGuardError(int dimension, int guard)
      : std::runtime_error("inf-sup estimator: dense dimension " +
                           std::to_string(dimension) + " exceeds guard " +
                           std::to_string(guard)),
        dimension(dimension),
        guard(guard) {}
  int dimension, guard;
};

// Discrete inf-sup constant of the divergence coupling with respect to the
// energy norm on homogeneous velocity pairs and mean-zero pressures.
inline double infsup_estimate(const Mesh& mesh, const SpaceSpec& spec,
                              int dimension_guard = 3000) {
  const DofMap dofs(mesh, spec);
  const ElementBases bases(spec);
  const int nb = spec.nb_u(), np_loc = spec.nb_p(), nf = spec.nf();
  const int nvel = dofs.n_u() + dofs.n_uhat();
  const int np = dofs.n_p();
  if (nvel > dimension_guard) throw DimensionGuardError(nvel, dimension_guard);

  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(nvel, nvel);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(np, nvel);

  const TriQuadRule vol_rule = tri_quadrature(2 * (spec.k + 1));
  for (int elem = 0; elem < mesh.num_triangles(); ++elem) {
    const ElementGeometry geo = element_geometry(mesh, elem);
    const LocalForms lf = local_forms(mesh, elem, spec, bases);
    const double hk2 = mesh.triangles[elem].h * mesh.triangles[elem].h;
    const int u0 = dofs.u_begin(elem);
    const int p0 = elem * np_loc;

    // scalar H1 + weighted H2 Gram of the element velocity space
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nb, nb);
    for (int q = 0; q < vol_rule.size(); ++q) {
      const double xi = vol_rule.points[q].x, eta = vol_rule.points[q].y;
      const double w = vol_rule.weights[q] * geo.detB;
      const Eigen::MatrixXd grad = geo.scale * bases.velocity.gradients(xi, eta) * geo.Binv;
      gram += w * grad * grad.transpose();
      const Eigen::MatrixXd href = bases.velocity.hessians(xi, eta);
      Eigen::MatrixXd hphys(nb, 3);  // physical xx, xy, yy rows per function
      for (int i = 0; i < nb; ++i) {
        Eigen::Matrix2d hr;
        hr << href(i, 0), href(i, 1), href(i, 1), href(i, 2);
        const Eigen::Matrix2d hp = geo.scale * geo.Binv.transpose() * hr * geo.Binv;
        hphys(i, 0) = hp(0, 0);
        hphys(i, 1) = hp(0, 1);
        hphys(i, 2) = hp(1, 1);
      }
      gram += (w * hk2) * hphys * hphys.transpose();
    }
    for (int c = 0; c < 2; ++c)
      E.block(u0 + c * nb, u0 + c * nb, nb, nb) += gram;

    for (int j = 0; j < 3; ++j) {
      const int eid = mesh.triangles[elem].e[j];
      const double he = mesh.edges[eid].length;
      const Eigen::MatrixXd TT = lf.T[j].transpose() * lf.T[j] / he;
      // facet unknowns sit at their DofMap position, which already starts
      // right after the element velocity block
      const int hb = dofs.uhat_begin(eid);
      for (int c = 0; c < 2; ++c) {
        E.block(u0 + c * nb, u0 + c * nb, nb, nb) += TT;
        if (hb != -1) {
          E.block(hb + c * nf, hb + c * nf, nf, nf) +=
              Eigen::MatrixXd::Identity(nf, nf) / he;
          E.block(hb + c * nf, u0 + c * nb, nf, nb) -= lf.T[j] / he;
          E.block(u0 + c * nb, hb + c * nf, nb, nf) -= lf.T[j].transpose() / he;
        }
      }
      if (hb != -1) B.block(p0, hb, np_loc, 2 * nf) += lf.B_h[j];
    }
    B.block(p0, u0, np_loc, 2 * nb) += lf.B_u;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(E);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("inf-sup estimator: energy Gram not positive definite");
  const Eigen::MatrixXd X = llt.matrixL().solve(B.transpose());  // L^{-1} B^T
  const Eigen::MatrixXd M = X.transpose() * X;

  // complement of the constant pressure direction
  Eigen::VectorXd chat = Eigen::VectorXd::Zero(np);
  for (int elem = 0; elem < mesh.num_triangles(); ++elem)
    chat[elem * np_loc] = std::sqrt(mesh.area(elem));
  chat.normalize();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(chat);
  const Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd W = Q.rightCols(np - 1);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(W.transpose() * M * W);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("inf-sup estimator: eigensolve failed");
  const double lambda_min = eig.eigenvalues().minCoeff();
  return std::sqrt(std::max(lambda_min, 0.0));
}

}  // namespace rshdg
