#pragma once

// Static condensation of the hybridized Stokes system.
//
// Per element, the velocity coefficients and the non-constant pressure modes
// only couple to quantities on that element and its edges, so they can be
// eliminated locally.  What remains globally: the interior facet unknowns,
// one mean pressure value per element, and the scalar multiplier of the
// zero-mean constraint.  The orthonormal pressure basis makes the mean/
// deviation split trivial: mode 0 is the constant, the rest are deviations.
//
// Retained unknown order: interior facet blocks (as in DofMap), then one mean
// pressure per element, then the multiplier.

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "rshdg/assemble.hpp"

namespace rshdg {

class CondensedSystem {
 public:
  explicit CondensedSystem(const GlobalSystem& sys)
      : mesh_(sys.mesh),
        spec_(sys.spec),
        dofs_(sys.mesh, sys.spec),
        boundary_uhat_(sys.boundary_uhat),
        matrix_(retained_dimension(dofs_)),
        rhs_(Eigen::VectorXd::Zero(retained_dimension(dofs_))) {
    const ElementBases bases(spec_);
    const int nb = spec_.nb_u(), np = spec_.nb_p(), nf = spec_.nf();
    const int ni = 2 * nb + (np - 1);  // interior unknowns per element
    const int n_hat = dofs_.num_interior_edges() * spec_.ndof_uhat();
    const int mult = matrix_.size() - 1;

    elements_.resize(mesh_.num_triangles());
    for (int elem = 0; elem < mesh_.num_triangles(); ++elem) {
      const LocalForms lf = local_forms(mesh_, elem, spec_, bases);
      ElementData& ed = elements_[elem];

      // Retained columns touched by this element: facet blocks of its
      // interior edges followed by its own mean pressure.
      for (int j = 0; j < 3; ++j) {
        const int eid = mesh_.triangles[elem].e[j];
        if (dofs_.interior_index(eid) != -1) {
          const int base = dofs_.interior_index(eid) * spec_.ndof_uhat();
          for (int r = 0; r < 2 * nf; ++r) ed.retained.push_back(base + r);
        }
      }
      const int mean_row = n_hat + elem;
      ed.retained.push_back(mean_row);
      const int nr = static_cast<int>(ed.retained.size());

      // Interior block: velocity + pressure deviations.
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(ni, ni);
      L.topLeftCorner(2 * nb, 2 * nb) = lf.A_uu;
      if (np > 1) {
        const Eigen::MatrixXd Bdev = lf.B_u.bottomRows(np - 1);
        L.bottomLeftCorner(np - 1, 2 * nb) = Bdev;
        L.topRightCorner(2 * nb, np - 1) = Bdev.transpose();
      }

      // Coupling of interior unknowns to retained ones.
      Eigen::MatrixXd C = Eigen::MatrixXd::Zero(ni, nr);
      int col = 0;
      for (int j = 0; j < 3; ++j) {
        const int eid = mesh_.triangles[elem].e[j];
        if (dofs_.interior_index(eid) == -1) continue;
        C.block(0, col, 2 * nb, 2 * nf) = lf.A_hu[j].transpose();
        if (np > 1)
          C.block(2 * nb, col, np - 1, 2 * nf) = lf.B_h[j].bottomRows(np - 1);
        col += 2 * nf;
      }
      C.block(0, nr - 1, 2 * nb, 1) = lf.B_u.row(0).transpose();

      // Interior right-hand side: load plus boundary-data lift.
      Eigen::VectorXd rhs_int = Eigen::VectorXd::Zero(ni);
      rhs_int.head(2 * nb) = sys.load[elem];
      for (int j = 0; j < 3; ++j) {
        const int eid = mesh_.triangles[elem].e[j];
        if (dofs_.interior_index(eid) != -1) continue;
        const Eigen::VectorXd& ghat = boundary_uhat_[eid];
        rhs_int.head(2 * nb) -= lf.A_hu[j].transpose() * ghat;
        if (np > 1) rhs_int.tail(np - 1) -= (lf.B_h[j] * ghat).tail(np - 1);
        rhs_[mean_row] -= (lf.B_h[j] * ghat)[0];
      }

      // Direct retained-retained couplings that bypass the interior block.
      col = 0;
      for (int j = 0; j < 3; ++j) {
        const int eid = mesh_.triangles[elem].e[j];
        if (dofs_.interior_index(eid) == -1) continue;
        for (int r = 0; r < 2 * nf; ++r) {
          for (int s = 0; s < 2 * nf; ++s)
            matrix_.add(ed.retained[col + r], ed.retained[col + s], lf.A_hh[j](r, s));
          matrix_.add(mean_row, ed.retained[col + r], lf.B_h[j](0, r));
          matrix_.add(ed.retained[col + r], mean_row, lf.B_h[j](0, r));
        }
        col += 2 * nf;
      }
      const double root_area = std::sqrt(mesh_.area(elem));
      matrix_.add(mean_row, mult, root_area);
      matrix_.add(mult, mean_row, root_area);

      ed.lu = std::make_unique<Eigen::FullPivLU<Eigen::MatrixXd>>(L);
      if (!ed.lu->isInvertible())
        throw std::runtime_error("CondensedSystem: interior block of element " +
                                 std::to_string(elem) + " is singular");
      ed.coupling = C;
      ed.rhs_int = rhs_int;

      // Schur complement update: subtract C^T L^{-1} C from the retained
      // block and C^T L^{-1} f from the retained right-hand side.
      const Eigen::MatrixXd LinvC = ed.lu->solve(C);
      const Eigen::MatrixXd schur = C.transpose() * LinvC;
      const Eigen::VectorXd lift = C.transpose() * ed.lu->solve(rhs_int);
      for (int r = 0; r < nr; ++r) {
        rhs_[ed.retained[r]] -= lift[r];
        for (int s = 0; s < nr; ++s)
          matrix_.add(ed.retained[r], ed.retained[s], -schur(r, s));
      }
    }
    matrix_.compress();
  }

  static int retained_dimension(const DofMap& dofs) {
    return dofs.n_uhat() + dofs.num_elements() + 1;
  }

  int dimension() const { return matrix_.size(); }
  const SparseMatrix& matrix() const { return matrix_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  // Solves the retained system and recovers the element interiors.
  HdgSolution solve(SolveReport* report = nullptr,
                    Ordering ordering = Ordering::fill_reducing) const {
    const SparseFactorization fac(matrix_, ordering);
    const Eigen::VectorXd y = fac.solve(rhs_, report);

    const int nb = spec_.nb_u(), np = spec_.nb_p(), nf = spec_.nf();
    HdgSolution sol{mesh_, spec_, {}, {}, {}, y[matrix_.size() - 1]};
    sol.u.resize(mesh_.num_triangles());
    sol.p.resize(mesh_.num_triangles());
    sol.uhat.resize(mesh_.num_edges());
    for (int e = 0; e < mesh_.num_edges(); ++e) {
      if (mesh_.edges[e].boundary) {
        sol.uhat[e] = boundary_uhat_[e];
      } else {
        const int base = dofs_.interior_index(e) * spec_.ndof_uhat();
        sol.uhat[e] = y.segment(base, 2 * nf);
      }
    }
    for (int elem = 0; elem < mesh_.num_triangles(); ++elem) {
      const ElementData& ed = elements_[elem];
      Eigen::VectorXd yk(ed.retained.size());
      for (std::size_t r = 0; r < ed.retained.size(); ++r) yk[r] = y[ed.retained[r]];
      const Eigen::VectorXd x = ed.lu->solve(ed.rhs_int - ed.coupling * yk);
      sol.u[elem] = x.head(2 * nb);
      sol.p[elem] = Eigen::VectorXd(np);
      sol.p[elem][0] = yk[yk.size() - 1];
      if (np > 1) sol.p[elem].tail(np - 1) = x.tail(np - 1);
    }
    return sol;
  }

 private:
  struct ElementData {
    std::vector<int> retained;  // global retained indices touched by the element
    std::unique_ptr<Eigen::FullPivLU<Eigen::MatrixXd>> lu;
    Eigen::MatrixXd coupling;
    Eigen::VectorXd rhs_int;
  };

  Mesh mesh_;
  SpaceSpec spec_;
  DofMap dofs_;
  std::vector<Eigen::VectorXd> boundary_uhat_;
  SparseMatrix matrix_;
  Eigen::VectorXd rhs_;
  std::vector<ElementData> elements_;
};

inline CondensedSystem condense(const GlobalSystem& sys) { return CondensedSystem(sys); }

}  // namespace rshdg
