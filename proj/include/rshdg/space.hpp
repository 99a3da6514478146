#pragma once

// Discrete space description and global degree-of-freedom layout.
//
// For facet index k the velocity lives in [P_{k+1}]^2 per element, the facet
// unknowns in [P_k]^2 per interior edge, and the pressure in P_k per element.
// Global unknown order: all element velocity blocks, then all interior-edge
// facet blocks, then all element pressure blocks, then a single multiplier
// enforcing the zero-mean pressure constraint.

#include <stdexcept>
#include <vector>

#include "rshdg/mesh.hpp"

namespace rshdg {

struct SpaceSpec {
  int k;       // facet degree, 0..2
  double tau;  // stabilization parameter, >= 1

  SpaceSpec(int k_, double tau_) : k(k_), tau(tau_) {
    if (k < 0 || k > 2) throw std::invalid_argument("SpaceSpec: k must be 0, 1 or 2");
    if (!(tau >= 1.0)) throw std::invalid_argument("SpaceSpec: tau must be >= 1");
  }

  static double default_tau(int k) { return 10.0 * (k + 1) * (k + 1); }
  static SpaceSpec with_default_tau(int k) { return SpaceSpec(k, default_tau(k)); }

  int velocity_degree() const { return k + 1; }
  int nb_u() const { return (k + 2) * (k + 3) / 2; }  // scalar P_{k+1} dimension
  int nb_p() const { return (k + 1) * (k + 2) / 2; }  // scalar P_k dimension
  int nf() const { return k + 1; }                    // scalar facet dimension per edge
  int ndof_u() const { return 2 * nb_u(); }
  int ndof_uhat() const { return 2 * nf(); }
};

class DofMap {
 public:
  DofMap(const Mesh& mesh, const SpaceSpec& spec)
      : spec_(spec),
        num_elements_(mesh.num_triangles()),
        interior_index_(mesh.num_edges(), -1) {
    int next = 0;
    for (int e = 0; e < mesh.num_edges(); ++e)
      if (!mesh.edges[e].boundary) interior_index_[e] = next++;
    num_interior_edges_ = next;
    u_offset_ = 0;
    uhat_offset_ = num_elements_ * spec_.ndof_u();
    p_offset_ = uhat_offset_ + num_interior_edges_ * spec_.ndof_uhat();
    multiplier_ = p_offset_ + num_elements_ * spec_.nb_p();
  }

  const SpaceSpec& spec() const { return spec_; }
  int num_elements() const { return num_elements_; }
  int num_interior_edges() const { return num_interior_edges_; }

  int n_u() const { return uhat_offset_; }
  int n_uhat() const { return p_offset_ - uhat_offset_; }
  int n_p() const { return multiplier_ - p_offset_; }
  int dimension() const { return multiplier_ + 1; }

  int u_begin(int elem) const { return u_offset_ + elem * spec_.ndof_u(); }
  int p_begin(int elem) const { return p_offset_ + elem * spec_.nb_p(); }
  int multiplier() const { return multiplier_; }

  // -1 for boundary edges, which carry data rather than unknowns.
  int interior_index(int edge) const { return interior_index_[edge]; }
  int uhat_begin(int edge) const {
    const int i = interior_index_[edge];
    return (i == -1) ? -1 : uhat_offset_ + i * spec_.ndof_uhat();
  }

 private:
  SpaceSpec spec_;
  int num_elements_;
  int num_interior_edges_ = 0;
  std::vector<int> interior_index_;
  int u_offset_ = 0, uhat_offset_ = 0, p_offset_ = 0, multiplier_ = 0;
};

}  // namespace rshdg
