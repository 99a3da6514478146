#pragma once

// Orthonormal polynomial bases.
//
// TriBasis: L2-orthonormal basis of P_d on the reference triangle with
// vertices (0,0), (1,0), (0,1), obtained by Cholesky orthonormalization of
// the degree-graded monomials 1, x, y, x^2, xy, y^2, ...  The monomial Gram
// matrix is known exactly (factorial formula), and a second Cholesky pass
// removes the residual non-orthogonality of the first, giving Gram identity
// errors at rounding level.
//
// EdgeBasis: orthonormal basis of P_d on [-1, 1], i.e. Legendre polynomials
// scaled by sqrt((2i+1)/2).

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "rshdg/quadrature.hpp"

namespace rshdg {

inline constexpr int kMaxBasisDegree = 3;

namespace detail {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
inline double monomial_integral(int a, int b) {
  double value = 1.0;
  // a! b! / (a+b+2)! = prod_{i=1..b} i/(a+i) / ((a+b+1)(a+b+2))
  for (int i = 1; i <= b; ++i) value *= static_cast<double>(i) / (a + i);
  return value / (static_cast<double>(a + b + 1) * (a + b + 2));
}

}  // namespace detail

class TriBasis {
 public:
  explicit TriBasis(int degree) : degree_(degree) {
    if (degree < 0 || degree > kMaxBasisDegree)
      throw std::invalid_argument("TriBasis: degree out of range");
    for (int d = 0; d <= degree; ++d)
      for (int ax = d; ax >= 0; --ax) exps_.push_back({ax, d - ax});

    const int n = size();
    Eigen::MatrixXd gram(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        gram(i, j) = detail::monomial_integral(exps_[i][0] + exps_[j][0],
                                               exps_[i][1] + exps_[j][1]);

    // C maps monomials to an orthonormal set; iterate the Cholesky correction
    // once to push the Gram residual down to rounding level.
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(n, n);
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::MatrixXd g = c.transpose() * gram * c;
      const Eigen::LLT<Eigen::MatrixXd> llt(g);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("TriBasis: Gram matrix not positive definite");
      c = llt.matrixU().solve<Eigen::OnTheRight>(c);
    }
    coeff_ = c;
  }

  int degree() const { return degree_; }
  int size() const { return (degree_ + 1) * (degree_ + 2) / 2; }

  // Values of all basis functions at a reference point.
  Eigen::VectorXd values(double x, double y) const {
    return coeff_.transpose() * monomials(x, y, 0, 0);
  }

  // Reference gradients; column c holds d/dx (c = 0) or d/dy (c = 1).
  Eigen::MatrixXd gradients(double x, double y) const {
    Eigen::MatrixXd g(size(), 2);
    g.col(0) = coeff_.transpose() * monomials(x, y, 1, 0);
    g.col(1) = coeff_.transpose() * monomials(x, y, 0, 1);
    return g;
  }

  // Reference second derivatives; columns are (dxx, dxy, dyy).
  Eigen::MatrixXd hessians(double x, double y) const {
    Eigen::MatrixXd h(size(), 3);
    h.col(0) = coeff_.transpose() * monomials(x, y, 2, 0);
    h.col(1) = coeff_.transpose() * monomials(x, y, 1, 1);
    h.col(2) = coeff_.transpose() * monomials(x, y, 0, 2);
    return h;
  }

 private:
  // Monomial column with mixed derivative orders (dx, dy) applied.
  Eigen::VectorXd monomials(double x, double y, int dx, int dy) const {
    Eigen::VectorXd v(size());
    for (int i = 0; i < size(); ++i) {
      const int ax = exps_[i][0], ay = exps_[i][1];
      if (ax < dx || ay < dy) {
        v[i] = 0.0;
        continue;
      }
      double c = 1.0;
      for (int k = 0; k < dx; ++k) c *= ax - k;
      for (int k = 0; k < dy; ++k) c *= ay - k;
      v[i] = c * std::pow(x, ax - dx) * std::pow(y, ay - dy);
    }
    return v;
  }

  int degree_;
  std::vector<std::array<int, 2>> exps_;
  Eigen::MatrixXd coeff_;  // coeff_(m, i): monomial m weight in basis function i
};

class EdgeBasis {
 public:
  explicit EdgeBasis(int degree) : degree_(degree) {
    if (degree < 0 || degree > kMaxBasisDegree)
      throw std::invalid_argument("EdgeBasis: degree out of range");
  }

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }

  Eigen::VectorXd values(double t) const {
    Eigen::VectorXd v(size());
    double p0 = 1.0, p1 = t;
    for (int i = 0; i <= degree_; ++i) {
      double p;
      if (i == 0)
        p = 1.0;
      else if (i == 1)
        p = t;
      else {
        p = ((2.0 * i - 1.0) * t * p1 - (i - 1.0) * p0) / i;
        p0 = p1;
        p1 = p;
      }
      v[i] = std::sqrt((2.0 * i + 1.0) / 2.0) * p;
    }
    return v;
  }

 private:
  int degree_;
};

// Coefficients of the L2 projection onto P_degree of a function sampled at the
// nodes of `rule`, in the orthonormal Legendre basis.  The rule must integrate
// the product of the sampled polynomial and the basis exactly, which for a
// degree (degree+1) integrand requires exactness >= 2*degree + 2.
inline Eigen::VectorXd edge_trace_projection(int degree,
                                             const std::vector<double>& samples,
                                             const EdgeQuadRule& rule) {
  if (static_cast<int>(samples.size()) != rule.size())
    throw std::invalid_argument("edge_trace_projection: sample/rule size mismatch");
  if (rule.exactness < 2 * degree + 2)
    throw std::invalid_argument("edge_trace_projection: rule exactness too low");
  const EdgeBasis basis(degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(degree + 1);
  for (int q = 0; q < rule.size(); ++q)
    c += rule.weights[q] * samples[q] * basis.values(rule.points[q]);
  return c;
}

}  // namespace rshdg
