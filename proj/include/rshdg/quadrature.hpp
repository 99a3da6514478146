#pragma once

// Quadrature on the reference triangle {x, y >= 0, x + y <= 1} and on the
// reference segment [-1, 1].
//
// Triangle rules come from a collapsed tensor product (Duffy transform) of
// Gauss-Legendre rules, with the Jacobi factor folded into the weights, so all
// weights stay positive.  Segment rules are classical Gauss-Legendre, built by
// Newton iteration on the Legendre polynomial and mirrored for exact symmetry.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rshdg {

inline constexpr int kMaxQuadDegree = 20;
inline constexpr int kMaxGaussPoints = 20;

struct EdgeQuadRule {
  std::vector<double> points;   // ascending in [-1, 1]
  std::vector<double> weights;  // sum to 2
  int exactness = 0;            // polynomials up to this degree are exact

  int size() const { return static_cast<int>(points.size()); }
};

inline EdgeQuadRule gauss_legendre(int npoints) {
  if (npoints < 1 || npoints > kMaxGaussPoints)
    throw std::invalid_argument("gauss_legendre: point count out of range");

  EdgeQuadRule rule;
  rule.points.resize(npoints);
  rule.weights.resize(npoints);
  rule.exactness = 2 * npoints - 1;

  const int n = npoints;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev-type initial guess for the i-th largest root.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for P_n(x) and P_n'(x).
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
    rule.points[i] = -x;
    rule.weights[i] = w;
  }
  if (n % 2 == 1) {
    rule.points[n / 2] = 0.0;  // enforce the exact midpoint for odd counts
  }
  return rule;
}

struct TriQuadRule {
  struct Node {
    double x = 0.0;  // reference coordinates, barycentric l1 = x, l2 = y
    double y = 0.0;
  };
  std::vector<Node> points;
  std::vector<double> weights;  // positive, sum to 1/2
  int exactness = 0;

  int size() const { return static_cast<int>(points.size()); }
};

// Rule exact for all bivariate polynomials of total degree <= degree.
inline TriQuadRule tri_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadDegree)
    throw std::invalid_argument("tri_quadrature: degree out of range");

  // Duffy map x = u(1-v), y = v with u, v in [0, 1]; the Jacobian (1-v)
  // raises the polynomial degree in v by one.
  const int mu = (degree + 2) / 2;      // ceil((degree+1)/2)
  const int mv = (degree + 3) / 2;      // ceil((degree+2)/2)
  const EdgeQuadRule gu = gauss_legendre(mu);
  const EdgeQuadRule gv = gauss_legendre(mv);

  TriQuadRule rule;
  rule.exactness = std::min(2 * mu - 1, 2 * mv - 2);
  rule.points.reserve(mu * mv);
  rule.weights.reserve(mu * mv);
  for (int a = 0; a < mu; ++a) {
    const double u = 0.5 * (gu.points[a] + 1.0);
    const double wu = 0.5 * gu.weights[a];
    for (int b = 0; b < mv; ++b) {
      const double v = 0.5 * (gv.points[b] + 1.0);
      const double wv = 0.5 * gv.weights[b];
      rule.points.push_back({u * (1.0 - v), v});
      rule.weights.push_back(wu * wv * (1.0 - v));
    }
  }
  return rule;
}

}  // namespace rshdg
