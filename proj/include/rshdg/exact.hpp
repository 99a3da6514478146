#pragma once

// Manufactured Stokes solutions used by the experiments and the test suite.
// Each bundle carries the velocity with derivatives up to second order, the
// pressure with its gradient, and the matching body force f = -laplace(u) +
// grad(p).  All velocities are divergence free and all pressures have zero
// mean over the unit square.

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

namespace rshdg {

struct ExactSolution {
  // velocity(x, y) and its derivatives; gradient(c, d) = d u_c / d x_d,
  // hessian[c] is the 2x2 second-derivative matrix of component c.
  std::function<Eigen::Vector2d(double, double)> velocity;
  std::function<Eigen::Matrix2d(double, double)> velocity_gradient;
  std::function<std::array<Eigen::Matrix2d, 2>(double, double)> velocity_hessian;
  std::function<double(double, double)> pressure;
  std::function<Eigen::Vector2d(double, double)> body_force;
  bool polynomial = false;
  int degree = -1;  // max of velocity and pressure degree when polynomial
};

// Trigonometric benchmark: velocity is the curl of the stream function
// psi = sin^2(pi x) sin^2(pi y), so u vanishes on the boundary of the unit
// square, and p = 4 pi sin(2 pi x) sin(2 pi y).
inline ExactSolution exact_trig() {
  ExactSolution s;
  s.velocity = [](double x, double y) {
    const double s2x = std::sin(2.0 * M_PI * x), c2x = std::cos(2.0 * M_PI * x);
    const double s2y = std::sin(2.0 * M_PI * y), c2y = std::cos(2.0 * M_PI * y);
    return Eigen::Vector2d(0.5 * M_PI * (1.0 - c2x) * s2y,
                           -0.5 * M_PI * s2x * (1.0 - c2y));
  };
  s.velocity_gradient = [](double x, double y) {
    const double p2 = M_PI * M_PI;
    const double s2x = std::sin(2.0 * M_PI * x), c2x = std::cos(2.0 * M_PI * x);
    const double s2y = std::sin(2.0 * M_PI * y), c2y = std::cos(2.0 * M_PI * y);
    Eigen::Matrix2d g;
    g(0, 0) = p2 * s2x * s2y;
    g(0, 1) = p2 * (1.0 - c2x) * c2y;
    g(1, 0) = -p2 * c2x * (1.0 - c2y);
    g(1, 1) = -p2 * s2x * s2y;
    return g;
  };
  s.velocity_hessian = [](double x, double y) {
    const double p3 = 2.0 * M_PI * M_PI * M_PI;
    const double s2x = std::sin(2.0 * M_PI * x), c2x = std::cos(2.0 * M_PI * x);
    const double s2y = std::sin(2.0 * M_PI * y), c2y = std::cos(2.0 * M_PI * y);
    Eigen::Matrix2d h0, h1;
    h0(0, 0) = p3 * c2x * s2y;
    h0(0, 1) = h0(1, 0) = p3 * s2x * c2y;
    h0(1, 1) = -p3 * (1.0 - c2x) * s2y;
    h1(0, 0) = p3 * s2x * (1.0 - c2y);
    h1(0, 1) = h1(1, 0) = -p3 * c2x * s2y;
    h1(1, 1) = -p3 * s2x * c2y;
    return std::array<Eigen::Matrix2d, 2>{h0, h1};
  };
  s.pressure = [](double x, double y) {
    return 4.0 * M_PI * std::sin(2.0 * M_PI * x) * std::sin(2.0 * M_PI * y);
  };
  s.body_force = [](double x, double y) {
    const double p2 = M_PI * M_PI, p3 = 2.0 * M_PI * M_PI * M_PI;
    const double s2x = std::sin(2.0 * M_PI * x), c2x = std::cos(2.0 * M_PI * x);
    const double s2y = std::sin(2.0 * M_PI * y), c2y = std::cos(2.0 * M_PI * y);
    // -laplace(u) + grad(p)
    return Eigen::Vector2d(-p3 * s2y * (2.0 * c2x - 1.0) + 8.0 * p2 * c2x * s2y,
                           -p3 * s2x * (1.0 - 2.0 * c2y) + 8.0 * p2 * s2x * c2y);
  };
  return s;
}

// Divergence-free polynomial solutions of the lowest degrees; with the default
// spaces of index k the pair (u, p) below lies in the discrete space exactly.
inline ExactSolution exact_divfree_poly(int k) {
  ExactSolution s;
  s.polynomial = true;
  switch (k) {
    case 0:
      // u in [P_1]^2, p in P_0
      s.degree = 1;
      s.velocity = [](double x, double y) { return Eigen::Vector2d(y, x); };
      s.velocity_gradient = [](double, double) {
        Eigen::Matrix2d g;
        g << 0.0, 1.0, 1.0, 0.0;
        return g;
      };
      s.velocity_hessian = [](double, double) {
        return std::array<Eigen::Matrix2d, 2>{Eigen::Matrix2d::Zero(),
                                              Eigen::Matrix2d::Zero()};
      };
      s.pressure = [](double, double) { return 0.0; };
      s.body_force = [](double, double) { return Eigen::Vector2d(0.0, 0.0); };
      return s;
    case 1:
      // u in [P_2]^2, p in P_1
      s.degree = 2;
      s.velocity = [](double x, double y) { return Eigen::Vector2d(x * x, -2.0 * x * y); };
      s.velocity_gradient = [](double x, double y) {
        Eigen::Matrix2d g;
        g << 2.0 * x, 0.0, -2.0 * y, -2.0 * x;
        return g;
      };
      s.velocity_hessian = [](double, double) {
        Eigen::Matrix2d h0, h1;
        h0 << 2.0, 0.0, 0.0, 0.0;
        h1 << 0.0, -2.0, -2.0, 0.0;
        return std::array<Eigen::Matrix2d, 2>{h0, h1};
      };
      s.pressure = [](double x, double y) { return x + y - 1.0; };
      s.body_force = [](double, double) { return Eigen::Vector2d(-1.0, 1.0); };
      return s;
    case 2:
      // u in [P_3]^2 (curl of x^2 y^2), p in P_2
      s.degree = 3;
      s.velocity = [](double x, double y) {
        return Eigen::Vector2d(2.0 * x * x * y, -2.0 * x * y * y);
      };
      s.velocity_gradient = [](double x, double y) {
        Eigen::Matrix2d g;
        g << 4.0 * x * y, 2.0 * x * x, -2.0 * y * y, -4.0 * x * y;
        return g;
      };
      s.velocity_hessian = [](double x, double y) {
        Eigen::Matrix2d h0, h1;
        h0 << 4.0 * y, 4.0 * x, 4.0 * x, 0.0;
        h1 << 0.0, -4.0 * y, -4.0 * y, -4.0 * x;
        return std::array<Eigen::Matrix2d, 2>{h0, h1};
      };
      s.pressure = [](double x, double y) { return x * x + y * y - 2.0 / 3.0; };
      s.body_force = [](double x, double y) {
        return Eigen::Vector2d(-4.0 * y + 2.0 * x, 4.0 * x + 2.0 * y);
      };
      return s;
    default:
      throw std::invalid_argument("exact_divfree_poly: k must be 0, 1 or 2");
  }
}

// Linear velocity with a linear pressure; the simplest case with a nonzero
// body force, used by the consistency checks.
inline ExactSolution exact_linear_flow() {
  ExactSolution s;
  s.polynomial = true;
  s.degree = 1;
  s.velocity = [](double x, double y) { return Eigen::Vector2d(y, x); };
  s.velocity_gradient = [](double, double) {
    Eigen::Matrix2d g;
    g << 0.0, 1.0, 1.0, 0.0;
    return g;
  };
  s.velocity_hessian = [](double, double) {
    return std::array<Eigen::Matrix2d, 2>{Eigen::Matrix2d::Zero(),
                                          Eigen::Matrix2d::Zero()};
  };
  s.pressure = [](double x, double y) { return x + y - 1.0; };
  s.body_force = [](double, double) { return Eigen::Vector2d(1.0, 1.0); };
  return s;
}

}  // namespace rshdg
