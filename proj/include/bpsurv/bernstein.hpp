#pragma once

#include <functional>
#include <vector>

#include "bpsurv/types.hpp"

namespace bpsurv {

// Bernstein basis of a fixed degree on [0, tau]. Values are pure functions of
// the inputs; instances are immutable and freely shareable.
struct BernsteinBasis {
  int degree = 1;
  double tau = 1.0;

  BernsteinBasis() = default;
  BernsteinBasis(int m, double tau_);

  // b_{k,m}(x) on [0, 1].
  static double basis(int k, int m, double x);

  // Scaled beta density g_k(t) = m/tau * b_{k-1,m-1}(t/tau); zero beyond tau.
  double g(int k, double t) const;

  // Integral of g_k from 0 to t: the regularized incomplete beta at t/tau,
  // clamped to [0, 1].
  double G(int k, double t) const;

  // Derivative of g_k with respect to t.
  double g_deriv(int k, double t) const;

  // Fills row-wise values g_k(t) and G_k(t), k = 1..m.
  void eval_g(double t, double* out) const;
  void eval_G(double t, double* out) const;
};

// Finite approximation of a continuous target on [0, tau]: the target is
// sampled at the m+1 equidistant knots and recombined with the basis.
double bp_approximate(const std::function<double(double)>& target, int m,
                      double tau, double t);

// Knot values for bp_approximate / bp_derivative.
std::vector<double> bp_knot_values(const std::function<double(double)>& target,
                                   int m, double tau);

// Analytic derivative of the approximation built from the given knot values.
double bp_derivative(const std::vector<double>& knot_values, int m, double tau,
                     double t);

}  // namespace bpsurv
