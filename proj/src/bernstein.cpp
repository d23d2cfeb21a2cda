#include "bpsurv/bernstein.hpp"

#include <cmath>

#include "bpsurv/special.hpp"

namespace bpsurv {

BernsteinBasis::BernsteinBasis(int m, double tau_) : degree(m), tau(tau_) {
  if (m < 1) fail(ErrorCode::OutOfRange, "degree must be >= 1");
  if (!(tau_ > 0.0)) fail(ErrorCode::OutOfRange, "tau must be positive");
}

double BernsteinBasis::basis(int k, int m, double x) {
  if (k < 0 || k > m)
    fail(ErrorCode::OutOfRange, "basis order k outside 0..m");
  if (x < 0.0 || x > 1.0)
    fail(ErrorCode::OutOfRange, "basis argument outside [0,1]");
  if (x == 0.0) return k == 0 ? 1.0 : 0.0;
  if (x == 1.0) return k == m ? 1.0 : 0.0;
  if (m <= 30) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (m - i) / (i + 1);
    return c * std::pow(x, k) * std::pow(1.0 - x, m - k);
  }
  // Binomial coefficients overflow fast; stay in log space for high degrees.
  return std::exp(log_binom(m, k) + k * std::log(x) +
                  (m - k) * std::log1p(-x));
}

double BernsteinBasis::g(int k, double t) const {
  if (k < 1 || k > degree)
    fail(ErrorCode::OutOfRange, "g index k outside 1..m");
  if (t < 0.0) fail(ErrorCode::OutOfRange, "g argument must be >= 0");
  if (t > tau) return 0.0;
  return (degree / tau) * basis(k - 1, degree - 1, t / tau);
}

double BernsteinBasis::G(int k, double t) const {
  if (k < 1 || k > degree)
    fail(ErrorCode::OutOfRange, "G index k outside 1..m");
  if (t <= 0.0) return 0.0;
  if (t >= tau) return 1.0;
  return reg_inc_beta(t / tau, k, degree - k + 1.0);
}

double BernsteinBasis::g_deriv(int k, double t) const {
  if (k < 1 || k > degree)
    fail(ErrorCode::OutOfRange, "g index k outside 1..m");
  if (t < 0.0 || t > tau) return 0.0;
  const int m = degree;
  if (m == 1) return 0.0;
  const double x = t / tau;
  const double left = (k >= 2) ? basis(k - 2, m - 2, x) : 0.0;
  const double right = (k <= m - 1) ? basis(k - 1, m - 2, x) : 0.0;
  return m * (m - 1.0) / (tau * tau) * (left - right);
}

void BernsteinBasis::eval_g(double t, double* out) const {
  if (t < 0.0 || t > tau) {
    for (int k = 0; k < degree; ++k) out[k] = 0.0;
    return;
  }
  // Recurrence over b_{k-1,m-1}(x) avoids m incomplete-beta style calls.
  const int m = degree;
  const double x = t / tau;
  if (x == 0.0) {
    out[0] = m / tau;
    for (int k = 1; k < m; ++k) out[k] = 0.0;
    return;
  }
  if (x == 1.0) {
    for (int k = 0; k < m - 1; ++k) out[k] = 0.0;
    out[m - 1] = m / tau;
    return;
  }
  if (m <= 30) {
    double b = std::pow(1.0 - x, m - 1);  // b_{0,m-1}(x)
    out[0] = (m / tau) * b;
    for (int k = 1; k < m; ++k) {
      b *= (x / (1.0 - x)) * static_cast<double>(m - k) / k;
      out[k] = (m / tau) * b;
    }
    return;
  }
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  double lb = (m - 1) * l1x;
  const double lr = lx - l1x;
  out[0] = (m / tau) * std::exp(lb);
  for (int k = 1; k < m; ++k) {
    lb += lr + std::log(static_cast<double>(m - k) / k);
    out[k] = (m / tau) * std::exp(lb);
  }
}

void BernsteinBasis::eval_G(double t, double* out) const {
  for (int k = 1; k <= degree; ++k) out[k - 1] = G(k, t);
}

std::vector<double> bp_knot_values(const std::function<double(double)>& target,
                                   int m, double tau) {
  std::vector<double> values(m + 1);
  for (int k = 0; k <= m; ++k) {
    values[k] = target(k * tau / m);
    if (!std::isfinite(values[k]))
      fail(ErrorCode::NonFiniteTarget,
           "target is not finite at knot " + std::to_string(k));
  }
  return values;
}

double bp_approximate(const std::function<double(double)>& target, int m,
                      double tau, double t) {
  if (m < 1) fail(ErrorCode::OutOfRange, "degree must be >= 1");
  if (!(tau > 0.0)) fail(ErrorCode::OutOfRange, "tau must be positive");
  if (t < 0.0 || t > tau)
    fail(ErrorCode::OutOfRange, "evaluation point outside [0,tau]");
  const auto values = bp_knot_values(target, m, tau);
  double sum = 0.0;
  for (int k = 0; k <= m; ++k)
    sum += values[k] * BernsteinBasis::basis(k, m, t / tau);
  return sum;
}

double bp_derivative(const std::vector<double>& knot_values, int m, double tau,
                     double t) {
  if (m < 1) fail(ErrorCode::OutOfRange, "degree must be >= 1");
  if (static_cast<int>(knot_values.size()) != m + 1)
    fail(ErrorCode::DimensionMismatch, "expected m+1 knot values");
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double diff = knot_values[i + 1] - knot_values[i];
    sum += diff * BernsteinBasis::basis(i, m - 1, t / tau);
  }
  return (m / tau) * sum;
}

}  // namespace bpsurv
