#include "bpsurv/optim.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace bpsurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Eval {
  double f = kInf;
  double dphi = 0.0;  // directional derivative g'd
};

// Strong Wolfe line search (bracket + zoom, bisection/quadratic steps).
// Returns the accepted step and updates x/f/g in place; 0 on failure.
double line_search(const Objective& fn, const VectorXd& x0, double f0,
                   const VectorXd& g0, const VectorXd& d, VectorXd* x,
                   double* f, VectorXd* g, double c1, double c2) {
  const double dphi0 = g0.dot(d);
  if (!(dphi0 < 0.0)) return 0.0;

  VectorXd gtrial(x0.size());
  const auto eval = [&](double alpha) -> Eval {
    *x = x0 + alpha * d;
    const double fa = fn(*x, &gtrial);
    if (!std::isfinite(fa)) return {kInf, 0.0};
    return {fa, gtrial.dot(d)};
  };

  const auto zoom = [&](double lo, double flo, double dlo, double hi,
                        double fhi) -> double {
    for (int it = 0; it < 60; ++it) {
      // Quadratic interpolation using (lo, flo, dlo) and fhi, guarded to the
      // middle 80% of the interval.
      double alpha;
      const double denom = 2.0 * (fhi - flo - dlo * (hi - lo));
      if (std::isfinite(fhi) && std::fabs(denom) > 1e-300) {
        alpha = lo - dlo * (hi - lo) * (hi - lo) / denom;
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        const double w = b - a;
        if (!(alpha > a + 0.1 * w && alpha < b - 0.1 * w))
          alpha = 0.5 * (lo + hi);
      } else {
        alpha = 0.5 * (lo + hi);
      }
      const Eval e = eval(alpha);
      if (!std::isfinite(e.f) || e.f > f0 + c1 * alpha * dphi0 ||
          e.f >= flo) {
        hi = alpha;
        fhi = e.f;
      } else {
        if (std::fabs(e.dphi) <= -c2 * dphi0) {
          *f = e.f;
          *g = gtrial;
          return alpha;
        }
        if (e.dphi * (hi - lo) >= 0.0) {
          hi = lo;
          fhi = flo;
        }
        lo = alpha;
        flo = e.f;
        dlo = e.dphi;
      }
      if (std::fabs(hi - lo) < 1e-16 * (1.0 + std::fabs(lo))) break;
    }
    // Fall back to the best sufficient-decrease point seen.
    const Eval e = eval(lo);
    if (std::isfinite(e.f) && e.f < f0) {
      *f = e.f;
      *g = gtrial;
      return lo;
    }
    return 0.0;
  };

  double prev_alpha = 0.0, prev_f = f0, prev_dphi = dphi0;
  double alpha = 1.0;
  for (int it = 0; it < 50; ++it) {
    const Eval e = eval(alpha);
    if (!std::isfinite(e.f)) {
      // Infeasible region: bracket between the last good point and here.
      return zoom(prev_alpha, prev_f, prev_dphi, alpha, kInf);
    }
    if (e.f > f0 + c1 * alpha * dphi0 || (it > 0 && e.f >= prev_f))
      return zoom(prev_alpha, prev_f, prev_dphi, alpha, e.f);
    if (std::fabs(e.dphi) <= -c2 * dphi0) {
      *f = e.f;
      *g = gtrial;
      return alpha;
    }
    if (e.dphi >= 0.0) return zoom(alpha, e.f, e.dphi, prev_alpha, prev_f);
    prev_alpha = alpha;
    prev_f = e.f;
    prev_dphi = e.dphi;
    alpha *= 2.0;
    if (alpha > 1e10) break;
  }
  return 0.0;
}

bool grad_converged(const VectorXd& g, double f, double tol) {
  return g.lpNorm<Eigen::Infinity>() <= tol * (1.0 + std::fabs(f));
}

}  // namespace

OptimResult minimize(const Objective& fn, const VectorXd& x0,
                     const OptimOptions& options) {
  const auto dim = x0.size();
  OptimResult res;
  res.x = x0;
  res.grad.resize(dim);
  res.f = fn(res.x, &res.grad);
  if (!std::isfinite(res.f) || !res.grad.array().isFinite().all()) {
    res.failed = true;
    return res;
  }

  const bool dense = options.algorithm == QuasiNewton::BFGS;
  MatrixXd H;  // inverse Hessian approximation (BFGS)
  if (dense) H = MatrixXd::Identity(dim, dim);
  std::deque<VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  double gamma_scale = 1.0;

  bool made_progress = false;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    if (grad_converged(res.grad, res.f, options.grad_tol)) {
      res.converged = true;
      res.iterations = iter;
      return res;
    }

    VectorXd d;
    if (dense) {
      d = -(H * res.grad);
    } else {
      // Two-loop recursion.
      d = -res.grad;
      const int k = static_cast<int>(s_hist.size());
      std::vector<double> a(k);
      for (int i = k - 1; i >= 0; --i) {
        a[i] = rho_hist[i] * s_hist[i].dot(d);
        d -= a[i] * y_hist[i];
      }
      d *= gamma_scale;
      for (int i = 0; i < k; ++i) {
        const double b = rho_hist[i] * y_hist[i].dot(d);
        d += (a[i] - b) * s_hist[i];
      }
    }
    if (!(d.dot(res.grad) < 0.0)) {
      // Reset to steepest descent if the model direction degenerated.
      d = -res.grad;
      if (dense) H = MatrixXd::Identity(dim, dim);
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      gamma_scale = 1.0;
    }

    VectorXd x_new = res.x;
    double f_new = res.f;
    VectorXd g_new = res.grad;
    const double step =
        line_search(fn, res.x, res.f, res.grad, d, &x_new, &f_new, &g_new,
                    options.wolfe_c1, options.wolfe_c2);
    if (step == 0.0) {
      res.iterations = iter;
      res.failed = !made_progress;
      return res;
    }

    const VectorXd s = x_new - res.x;
    const VectorXd y = g_new - res.grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      if (dense) {
        if (iter == 0) H *= sy / y.squaredNorm();
        const VectorXd Hy = H * y;
        const double r = 1.0 / sy;
        H += (sy + y.dot(Hy)) * r * r * (s * s.transpose()) -
             r * (Hy * s.transpose() + s * Hy.transpose());
      } else {
        s_hist.push_back(s);
        y_hist.push_back(y);
        rho_hist.push_back(1.0 / sy);
        if (static_cast<int>(s_hist.size()) > options.lbfgs_memory) {
          s_hist.pop_front();
          y_hist.pop_front();
          rho_hist.pop_front();
        }
        gamma_scale = sy / y.squaredNorm();
      }
    }

    res.x = x_new;
    res.f = f_new;
    res.grad = g_new;
    made_progress = true;
  }
  res.iterations = options.max_iter;
  res.converged = grad_converged(res.grad, res.f, options.grad_tol);
  return res;
}

}  // namespace bpsurv
