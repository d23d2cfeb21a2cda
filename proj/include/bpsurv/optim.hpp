#pragma once

#include <functional>

#include "bpsurv/types.hpp"

namespace bpsurv {

// Objective callback: returns f(x) and, when grad is non-null, fills the
// gradient. Non-finite values are treated as infeasible points by the line
// search, never as errors.
using Objective = std::function<double(const VectorXd&, VectorXd*)>;

enum class QuasiNewton { BFGS, LBFGS };

struct OptimOptions {
  QuasiNewton algorithm = QuasiNewton::LBFGS;
  int max_iter = 500;
  double grad_tol = 1e-7;
  int lbfgs_memory = 10;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
};

struct OptimResult {
  VectorXd x;
  double f = 0.0;
  VectorXd grad;
  bool converged = false;
  int iterations = 0;
  bool failed = false;  // no finite descent found at all
};

OptimResult minimize(const Objective& fn, const VectorXd& x0,
                     const OptimOptions& options);

}  // namespace bpsurv
