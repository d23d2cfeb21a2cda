#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpsurv/likelihood.hpp"
#include "bpsurv/optim.hpp"
#include "bpsurv/types.hpp"

namespace bpsurv {

struct MlOptions {
  QuasiNewton algorithm = QuasiNewton::LBFGS;
  int restarts = 4;
  int max_iter = 500;
  double grad_tol = 1e-7;
  std::uint64_t seed = 1234;
  bool standardize = true;
};

struct MlFit {
  ModelKind model = ModelKind::PH;
  BernsteinBasis basis;
  StandardizationParams standardization;
  std::vector<std::string> column_names;
  Eigen::Index n = 0;
  int events = 0;

  ParameterVector params_std;  // (beta*, log gamma*) on the scaled design
  ParameterVector params_nat;  // natural scale
  MatrixXd cov_std;            // covariance of (beta*, gamma*)
  MatrixXd cov_nat;            // covariance of (beta, gamma)
  double loglik = 0.0;
  double loglik_null = 0.0;
  bool converged = false;
  bool hessian_finite = false;
  int selected_restart = -1;
};

int default_degree(Eigen::Index n);

MlFit fit_ml(ModelKind model, const SurvivalDataset& data,
             std::optional<int> degree = std::nullopt,
             const MlOptions& options = {});

ParameterVector recover_estimates(const ParameterVector& params_std,
                                  const StandardizationParams& standardization,
                                  ModelKind model);

// Observed information (negated Hessian) in the optimization coordinates
// (beta*, log gamma*), by central differences of the analytic gradient.
MatrixXd observed_information(ModelKind model, const ParameterVector& params,
                              const SurvivalDataset& data,
                              const BernsteinBasis& basis);
MatrixXd observed_information(const LikelihoodContext& ctx,
                              const ParameterVector& params);

// Partitioned inverse with a p x p leading block.
MatrixXd blockwise_inverse(const MatrixXd& mat, Eigen::Index p);

// Covariance of the back-transformed parameters, from the covariance of
// (beta*, gamma*) and the analytic Jacobian of the back-transform.
MatrixXd delta_method_cov(const MatrixXd& cov_std,
                          const ParameterVector& params_std,
                          const StandardizationParams& standardization,
                          ModelKind model);

struct TestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

TestResult wald_test(const MlFit& fit);
TestResult lr_test(const MlFit& fit);

struct CoefInterval {
  std::string name;
  double coef = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};

std::vector<CoefInterval> confidence_intervals(const MlFit& fit,
                                               double level = 0.95);

// Parametric accelerated-failure-time fit used as the generator-model
// reference in simulation studies.
struct ParametricFit {
  ParametricParams params;
  VectorXd se_beta;
  MatrixXd cov;  // over (log scale, log shape, beta)
  double loglik = 0.0;
  bool converged = false;
  bool hessian_finite = false;
};

ParametricFit fit_parametric(ParametricFamily family,
                             const SurvivalDataset& data,
                             const MlOptions& options = {});

}  // namespace bpsurv
