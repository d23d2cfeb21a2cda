#pragma once

#include <vector>

#include "bpsurv/bayes.hpp"
#include "bpsurv/mle.hpp"
#include "bpsurv/types.hpp"

namespace bpsurv {

// Left-continuous step function: value at t is the value of the greatest
// knot <= t, `init` before the first knot.
struct StepFunction {
  std::vector<double> knots;   // strictly increasing
  std::vector<double> values;  // value from knots[i] onward
  double init = 1.0;

  double operator()(double t) const;
};

// Survival probability for one covariate profile at one time under natural
// scale parameters. Times beyond tau evaluate at tau (improper tail).
double survival_at(ModelKind model, const ParameterVector& params_nat,
                   const BernsteinBasis& basis, const VectorXd& profile,
                   double t);

// Fitted cumulative hazard at (t | profile), natural scale.
double cumhaz_at(ModelKind model, const ParameterVector& params_nat,
                 const BernsteinBasis& basis, const VectorXd& profile,
                 double t);

struct SurvivorCurves {
  std::vector<double> times;
  MatrixXd survival;          // times x profiles
  MatrixXd hpd_lower;         // same shape; Bayes only, else empty
  MatrixXd hpd_upper;
  bool improper_tail = false;  // some time exceeded tau
};

SurvivorCurves survivor(const MlFit& fit, const MatrixXd& newdata,
                        const std::vector<double>& times);
SurvivorCurves survivor(const Chains& chains, const MatrixXd& newdata,
                        const std::vector<double>& times, bool hpd_band = true,
                        double prob = 0.95);

StepFunction kaplan_meier(const SurvivalDataset& data);
StepFunction nelson_aalen(const SurvivalDataset& data);

struct Residuals {
  std::vector<double> values;  // fitted cumulative hazard at each response
  std::vector<int> status;
};

Residuals cox_snell_residuals(ModelKind model,
                              const ParameterVector& params_nat,
                              const BernsteinBasis& basis,
                              const SurvivalDataset& data);
Residuals cox_snell_residuals(const MlFit& fit, const SurvivalDataset& data);

// Diagnostic table row: residual, status, KM of residuals at the residual,
// and exp(-residual).
struct ResidualDiagnosticRow {
  double residual = 0.0;
  int status = 0;
  double km = 1.0;
  double exp_neg = 1.0;
};

std::vector<ResidualDiagnosticRow> residual_diagnostics(const Residuals& res);

}  // namespace bpsurv
