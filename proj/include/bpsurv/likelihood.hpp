#pragma once

#include <vector>

#include "bpsurv/bernstein.hpp"
#include "bpsurv/types.hpp"

namespace bpsurv {

// Log-likelihood evaluator for one model class over a fixed dataset/basis.
// The PH and PO baselines depend on time only through fixed basis values, so
// those are precomputed once; the AFT baseline is re-evaluated at the
// rescaled times on every call.
//
// Per-observation terms are filled in parallel and reduced with a fixed-shape
// pairwise sum, so values are bit-stable across thread counts. -inf is a
// valid result (an event with zero density) and is passed through to callers
// rather than thrown.
class LikelihoodContext {
 public:
  LikelihoodContext(ModelKind model, VectorXd times, std::vector<int> status,
                    MatrixXd design, BernsteinBasis basis);

  static LikelihoodContext for_dataset(ModelKind model,
                                       const SurvivalDataset& data,
                                       const BernsteinBasis& basis);

  double loglik(const ParameterVector& params) const;

  // Per-observation log-likelihood contributions (sums to loglik).
  VectorXd pointwise_loglik(const ParameterVector& params) const;

  // Gradient with respect to (beta, log_bp). Requires a finite loglik.
  VectorXd grad(const ParameterVector& params) const;

  ModelKind model() const { return model_; }
  const BernsteinBasis& basis() const { return basis_; }
  Eigen::Index n() const { return times_.size(); }
  Eigen::Index p() const { return design_.cols(); }
  int events() const;

 private:
  double obs_loglik(Eigen::Index i, const VectorXd& gamma, double eta) const;
  void obs_grad(Eigen::Index i, const VectorXd& gamma, double eta,
                double* out) const;

  ModelKind model_;
  VectorXd times_;
  std::vector<int> status_;
  MatrixXd design_;
  BernsteinBasis basis_;
  MatrixXd gmat_;  // n x m, PH/PO only
  MatrixXd Gmat_;  // n x m, PH/PO only
};

double loglik_ph(const ParameterVector& params, const SurvivalDataset& data,
                 const BernsteinBasis& basis);
double loglik_po(const ParameterVector& params, const SurvivalDataset& data,
                 const BernsteinBasis& basis);
double loglik_aft(const ParameterVector& params, const SurvivalDataset& data,
                  const BernsteinBasis& basis);
VectorXd grad(ModelKind model, const ParameterVector& params,
              const SurvivalDataset& data, const BernsteinBasis& basis);

// Parametric accelerated-failure-time reference likelihoods.
double loglik_waft(const ParametricParams& params, const SurvivalDataset& data);
double loglik_llaft(const ParametricParams& params,
                    const SurvivalDataset& data);

enum class ParametricFamily { WAFT, LLAFT };

// Log-likelihood and gradient in the unconstrained coordinates
// x = (log scale, log shape, beta); used by the parametric fitter.
double parametric_loglik_grad(ParametricFamily family, const VectorXd& x,
                              const SurvivalDataset& data, VectorXd* grad_out);

namespace ref {
// Straight-line serial evaluation, kept as the reference the parallel
// kernels are tested against.
double loglik(ModelKind model, const ParameterVector& params,
              const VectorXd& times, const std::vector<int>& status,
              const MatrixXd& design, const BernsteinBasis& basis);
}  // namespace ref

}  // namespace bpsurv
