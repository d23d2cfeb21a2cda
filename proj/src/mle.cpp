#include "bpsurv/mle.hpp"

#include <cmath>
#include <limits>

#include "bpsurv/data.hpp"
#include "bpsurv/parallel.hpp"
#include "bpsurv/rng.hpp"
#include "bpsurv/special.hpp"

namespace bpsurv {

namespace {

// Stream ids so the full fit, the null fit and the Bayes sampler never share
// draws for the same user seed.
constexpr std::uint64_t kStreamInit = 11;
constexpr std::uint64_t kStreamNullInit = 13;

struct RestartOutcome {
  OptimResult opt;
  bool usable = false;
};

// Runs `restarts` optimizations from distinct random starting points and
// keeps them all; selection happens after the parallel loop in index order.
std::vector<RestartOutcome> run_restarts(const LikelihoodContext& ctx,
                                         const MlOptions& options,
                                         std::uint64_t stream_tag) {
  const auto p = ctx.p();
  const int m = ctx.basis().degree;
  OptimOptions oopts;
  oopts.algorithm = options.algorithm;
  oopts.max_iter = options.max_iter;
  oopts.grad_tol = options.grad_tol;

  const Objective objective = [&ctx, p](const VectorXd& x, VectorXd* g) {
    const ParameterVector params = ParameterVector::unpack(x, p);
    const double ll = ctx.loglik(params);
    if (g) {
      if (std::isfinite(ll))
        *g = -ctx.grad(params);
      else
        g->setConstant(x.size(), std::numeric_limits<double>::quiet_NaN());
    }
    return -ll;
  };

  std::vector<RestartOutcome> outcomes(options.restarts);
  parallel_for_index(options.restarts, [&](std::size_t r) {
    try {
      RngStream rng = RngStream::from_ids(options.seed, stream_tag, r);
      VectorXd x0(p + m);
      bool found = false;
      for (int attempt = 0; attempt < 100 && !found; ++attempt) {
        for (Eigen::Index j = 0; j < p; ++j) x0[j] = rng.normal(0.0, 0.5);
        for (int k = 0; k < m; ++k) x0[p + k] = rng.normal(0.0, 1.0);
        found = std::isfinite(objective(x0, nullptr));
      }
      if (!found) return;
      outcomes[r].opt = minimize(objective, x0, oopts);
      outcomes[r].usable =
          !outcomes[r].opt.failed && std::isfinite(outcomes[r].opt.f);
    } catch (...) {
      outcomes[r].usable = false;
    }
  });
  return outcomes;
}

int select_best(const std::vector<RestartOutcome>& outcomes) {
  int best = -1;
  for (int r = 0; r < static_cast<int>(outcomes.size()); ++r) {
    if (!outcomes[r].usable) continue;
    if (best < 0 || outcomes[r].opt.f < outcomes[best].opt.f) best = r;
  }
  return best;
}

}  // namespace

int default_degree(Eigen::Index n) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
}

ParameterVector recover_estimates(const ParameterVector& params_std,
                                  const StandardizationParams& standardization,
                                  ModelKind model) {
  if (standardization.means.size() == 0) return params_std;
  ParameterVector nat;
  nat.beta =
      params_std.beta.array() / standardization.sds.array();
  const double shift =
      params_std.beta.dot((standardization.means.array() /
                           standardization.sds.array())
                              .matrix());
  const double sign = (model == ModelKind::AFT) ? 1.0 : -1.0;
  nat.log_bp = params_std.log_bp.array() + sign * shift;
  return nat;
}

MatrixXd observed_information(const LikelihoodContext& ctx,
                              const ParameterVector& params) {
  const auto p = params.p();
  const auto dim = params.size();
  const VectorXd x = params.packed();
  if (!std::isfinite(ctx.loglik(params)))
    fail(ErrorCode::NonFiniteLikelihood,
         "information requested at a non-finite point");

  MatrixXd H(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const double h = 1e-5 * (1.0 + std::fabs(x[b]));
    VectorXd xp = x, xm = x;
    xp[b] += h;
    xm[b] -= h;
    const VectorXd gp = ctx.grad(ParameterVector::unpack(xp, p));
    const VectorXd gm = ctx.grad(ParameterVector::unpack(xm, p));
    H.col(b) = (gp - gm) / (2.0 * h);
  }
  H = 0.5 * (H + H.transpose()).eval();
  if (!H.array().isFinite().all())
    fail(ErrorCode::NonFiniteHessian, "non-finite Hessian entries");
  return -H;
}

MatrixXd observed_information(ModelKind model, const ParameterVector& params,
                              const SurvivalDataset& data,
                              const BernsteinBasis& basis) {
  return observed_information(
      LikelihoodContext::for_dataset(model, data, basis), params);
}

MatrixXd blockwise_inverse(const MatrixXd& mat, Eigen::Index p) {
  const auto dim = mat.rows();
  if (mat.cols() != dim)
    fail(ErrorCode::DimensionMismatch, "matrix must be square");
  if (p < 0 || p > dim)
    fail(ErrorCode::DimensionMismatch, "block size outside matrix");

  const auto invert = [](const MatrixXd& a, const char* which) -> MatrixXd {
    Eigen::FullPivLU<MatrixXd> lu(a);
    if (!lu.isInvertible())
      fail(ErrorCode::SingularBlock,
           std::string("singular block: ") + which);
    return lu.inverse();
  };

  if (p == 0) return invert(mat, "D");
  if (p == dim) return invert(mat, "A");

  const auto q = dim - p;
  const MatrixXd A = mat.topLeftCorner(p, p);
  const MatrixXd B = mat.topRightCorner(p, q);
  const MatrixXd C = mat.bottomLeftCorner(q, p);
  const MatrixXd D = mat.bottomRightCorner(q, q);

  const MatrixXd Ainv = invert(A, "A");
  const MatrixXd Sinv = invert(D - C * Ainv * B, "Schur complement");

  MatrixXd out(dim, dim);
  out.topLeftCorner(p, p) = Ainv + Ainv * B * Sinv * C * Ainv;
  out.topRightCorner(p, q) = -Ainv * B * Sinv;
  out.bottomLeftCorner(q, p) = -Sinv * C * Ainv;
  out.bottomRightCorner(q, q) = Sinv;
  return out;
}

MatrixXd delta_method_cov(const MatrixXd& cov_std,
                          const ParameterVector& params_std,
                          const StandardizationParams& standardization,
                          ModelKind model) {
  const auto p = params_std.p();
  const auto m = params_std.m();
  const auto dim = p + m;
  if (cov_std.rows() != dim || cov_std.cols() != dim)
    fail(ErrorCode::DimensionMismatch, "covariance size disagrees");

  VectorXd means = standardization.means, sds = standardization.sds;
  if (means.size() == 0) {
    means = VectorXd::Zero(p);
    sds = VectorXd::Ones(p);
  }
  const double sign = (model == ModelKind::AFT) ? 1.0 : -1.0;
  const double shift = params_std.beta.dot(
      (means.array() / sds.array()).matrix());
  const double scale_fac = std::exp(sign * shift);
  const VectorXd gamma_nat = params_std.bp() * scale_fac;

  MatrixXd J = MatrixXd::Zero(dim, dim);
  for (Eigen::Index j = 0; j < p; ++j) J(j, j) = 1.0 / sds[j];
  for (Eigen::Index k = 0; k < m; ++k) {
    for (Eigen::Index l = 0; l < p; ++l)
      J(p + k, l) = sign * (means[l] / sds[l]) * gamma_nat[k];
    J(p + k, p + k) = scale_fac;
  }
  return J * cov_std * J.transpose();
}

MlFit fit_ml(ModelKind model, const SurvivalDataset& data,
             std::optional<int> degree, const MlOptions& options) {
  data.validate();
  if (data.n() < 1) fail(ErrorCode::EmptyData, "no observations");
  if (options.restarts < 1)
    fail(ErrorCode::InvalidConfig, "restarts must be >= 1");
  const int m = degree.value_or(default_degree(data.n()));
  if (m < 1) fail(ErrorCode::OutOfRange, "degree must be >= 1");
  const double tau = data.times.maxCoeff();
  const BernsteinBasis basis(m, tau);

  MlFit fit;
  fit.model = model;
  fit.basis = basis;
  fit.column_names = data.column_names;
  fit.n = data.n();
  fit.events = data.events();

  MatrixXd zdesign = data.design;
  if (options.standardize && data.p() > 0) {
    auto [z, params] = standardize(data.design);
    zdesign = std::move(z);
    fit.standardization = params;
  } else {
    fit.standardization.means = VectorXd::Zero(data.p());
    fit.standardization.sds = VectorXd::Ones(data.p());
  }

  const LikelihoodContext ctx(model, data.times, data.status, zdesign, basis);
  const auto outcomes = run_restarts(ctx, options, kStreamInit);
  const int best = select_best(outcomes);
  if (best < 0)
    fail(ErrorCode::AllRestartsFailed, "no restart produced a finite fit");

  fit.selected_restart = best;
  fit.converged = outcomes[best].opt.converged;
  fit.loglik = -outcomes[best].opt.f;
  fit.params_std = ParameterVector::unpack(outcomes[best].opt.x, data.p());
  fit.params_nat =
      recover_estimates(fit.params_std, fit.standardization, model);

  if (data.p() > 0) {
    const LikelihoodContext null_ctx(model, data.times, data.status,
                                     MatrixXd(data.n(), 0), basis);
    const auto null_outcomes = run_restarts(null_ctx, options, kStreamNullInit);
    const int null_best = select_best(null_outcomes);
    if (null_best < 0)
      fail(ErrorCode::AllRestartsFailed, "null-model restarts all failed");
    fit.loglik_null = -null_outcomes[null_best].opt.f;
  } else {
    fit.loglik_null = fit.loglik;
  }

  try {
    const MatrixXd info = observed_information(ctx, fit.params_std);
    const MatrixXd cov_opt = blockwise_inverse(info, data.p());
    // Move from (beta*, log gamma*) to (beta*, gamma*) coordinates.
    VectorXd scale = VectorXd::Ones(fit.params_std.size());
    scale.tail(m) = fit.params_std.bp();
    fit.cov_std = scale.asDiagonal() * cov_opt * scale.asDiagonal();
    fit.cov_nat = delta_method_cov(fit.cov_std, fit.params_std,
                                   fit.standardization, model);
    fit.hessian_finite = fit.cov_nat.array().isFinite().all();
  } catch (const Error&) {
    fit.hessian_finite = false;
  }
  return fit;
}

TestResult wald_test(const MlFit& fit) {
  const auto p = fit.params_nat.p();
  if (p == 0) return {0.0, 0, 1.0};
  if (!fit.hessian_finite)
    fail(ErrorCode::IntervalsUnavailable,
         "Wald test unavailable: non-finite Hessian");
  const MatrixXd cov_bb = fit.cov_nat.topLeftCorner(p, p);
  Eigen::FullPivLU<MatrixXd> lu(cov_bb);
  if (!lu.isInvertible())
    fail(ErrorCode::SingularBlock, "regression covariance is singular");
  const VectorXd beta = fit.params_nat.beta;
  TestResult res;
  res.statistic = beta.dot(lu.solve(beta));
  res.df = static_cast<int>(p);
  res.p_value = chisq_sf(res.statistic, res.df);
  return res;
}

TestResult lr_test(const MlFit& fit) {
  TestResult res;
  res.statistic = 2.0 * (fit.loglik - fit.loglik_null);
  res.df = static_cast<int>(fit.params_nat.p());
  res.p_value = res.df > 0 ? chisq_sf(res.statistic, res.df) : 1.0;
  return res;
}

std::vector<CoefInterval> confidence_intervals(const MlFit& fit,
                                               double level) {
  if (!fit.hessian_finite)
    fail(ErrorCode::IntervalsUnavailable,
         "intervals unavailable: non-finite Hessian");
  if (!(level > 0.0 && level < 1.0))
    fail(ErrorCode::OutOfRange, "level must be in (0,1)");
  const double z = norm_quantile(0.5 + level / 2.0);
  std::vector<CoefInterval> out;
  for (Eigen::Index j = 0; j < fit.params_nat.p(); ++j) {
    CoefInterval ci;
    ci.name = fit.column_names[j];
    ci.coef = fit.params_nat.beta[j];
    ci.se = std::sqrt(std::max(0.0, fit.cov_nat(j, j)));
    ci.lower = ci.coef - z * ci.se;
    ci.upper = ci.coef + z * ci.se;
    ci.z = ci.se > 0.0 ? ci.coef / ci.se : 0.0;
    ci.p_value = 2.0 * (1.0 - norm_cdf(std::fabs(ci.z)));
    out.push_back(ci);
  }
  return out;
}

ParametricFit fit_parametric(ParametricFamily family,
                             const SurvivalDataset& data,
                             const MlOptions& options) {
  data.validate();
  const auto p = data.p();
  const auto dim = p + 2;

  OptimOptions oopts;
  oopts.algorithm = options.algorithm;
  oopts.max_iter = options.max_iter;
  oopts.grad_tol = options.grad_tol;

  const Objective objective = [&](const VectorXd& x, VectorXd* g) {
    VectorXd grad_ll;
    const double ll =
        parametric_loglik_grad(family, x, data, g ? &grad_ll : nullptr);
    if (g) {
      if (std::isfinite(ll))
        *g = -grad_ll;
      else
        g->setConstant(dim, std::numeric_limits<double>::quiet_NaN());
    }
    return -ll;
  };

  std::vector<RestartOutcome> outcomes(options.restarts);
  parallel_for_index(options.restarts, [&](std::size_t r) {
    try {
      RngStream rng = RngStream::from_ids(options.seed, 17, r);
      VectorXd x0(dim);
      bool found = false;
      for (int attempt = 0; attempt < 100 && !found; ++attempt) {
        x0[0] = rng.normal(0.0, 1.0);
        x0[1] = rng.normal(0.0, 0.5);
        for (Eigen::Index j = 0; j < p; ++j) x0[2 + j] = rng.normal(0.0, 0.5);
        found = std::isfinite(objective(x0, nullptr));
      }
      if (!found) return;
      outcomes[r].opt = minimize(objective, x0, oopts);
      outcomes[r].usable =
          !outcomes[r].opt.failed && std::isfinite(outcomes[r].opt.f);
    } catch (...) {
      outcomes[r].usable = false;
    }
  });
  const int best = select_best(outcomes);
  if (best < 0)
    fail(ErrorCode::AllRestartsFailed, "no restart produced a finite fit");

  ParametricFit fit;
  const VectorXd& x = outcomes[best].opt.x;
  fit.params.scale = std::exp(x[0]);
  fit.params.shape = std::exp(x[1]);
  fit.params.beta = x.tail(p);
  fit.loglik = -outcomes[best].opt.f;
  fit.converged = outcomes[best].opt.converged;

  try {
    MatrixXd H(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
      const double h = 1e-5 * (1.0 + std::fabs(x[b]));
      VectorXd xp = x, xm = x;
      xp[b] += h;
      xm[b] -= h;
      VectorXd gp, gm;
      parametric_loglik_grad(family, xp, data, &gp);
      parametric_loglik_grad(family, xm, data, &gm);
      H.col(b) = (gp - gm) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose()).eval();
    if (!H.array().isFinite().all())
      fail(ErrorCode::NonFiniteHessian, "non-finite Hessian entries");
    fit.cov = blockwise_inverse(-H, 2);
    fit.se_beta.resize(p);
    for (Eigen::Index j = 0; j < p; ++j)
      fit.se_beta[j] = std::sqrt(std::max(0.0, fit.cov(2 + j, 2 + j)));
    fit.hessian_finite = fit.cov.array().isFinite().all();
  } catch (const Error&) {
    fit.hessian_finite = false;
  }
  return fit;
}

}  // namespace bpsurv
