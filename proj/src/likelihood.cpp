#include "bpsurv/likelihood.hpp"

#include <cmath>
#include <limits>

#include "bpsurv/parallel.hpp"

namespace bpsurv {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Events pushed past tau by the AFT rescaling keep a floored density so that
// restarts survive bad points instead of throwing.
constexpr double kDensityFloor = 1e-300;

thread_local std::vector<double> tl_g;
thread_local std::vector<double> tl_G;
}  // namespace

LikelihoodContext::LikelihoodContext(ModelKind model, VectorXd times,
                                     std::vector<int> status, MatrixXd design,
                                     BernsteinBasis basis)
    : model_(model),
      times_(std::move(times)),
      status_(std::move(status)),
      design_(std::move(design)),
      basis_(basis) {
  const auto n = times_.size();
  if (static_cast<Eigen::Index>(status_.size()) != n || design_.rows() != n)
    fail(ErrorCode::DimensionMismatch, "likelihood inputs disagree on n");
  if (n > 0 && times_.maxCoeff() > basis_.tau * (1.0 + 1e-12))
    fail(ErrorCode::OutOfRange, "tau must cover the largest observed time");

  if (model_ != ModelKind::AFT) {
    const int m = basis_.degree;
    gmat_.resize(n, m);
    Gmat_.resize(n, m);
    std::vector<double> row(m);
    for (Eigen::Index i = 0; i < n; ++i) {
      basis_.eval_g(times_[i], row.data());
      for (int k = 0; k < m; ++k) gmat_(i, k) = row[k];
      basis_.eval_G(times_[i], row.data());
      for (int k = 0; k < m; ++k) Gmat_(i, k) = row[k];
    }
  }
}

LikelihoodContext LikelihoodContext::for_dataset(ModelKind model,
                                                 const SurvivalDataset& data,
                                                 const BernsteinBasis& basis) {
  return LikelihoodContext(model, data.times, data.status, data.design, basis);
}

int LikelihoodContext::events() const {
  int r = 0;
  for (int s : status_) r += s;
  return r;
}

double LikelihoodContext::obs_loglik(Eigen::Index i, const VectorXd& gamma,
                                     double eta) const {
  const int d = status_[i];
  const int m = basis_.degree;
  switch (model_) {
    case ModelKind::PH: {
      double h0 = 0.0, H0 = 0.0;
      for (int k = 0; k < m; ++k) {
        h0 += gamma[k] * gmat_(i, k);
        H0 += gamma[k] * Gmat_(i, k);
      }
      double t = -H0 * std::exp(eta);
      if (d) t += std::log(h0) + eta;
      return t;
    }
    case ModelKind::PO: {
      double r0 = 0.0, R0 = 0.0;
      for (int k = 0; k < m; ++k) {
        r0 += gamma[k] * gmat_(i, k);
        R0 += gamma[k] * Gmat_(i, k);
      }
      const double odds = R0 * std::exp(eta);
      double t = -(1.0 + d) * std::log1p(odds);
      if (d) t += std::log(r0) + eta;
      return t;
    }
    case ModelKind::AFT: {
      const double u = times_[i] * std::exp(-eta);
      if (u > basis_.tau) {
        double t = -gamma.sum();
        if (d) t += -eta + std::log(kDensityFloor);
        return t;
      }
      tl_g.resize(m);
      tl_G.resize(m);
      basis_.eval_g(u, tl_g.data());
      basis_.eval_G(u, tl_G.data());
      double h0 = 0.0, H0 = 0.0;
      for (int k = 0; k < m; ++k) {
        h0 += gamma[k] * tl_g[k];
        H0 += gamma[k] * tl_G[k];
      }
      double t = -H0;
      if (d) t += -eta + std::log(h0);
      return t;
    }
  }
  return kNegInf;
}

double LikelihoodContext::loglik(const ParameterVector& params) const {
  if (params.p() != design_.cols() || params.m() != basis_.degree)
    fail(ErrorCode::DimensionMismatch, "parameter sizes disagree with model");
  const auto n = times_.size();
  if (n == 0) return 0.0;
  const VectorXd gamma = params.bp();
  const VectorXd eta = design_ * params.beta;
  std::vector<double> terms(n);
  parallel_fill(n, terms.data(), [&](std::size_t i) {
    return obs_loglik(static_cast<Eigen::Index>(i), gamma, eta[i]);
  });
  return pairwise_sum(terms);
}

VectorXd LikelihoodContext::pointwise_loglik(const ParameterVector& params)
    const {
  if (params.p() != design_.cols() || params.m() != basis_.degree)
    fail(ErrorCode::DimensionMismatch, "parameter sizes disagree with model");
  const auto n = times_.size();
  const VectorXd gamma = params.bp();
  const VectorXd eta = design_ * params.beta;
  VectorXd out(n);
  parallel_fill(n, out.data(), [&](std::size_t i) {
    return obs_loglik(static_cast<Eigen::Index>(i), gamma, eta[i]);
  });
  return out;
}

void LikelihoodContext::obs_grad(Eigen::Index i, const VectorXd& gamma,
                                 double eta, double* out) const {
  const auto p = design_.cols();
  const int m = basis_.degree;
  const int d = status_[i];
  switch (model_) {
    case ModelKind::PH: {
      double h0 = 0.0, H0 = 0.0;
      for (int k = 0; k < m; ++k) {
        h0 += gamma[k] * gmat_(i, k);
        H0 += gamma[k] * Gmat_(i, k);
      }
      const double E = std::exp(eta);
      const double db = d - H0 * E;
      for (Eigen::Index j = 0; j < p; ++j) out[j] = design_(i, j) * db;
      for (int k = 0; k < m; ++k)
        out[p + k] =
            gamma[k] * ((d ? gmat_(i, k) / h0 : 0.0) - Gmat_(i, k) * E);
      return;
    }
    case ModelKind::PO: {
      double r0 = 0.0, R0 = 0.0;
      for (int k = 0; k < m; ++k) {
        r0 += gamma[k] * gmat_(i, k);
        R0 += gamma[k] * Gmat_(i, k);
      }
      const double E = std::exp(eta);
      const double q = R0 * E / (1.0 + R0 * E);
      const double db = d - (1.0 + d) * q;
      for (Eigen::Index j = 0; j < p; ++j) out[j] = design_(i, j) * db;
      for (int k = 0; k < m; ++k)
        out[p + k] = gamma[k] * ((d ? gmat_(i, k) / r0 : 0.0) -
                                 (1.0 + d) * Gmat_(i, k) * E / (1.0 + R0 * E));
      return;
    }
    case ModelKind::AFT: {
      const double u = times_[i] * std::exp(-eta);
      if (u > basis_.tau) {
        for (Eigen::Index j = 0; j < p; ++j)
          out[j] = -static_cast<double>(d) * design_(i, j);
        for (int k = 0; k < m; ++k) out[p + k] = -gamma[k];
        return;
      }
      tl_g.resize(m);
      tl_G.resize(m);
      basis_.eval_g(u, tl_g.data());
      basis_.eval_G(u, tl_G.data());
      double h0 = 0.0, slope = 0.0;
      for (int k = 0; k < m; ++k) {
        h0 += gamma[k] * tl_g[k];
        slope += gamma[k] * basis_.g_deriv(k + 1, u);
      }
      const double deta =
          -d - (d ? d * u * slope / h0 : 0.0) + u * h0;
      for (Eigen::Index j = 0; j < p; ++j) out[j] = design_(i, j) * deta;
      for (int k = 0; k < m; ++k)
        out[p + k] = gamma[k] * ((d ? tl_g[k] / h0 : 0.0) - tl_G[k]);
      return;
    }
  }
}

VectorXd LikelihoodContext::grad(const ParameterVector& params) const {
  const double ll = loglik(params);
  if (!std::isfinite(ll))
    fail(ErrorCode::NonFiniteLikelihood,
         "gradient requested at a point with non-finite log-likelihood");
  const auto n = times_.size();
  const auto dim = params.size();
  if (n == 0) return VectorXd::Zero(dim);

  const VectorXd gamma = params.bp();
  const VectorXd eta = design_ * params.beta;
  MatrixXd buf(n, dim);
  const auto fill_row = [&](std::size_t i) {
    std::vector<double> row(dim);
    obs_grad(static_cast<Eigen::Index>(i), gamma, eta[i], row.data());
    for (Eigen::Index j = 0; j < dim; ++j)
      buf(static_cast<Eigen::Index>(i), j) = row[j];
  };
  if (n >= 512) {
    parallel_for_index(n, fill_row);
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      fill_row(static_cast<std::size_t>(i));
  }
  VectorXd out(dim);
  for (Eigen::Index j = 0; j < dim; ++j)
    out[j] = pairwise_sum(buf.col(j).data(), n);
  return out;
}

double loglik_ph(const ParameterVector& params, const SurvivalDataset& data,
                 const BernsteinBasis& basis) {
  return LikelihoodContext::for_dataset(ModelKind::PH, data, basis)
      .loglik(params);
}

double loglik_po(const ParameterVector& params, const SurvivalDataset& data,
                 const BernsteinBasis& basis) {
  return LikelihoodContext::for_dataset(ModelKind::PO, data, basis)
      .loglik(params);
}

double loglik_aft(const ParameterVector& params, const SurvivalDataset& data,
                  const BernsteinBasis& basis) {
  return LikelihoodContext::for_dataset(ModelKind::AFT, data, basis)
      .loglik(params);
}

VectorXd grad(ModelKind model, const ParameterVector& params,
              const SurvivalDataset& data, const BernsteinBasis& basis) {
  return LikelihoodContext::for_dataset(model, data, basis).grad(params);
}

double parametric_loglik_grad(ParametricFamily family, const VectorXd& x,
                              const SurvivalDataset& data, VectorXd* grad_out) {
  const auto n = data.n();
  const auto p = data.p();
  if (x.size() != p + 2)
    fail(ErrorCode::DimensionMismatch, "expected (log scale, log shape, beta)");
  const double a = x[0];
  const double b = x[1];
  const double shape = std::exp(b);
  const VectorXd beta = x.tail(p);
  const VectorXd eta = data.design * beta;

  double ll = 0.0;
  if (grad_out) grad_out->setZero(p + 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = data.status[i];
    const double ly = std::log(data.times[i]);
    if (family == ParametricFamily::WAFT) {
      const double w = std::exp(a + shape * (ly - eta[i]));
      ll += d * (a + b + (shape - 1.0) * ly - shape * eta[i]) - w;
      if (grad_out) {
        (*grad_out)[0] += d - w;
        (*grad_out)[1] +=
            d * (1.0 + shape * (ly - eta[i])) - w * shape * (ly - eta[i]);
        for (Eigen::Index j = 0; j < p; ++j)
          (*grad_out)[2 + j] += shape * data.design(i, j) * (w - d);
      }
    } else {
      const double A = std::exp(a + shape * (ly - eta[i]));
      const double q = A / (1.0 + A);
      ll += d * (a + b + (shape - 1.0) * ly - shape * eta[i]) -
            (1.0 + d) * std::log1p(A);
      if (grad_out) {
        (*grad_out)[0] += d - (1.0 + d) * q;
        (*grad_out)[1] += d * (1.0 + shape * (ly - eta[i])) -
                          (1.0 + d) * q * shape * (ly - eta[i]);
        for (Eigen::Index j = 0; j < p; ++j)
          (*grad_out)[2 + j] +=
              shape * data.design(i, j) * ((1.0 + d) * q - d);
      }
    }
  }
  return ll;
}

namespace {
double parametric_loglik(ParametricFamily family, const ParametricParams& p,
                         const SurvivalDataset& data) {
  if (!(p.scale > 0.0) || !(p.shape > 0.0))
    fail(ErrorCode::InvalidParameter, "scale and shape must be positive");
  VectorXd x(p.beta.size() + 2);
  x[0] = std::log(p.scale);
  x[1] = std::log(p.shape);
  x.tail(p.beta.size()) = p.beta;
  return parametric_loglik_grad(family, x, data, nullptr);
}
}  // namespace

double loglik_waft(const ParametricParams& params,
                   const SurvivalDataset& data) {
  return parametric_loglik(ParametricFamily::WAFT, params, data);
}

double loglik_llaft(const ParametricParams& params,
                    const SurvivalDataset& data) {
  return parametric_loglik(ParametricFamily::LLAFT, params, data);
}

namespace ref {

double loglik(ModelKind model, const ParameterVector& params,
              const VectorXd& times, const std::vector<int>& status,
              const MatrixXd& design, const BernsteinBasis& basis) {
  const auto n = times.size();
  const int m = basis.degree;
  const VectorXd gamma = params.bp();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eta = design.row(i) * params.beta;
    const int d = status[i];
    if (model == ModelKind::AFT) {
      const double u = times[i] * std::exp(-eta);
      if (u > basis.tau) {
        ll += -gamma.sum() + (d ? -eta + std::log(kDensityFloor) : 0.0);
        continue;
      }
      double h0 = 0.0, H0 = 0.0;
      for (int k = 1; k <= m; ++k) {
        h0 += gamma[k - 1] * basis.g(k, u);
        H0 += gamma[k - 1] * basis.G(k, u);
      }
      ll += -H0 + (d ? -eta + std::log(h0) : 0.0);
      continue;
    }
    double h0 = 0.0, H0 = 0.0;
    for (int k = 1; k <= m; ++k) {
      h0 += gamma[k - 1] * basis.g(k, times[i]);
      H0 += gamma[k - 1] * basis.G(k, times[i]);
    }
    if (model == ModelKind::PH) {
      ll += -H0 * std::exp(eta) + (d ? std::log(h0) + eta : 0.0);
    } else {
      const double odds = H0 * std::exp(eta);
      ll += -(1.0 + d) * std::log1p(odds) + (d ? std::log(h0) + eta : 0.0);
    }
  }
  return ll;
}

}  // namespace ref

}  // namespace bpsurv
