#include "bpsurv/predict.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bpsurv/parallel.hpp"

namespace bpsurv {

double StepFunction::operator()(double t) const {
  auto it = std::upper_bound(knots.begin(), knots.end(), t);
  if (it == knots.begin()) return init;
  return values[static_cast<std::size_t>(it - knots.begin()) - 1];
}

double cumhaz_at(ModelKind model, const ParameterVector& params_nat,
                 const BernsteinBasis& basis, const VectorXd& profile,
                 double t) {
  if (profile.size() != params_nat.p())
    fail(ErrorCode::CovariateMismatch,
         "profile length disagrees with the fitted design");
  const double eta = profile.dot(params_nat.beta);
  const VectorXd gamma = params_nat.bp();
  const int m = basis.degree;
  std::vector<double> Gv(m);

  switch (model) {
    case ModelKind::PH: {
      basis.eval_G(std::min(t, basis.tau), Gv.data());
      double H0 = 0.0;
      for (int k = 0; k < m; ++k) H0 += gamma[k] * Gv[k];
      return H0 * std::exp(eta);
    }
    case ModelKind::PO: {
      basis.eval_G(std::min(t, basis.tau), Gv.data());
      double R0 = 0.0;
      for (int k = 0; k < m; ++k) R0 += gamma[k] * Gv[k];
      return std::log1p(R0 * std::exp(eta));
    }
    case ModelKind::AFT: {
      const double u = std::min(t * std::exp(-eta), basis.tau);
      basis.eval_G(u, Gv.data());
      double H0 = 0.0;
      for (int k = 0; k < m; ++k) H0 += gamma[k] * Gv[k];
      return H0;
    }
  }
  return 0.0;
}

double survival_at(ModelKind model, const ParameterVector& params_nat,
                   const BernsteinBasis& basis, const VectorXd& profile,
                   double t) {
  if (t <= 0.0) return 1.0;
  return std::exp(-cumhaz_at(model, params_nat, basis, profile, t));
}

namespace {

void check_newdata(const MatrixXd& newdata, Eigen::Index p) {
  if (newdata.cols() != p)
    fail(ErrorCode::CovariateMismatch,
         "newdata has " + std::to_string(newdata.cols()) +
             " columns, fit expects " + std::to_string(p));
}

}  // namespace

SurvivorCurves survivor(const MlFit& fit, const MatrixXd& newdata,
                        const std::vector<double>& times) {
  check_newdata(newdata, fit.params_nat.p());
  SurvivorCurves out;
  out.times = times;
  out.survival.resize(static_cast<Eigen::Index>(times.size()), newdata.rows());
  for (Eigen::Index q = 0; q < newdata.rows(); ++q) {
    const VectorXd profile = newdata.row(q);
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      if (times[ti] > fit.basis.tau) out.improper_tail = true;
      out.survival(static_cast<Eigen::Index>(ti), q) =
          survival_at(fit.model, fit.params_nat, fit.basis, profile,
                      times[ti]);
    }
  }
  return out;
}

SurvivorCurves survivor(const Chains& chains, const MatrixXd& newdata,
                        const std::vector<double>& times, bool hpd_band,
                        double prob) {
  check_newdata(newdata, chains.p);
  const auto S = chains.total_draws();
  const auto T = static_cast<Eigen::Index>(times.size());

  SurvivorCurves out;
  out.times = times;
  out.survival.resize(T, newdata.rows());
  if (hpd_band) {
    out.hpd_lower.resize(T, newdata.rows());
    out.hpd_upper.resize(T, newdata.rows());
  }
  for (double t : times)
    if (t > chains.basis.tau) out.improper_tail = true;

  for (Eigen::Index q = 0; q < newdata.rows(); ++q) {
    const VectorXd profile = newdata.row(q);
    // Per-draw curves, averaged pointwise.
    MatrixXd draws_surv(S, T);
    parallel_for_index(static_cast<std::size_t>(S), [&](std::size_t s) {
      ParameterVector params;
      params.beta = chains.draws_nat.row(static_cast<Eigen::Index>(s))
                        .head(chains.p);
      params.log_bp = chains.draws_nat.row(static_cast<Eigen::Index>(s))
                          .tail(chains.m)
                          .array()
                          .log();
      for (Eigen::Index ti = 0; ti < T; ++ti)
        draws_surv(static_cast<Eigen::Index>(s), ti) = survival_at(
            chains.model, params, chains.basis, profile, times[ti]);
    });
    for (Eigen::Index ti = 0; ti < T; ++ti) {
      out.survival(ti, q) =
          pairwise_sum(draws_surv.col(ti).data(), S) / static_cast<double>(S);
      if (hpd_band) {
        std::vector<double> col(draws_surv.col(ti).data(),
                                draws_surv.col(ti).data() + S);
        const auto band = hpd_interval(std::move(col), prob);
        out.hpd_lower(ti, q) = band.first;
        out.hpd_upper(ti, q) = band.second;
      }
    }
  }
  return out;
}

namespace {

// Distinct event times with event counts and at-risk counts. Censored
// observations tied with an event time stay in the risk set for it.
struct RiskTable {
  std::vector<double> times;
  std::vector<double> d;  // events at time
  std::vector<double> n;  // at risk at time
};

RiskTable risk_table(const SurvivalDataset& data) {
  if (data.n() == 0) fail(ErrorCode::EmptyData, "empty dataset");
  std::map<double, double> events;
  for (Eigen::Index i = 0; i < data.n(); ++i)
    if (data.status[i] == 1) events[data.times[i]] += 1.0;

  RiskTable table;
  for (const auto& [t, d] : events) {
    double at_risk = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
      if (data.times[i] >= t) at_risk += 1.0;
    table.times.push_back(t);
    table.d.push_back(d);
    table.n.push_back(at_risk);
  }
  return table;
}

}  // namespace

StepFunction kaplan_meier(const SurvivalDataset& data) {
  const RiskTable table = risk_table(data);
  StepFunction km;
  km.init = 1.0;
  double s = 1.0;
  for (std::size_t j = 0; j < table.times.size(); ++j) {
    s *= 1.0 - table.d[j] / table.n[j];
    km.knots.push_back(table.times[j]);
    km.values.push_back(s);
  }
  return km;
}

StepFunction nelson_aalen(const SurvivalDataset& data) {
  const RiskTable table = risk_table(data);
  StepFunction na;
  na.init = 0.0;
  double h = 0.0;
  for (std::size_t j = 0; j < table.times.size(); ++j) {
    h += table.d[j] / table.n[j];
    na.knots.push_back(table.times[j]);
    na.values.push_back(h);
  }
  return na;
}

Residuals cox_snell_residuals(ModelKind model,
                              const ParameterVector& params_nat,
                              const BernsteinBasis& basis,
                              const SurvivalDataset& data) {
  if (data.p() != params_nat.p())
    fail(ErrorCode::CovariateMismatch,
         "dataset covariates disagree with the fitted design");
  Residuals res;
  res.status = data.status;
  res.values.resize(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const VectorXd profile = data.design.row(i);
    res.values[i] =
        cumhaz_at(model, params_nat, basis, profile, data.times[i]);
  }
  return res;
}

Residuals cox_snell_residuals(const MlFit& fit, const SurvivalDataset& data) {
  return cox_snell_residuals(fit.model, fit.params_nat, fit.basis, data);
}

std::vector<ResidualDiagnosticRow> residual_diagnostics(const Residuals& res) {
  SurvivalDataset rds;
  const auto n = static_cast<Eigen::Index>(res.values.size());
  rds.times.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rds.times[i] = std::max(res.values[i], 1e-12);
  rds.status = res.status;
  rds.design.resize(n, 0);
  const StepFunction km = kaplan_meier(rds);

  std::vector<ResidualDiagnosticRow> rows(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rows[i].residual = res.values[i];
    rows[i].status = res.status[i];
    rows[i].km = km(rds.times[i]);
    rows[i].exp_neg = std::exp(-res.values[i]);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.residual < b.residual; });
  return rows;
}

}  // namespace bpsurv
