#pragma once

#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "bpsurv/likelihood.hpp"
#include "bpsurv/types.hpp"

namespace bpsurv {

enum class BpPriorFamily { LogNormal, Gamma, InverseGamma };

// Independent priors on the standardized-scale parameters: Normal(mu, sd) per
// regression coefficient; LogNormal/Gamma/InverseGamma per baseline
// coefficient. The second argument of Normal/LogNormal is a standard
// deviation.
struct PriorSpec {
  double beta_mu = 0.0;
  double beta_sd = 4.0;
  BpPriorFamily bp_family = BpPriorFamily::LogNormal;
  double bp_a = 0.0;   // mu for LogNormal, shape otherwise
  double bp_b = 10.0;  // sd for LogNormal, rate/scale otherwise

  static PriorSpec preset(const std::string& name);  // prior1..prior4
  std::string describe() const;
};

struct McmcConfig {
  int chains = 4;
  int iter = 2000;  // total per chain, including warmup
  int warmup = 1000;
  std::uint64_t seed = 1234;
  double target_accept = 0.30;
};

// Posterior draws: kept iterations per chain, on both the sampling scale and
// the natural scale, plus per-draw pointwise log-likelihoods.
struct Chains {
  ModelKind model = ModelKind::PH;
  BernsteinBasis basis;
  StandardizationParams standardization;
  std::vector<std::string> column_names;
  Eigen::Index n_obs = 0;
  Eigen::Index p = 0;
  int m = 0;
  int n_chains = 0;
  int kept = 0;  // draws kept per chain

  // Row s = chain*kept + draw; columns are (beta*, log gamma*) for `draws`
  // and (beta, gamma) for `draws_nat`.
  MatrixXd draws;
  MatrixXd draws_nat;
  VectorXd log_posterior;     // per kept draw
  MatrixXd pointwise_loglik;  // kept-draws x n
  std::vector<double> accept_rate;  // per chain, post-warmup

  // Evaluator over the (standardized) training data; lets the criteria be
  // recomputed from the chains alone. Absent on deserialized fits.
  std::shared_ptr<const LikelihoodContext> ctx;

  Eigen::Index total_draws() const { return draws.rows(); }
  std::vector<std::string> parameter_names() const;
};

Chains sample_posterior(ModelKind model, const SurvivalDataset& data,
                        const PriorSpec& priors, const McmcConfig& config,
                        std::optional<int> degree = std::nullopt,
                        bool standardize_design = true);

std::pair<double, double> hpd_interval(std::vector<double> samples,
                                       double prob);

double rhat(const std::vector<std::vector<double>>& chains);
double n_eff(const std::vector<std::vector<double>>& chains);

struct ParameterSummary {
  std::string name;
  double mode = 0.0;
  double mean = 0.0;
  double se_mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double hpd_lower = 0.0;
  double hpd_upper = 0.0;
  double n_eff = 0.0;
  double rhat = 0.0;
};

struct ExpSummary {
  std::string name;
  double mean_exp = 0.0;
  double median_exp = 0.0;
  double sd_exp = 0.0;
  double hpd_lower_exp = 0.0;
  double hpd_upper_exp = 0.0;
};

struct Criteria {
  double dic = 0.0;
  double p_dic = 0.0;
  double elpd_waic = 0.0;
  double p_waic = 0.0;
  double waic = 0.0;           // -2 * (lppd - p_waic)
  double lpml = 0.0;
  double neg2_lpml = 0.0;
  bool finite = true;
};

struct PosteriorSummary {
  std::vector<ParameterSummary> parameters;  // natural scale
  std::vector<ExpSummary> exp_block;         // regression coefficients only
  Criteria criteria;
};

double dic(const Chains& chains);
// (elpd_waic, p_waic, waic)
std::tuple<double, double, double> waic(const MatrixXd& pointwise_loglik);
double lpml(const MatrixXd& pointwise_loglik);

PosteriorSummary summarize(const Chains& chains, double prob = 0.95);

}  // namespace bpsurv
