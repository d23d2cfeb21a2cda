#include "bpsurv/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "bpsurv/data.hpp"
#include "bpsurv/mle.hpp"
#include "bpsurv/parallel.hpp"
#include "bpsurv/rng.hpp"

namespace bpsurv {

namespace {
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
}  // namespace

PriorSpec PriorSpec::preset(const std::string& name) {
  PriorSpec s;
  s.bp_family = BpPriorFamily::LogNormal;
  if (name == "prior1") {
    s.beta_sd = 4.0;
    s.bp_b = 4.0;
  } else if (name == "prior2") {
    s.beta_sd = 4.0;
    s.bp_b = 10.0;
  } else if (name == "prior3") {
    s.beta_sd = 10.0;
    s.bp_b = 4.0;
  } else if (name == "prior4") {
    s.beta_sd = 10.0;
    s.bp_b = 10.0;
  } else {
    fail(ErrorCode::InvalidConfig, "unknown prior preset '" + name + "'");
  }
  return s;
}

std::string PriorSpec::describe() const {
  const auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  std::string out =
      "beta ~ normal(" + num(beta_mu) + "," + num(beta_sd) + "); bp ~ ";
  switch (bp_family) {
    case BpPriorFamily::LogNormal:
      out += "lognormal(" + num(bp_a) + "," + num(bp_b) + ")";
      break;
    case BpPriorFamily::Gamma:
      out += "gamma(" + num(bp_a) + "," + num(bp_b) + ")";
      break;
    case BpPriorFamily::InverseGamma:
      out += "invgamma(" + num(bp_a) + "," + num(bp_b) + ")";
      break;
  }
  return out;
}

std::vector<std::string> Chains::parameter_names() const {
  std::vector<std::string> names = column_names;
  for (int k = 1; k <= m; ++k) names.push_back("gamma" + std::to_string(k));
  return names;
}

namespace {

void check_priors(const PriorSpec& priors) {
  if (!(priors.beta_sd > 0.0))
    fail(ErrorCode::InvalidConfig, "beta prior sd must be positive");
  switch (priors.bp_family) {
    case BpPriorFamily::LogNormal:
      if (!(priors.bp_b > 0.0))
        fail(ErrorCode::InvalidConfig, "lognormal sd must be positive");
      break;
    case BpPriorFamily::Gamma:
    case BpPriorFamily::InverseGamma:
      if (!(priors.bp_a > 0.0) || !(priors.bp_b > 0.0))
        fail(ErrorCode::InvalidConfig, "prior shape/rate must be positive");
      break;
  }
}

// Log prior density of (beta*, log gamma*), including the Jacobian of the
// log map for the baseline coefficients.
double log_prior(const VectorXd& x, Eigen::Index p, const PriorSpec& priors) {
  double lp = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double z = (x[j] - priors.beta_mu) / priors.beta_sd;
    lp += -0.5 * z * z - std::log(priors.beta_sd) - kLogSqrt2Pi;
  }
  for (Eigen::Index k = p; k < x.size(); ++k) {
    const double theta = x[k];
    switch (priors.bp_family) {
      case BpPriorFamily::LogNormal: {
        const double z = (theta - priors.bp_a) / priors.bp_b;
        lp += -0.5 * z * z - std::log(priors.bp_b) - kLogSqrt2Pi;
        break;
      }
      case BpPriorFamily::Gamma:
        lp += priors.bp_a * std::log(priors.bp_b) -
              std::lgamma(priors.bp_a) + priors.bp_a * theta -
              priors.bp_b * std::exp(theta);
        break;
      case BpPriorFamily::InverseGamma:
        lp += priors.bp_a * std::log(priors.bp_b) -
              std::lgamma(priors.bp_a) - priors.bp_a * theta -
              priors.bp_b * std::exp(-theta);
        break;
    }
  }
  return lp;
}

double logsumexp_col(const double* v, Eigen::Index n) {
  double mx = kNegInf;
  for (Eigen::Index i = 0; i < n; ++i) mx = std::max(mx, v[i]);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::exp(v[i] - mx);
  return mx + std::log(s);
}

}  // namespace

Chains sample_posterior(ModelKind model, const SurvivalDataset& data,
                        const PriorSpec& priors, const McmcConfig& config,
                        std::optional<int> degree, bool standardize_design) {
  check_priors(priors);
  if (config.chains < 1) fail(ErrorCode::InvalidConfig, "chains must be >= 1");
  if (!(config.warmup >= 0 && config.warmup < config.iter))
    fail(ErrorCode::InvalidConfig, "warmup must be < iter");
  data.validate();

  const auto n = data.n();
  const auto p = data.p();
  const int m = degree.value_or(n > 0 ? default_degree(n) : 1);
  if (m < 1) fail(ErrorCode::OutOfRange, "degree must be >= 1");
  const double tau = n > 0 ? data.times.maxCoeff() : 1.0;

  Chains out;
  out.model = model;
  out.basis = BernsteinBasis(m, tau);
  out.column_names = data.column_names;
  out.n_obs = n;
  out.p = p;
  out.m = m;
  out.n_chains = config.chains;
  out.kept = config.iter - config.warmup;

  MatrixXd zdesign = data.design;
  if (standardize_design && p > 0 && n >= 2) {
    auto [z, sparams] = standardize(data.design);
    zdesign = std::move(z);
    out.standardization = sparams;
  } else {
    out.standardization.means = VectorXd::Zero(p);
    out.standardization.sds = VectorXd::Ones(p);
  }

  auto ctx = std::make_shared<const LikelihoodContext>(
      model, data.times, data.status, zdesign, out.basis);
  out.ctx = ctx;

  const auto dim = p + m;
  const auto total = static_cast<Eigen::Index>(config.chains) * out.kept;
  out.draws.resize(total, dim);
  out.draws_nat.resize(total, dim);
  out.log_posterior.resize(total);
  out.pointwise_loglik.resize(total, n);
  out.accept_rate.assign(config.chains, 0.0);

  const auto log_post = [&](const VectorXd& x) -> double {
    const double lp = log_prior(x, p, priors);
    const double ll = ctx->loglik(ParameterVector::unpack(x, p));
    return lp + ll;
  };

  std::exception_ptr chain_error;
  parallel_for_index(config.chains, [&](std::size_t c) {
   try {
    RngStream rng = RngStream::from_ids(config.seed, 23, c);

    VectorXd x(dim);
    double lp = kNegInf;
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      for (Eigen::Index j = 0; j < p; ++j) x[j] = rng.normal(0.0, 0.5);
      for (int k = 0; k < m; ++k) x[p + k] = rng.normal(0.0, 1.0);
      lp = log_post(x);
      found = std::isfinite(lp);
    }
    if (!found)
      fail(ErrorCode::NonFiniteInitialPoint,
           "no finite starting point found in 100 attempts");

    // Diagonal adaptation: per-coordinate spread from warmup draws plus one
    // global scale nudged toward the target acceptance rate.
    double log_lambda = std::log(2.38 / std::sqrt(static_cast<double>(dim)));
    VectorXd run_mean = x;
    VectorXd run_m2 = VectorXd::Constant(dim, 0.01);
    VectorXd prop_sd = VectorXd::Ones(dim);
    long seen = 1;

    VectorXd proposal(dim);
    long accepted_kept = 0;
    for (int it = 0; it < config.iter; ++it) {
      const bool warm = it < config.warmup;
      const double lambda = std::exp(log_lambda);
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double sd =
            std::sqrt(run_m2[j] / std::max<long>(seen - 1, 1) + 1e-8);
        prop_sd[j] = lambda * sd;
        proposal[j] = x[j] + prop_sd[j] * rng.normal();
      }
      const double lp_new = log_post(proposal);
      double alpha = 0.0;
      if (std::isfinite(lp_new))
        alpha = std::min(1.0, std::exp(lp_new - lp));
      if (rng.uniform01() < alpha) {
        x = proposal;
        lp = lp_new;
        if (!warm) ++accepted_kept;
      }

      if (warm) {
        const double step = std::pow(it + 1.0, -0.6);
        log_lambda += step * (alpha - config.target_accept);
        ++seen;
        const VectorXd delta = x - run_mean;
        run_mean += delta / static_cast<double>(seen);
        run_m2 += delta.cwiseProduct(x - run_mean);
      } else {
        const auto row =
            static_cast<Eigen::Index>(c) * out.kept + (it - config.warmup);
        out.draws.row(row) = x;
        out.log_posterior[row] = lp;

        ParameterVector params = ParameterVector::unpack(x, p);
        ParameterVector nat =
            recover_estimates(params, out.standardization, model);
        out.draws_nat.row(row).head(p) = nat.beta;
        out.draws_nat.row(row).tail(m) = nat.bp();
        if (n > 0)
          out.pointwise_loglik.row(row) = ctx->pointwise_loglik(params);
      }
    }
    out.accept_rate[c] =
        static_cast<double>(accepted_kept) / std::max(out.kept, 1);
   } catch (...) {
#ifdef _OPENMP
#pragma omp critical(bpsurv_chain_error)
#endif
    if (!chain_error) chain_error = std::current_exception();
   }
  });
  if (chain_error) std::rethrow_exception(chain_error);
  return out;
}

std::pair<double, double> hpd_interval(std::vector<double> samples,
                                       double prob) {
  const auto S = samples.size();
  if (S < 10) fail(ErrorCode::TooFewSamples, "need at least 10 samples");
  if (!(prob > 0.0 && prob < 1.0))
    fail(ErrorCode::OutOfRange, "prob must be in (0,1)");
  std::sort(samples.begin(), samples.end());
  const auto w = static_cast<std::size_t>(
      std::min<double>(std::ceil(prob * static_cast<double>(S)),
                       static_cast<double>(S)));
  std::size_t best = 0;
  double best_width = samples[w - 1] - samples[0];
  for (std::size_t i = 1; i + w <= S; ++i) {
    const double width = samples[i + w - 1] - samples[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return {samples[best], samples[best + w - 1]};
}

namespace {

struct ChainMoments {
  double var_plus = 0.0;  // pooled variance estimate
  double w = 0.0;         // mean within-sequence variance
};

ChainMoments pooled_moments(const std::vector<std::vector<double>>& seqs) {
  const auto C = seqs.size();
  const auto L = seqs[0].size();
  double w = 0.0;
  std::vector<double> means(C);
  for (std::size_t c = 0; c < C; ++c) {
    double mean = 0.0;
    for (double v : seqs[c]) mean += v;
    mean /= static_cast<double>(L);
    means[c] = mean;
    double ss = 0.0;
    for (double v : seqs[c]) ss += (v - mean) * (v - mean);
    w += ss / static_cast<double>(L - 1);
  }
  w /= static_cast<double>(C);

  double b_over_l = 0.0;
  if (C > 1) {
    double grand = 0.0;
    for (double v : means) grand += v;
    grand /= static_cast<double>(C);
    double ss = 0.0;
    for (double v : means) ss += (v - grand) * (v - grand);
    b_over_l = ss / static_cast<double>(C - 1);
  }
  ChainMoments mom;
  mom.w = w;
  mom.var_plus =
      (static_cast<double>(L - 1) / static_cast<double>(L)) * w + b_over_l;
  return mom;
}

}  // namespace

double rhat(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2)
    fail(ErrorCode::InsufficientChains, "rhat needs at least 2 chains");
  std::size_t len = chains[0].size();
  for (const auto& c : chains) len = std::min(len, c.size());
  if (len < 10)
    fail(ErrorCode::TooFewSamples, "rhat needs at least 10 draws per chain");

  // Split each chain in half.
  const std::size_t half = len / 2;
  std::vector<std::vector<double>> seqs;
  for (const auto& c : chains) {
    seqs.emplace_back(c.begin(), c.begin() + half);
    seqs.emplace_back(c.begin() + (len - half), c.begin() + len);
  }
  const ChainMoments mom = pooled_moments(seqs);
  if (mom.w <= 1e-300) return mom.var_plus <= 1e-300 ? 1.0 : kNan;
  return std::sqrt(mom.var_plus / mom.w);
}

double n_eff(const std::vector<std::vector<double>>& chains) {
  if (chains.empty())
    fail(ErrorCode::InsufficientChains, "n_eff needs at least 1 chain");
  std::size_t len = chains[0].size();
  for (const auto& c : chains) len = std::min(len, c.size());
  if (len < 10)
    fail(ErrorCode::TooFewSamples, "n_eff needs at least 10 draws per chain");
  const auto C = chains.size();

  std::vector<std::vector<double>> seqs;
  for (const auto& c : chains) seqs.emplace_back(c.begin(), c.begin() + len);
  const ChainMoments mom = pooled_moments(seqs);
  const double total = static_cast<double>(C) * static_cast<double>(len);
  if (mom.var_plus <= 1e-300) return total;

  // Autocorrelations from the variogram; sum Geyer pairs until the first
  // negative pair.
  std::vector<double> rho(len, 0.0);
  rho[0] = 1.0;
  for (std::size_t t = 1; t < len - 1; ++t) {
    double vt = 0.0;
    for (const auto& s : seqs)
      for (std::size_t i = t; i < len; ++i)
        vt += (s[i] - s[i - t]) * (s[i] - s[i - t]);
    vt /= static_cast<double>(C) * static_cast<double>(len - t);
    rho[t] = 1.0 - vt / (2.0 * mom.var_plus);
  }

  double tau = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < len - 1; ++k) {
    const double pair = rho[2 * k] + rho[2 * k + 1];
    if (pair < 0.0) break;
    tau += pair;
  }
  tau = std::max(2.0 * tau - 1.0, 1.0 / total);
  return total / tau;
}

double dic(const Chains& chains) {
  if (!chains.ctx)
    fail(ErrorCode::InvalidConfig, "chains carry no likelihood evaluator");
  const auto S = chains.total_draws();
  std::vector<double> dev(S);
  for (Eigen::Index s = 0; s < S; ++s)
    dev[s] = -2.0 * chains.pointwise_loglik.row(s).sum();
  const double dbar = pairwise_sum(dev) / static_cast<double>(S);

  const VectorXd xbar = chains.draws.colwise().mean();
  const double ll_hat =
      chains.ctx->loglik(ParameterVector::unpack(xbar, chains.p));
  const double p_dic = dbar - (-2.0 * ll_hat);
  return dbar + p_dic;
}

std::tuple<double, double, double> waic(const MatrixXd& pointwise_loglik) {
  const auto S = pointwise_loglik.rows();
  const auto n = pointwise_loglik.cols();
  double lppd = 0.0, p_waic = 0.0;
  std::vector<double> col(S);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < S; ++s) col[s] = pointwise_loglik(s, i);
    lppd += logsumexp_col(col.data(), S) - std::log(static_cast<double>(S));
    if (S > 1) {
      double mean = 0.0;
      for (double v : col) mean += v;
      mean /= static_cast<double>(S);
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      p_waic += ss / static_cast<double>(S - 1);
    }
  }
  const double elpd = lppd - p_waic;
  return {elpd, p_waic, -2.0 * elpd};
}

double lpml(const MatrixXd& pointwise_loglik) {
  const auto S = pointwise_loglik.rows();
  const auto n = pointwise_loglik.cols();
  double out = 0.0;
  std::vector<double> col(S);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index s = 0; s < S; ++s) col[s] = -pointwise_loglik(s, i);
    // log CPO_i = log S - logsumexp of the negated pointwise values.
    out += std::log(static_cast<double>(S)) - logsumexp_col(col.data(), S);
  }
  return out;
}

PosteriorSummary summarize(const Chains& chains, double prob) {
  const auto S = chains.total_draws();
  if (S == 0) fail(ErrorCode::TooFewSamples, "no draws");
  const auto dim = chains.draws_nat.cols();
  const auto names = chains.parameter_names();

  Eigen::Index mode_row = 0;
  chains.log_posterior.maxCoeff(&mode_row);

  PosteriorSummary summary;
  for (Eigen::Index j = 0; j < dim; ++j) {
    ParameterSummary ps;
    ps.name = names[j];
    std::vector<double> all(S);
    for (Eigen::Index s = 0; s < S; ++s) all[s] = chains.draws_nat(s, j);

    ps.mode = chains.draws_nat(mode_row, j);
    double mean = 0.0;
    for (double v : all) mean += v;
    mean /= static_cast<double>(S);
    ps.mean = mean;
    double ss = 0.0;
    for (double v : all) ss += (v - mean) * (v - mean);
    ps.sd = S > 1 ? std::sqrt(ss / static_cast<double>(S - 1)) : 0.0;

    std::vector<double> sorted = all;
    std::sort(sorted.begin(), sorted.end());
    ps.median = (S % 2 == 1)
                    ? sorted[S / 2]
                    : 0.5 * (sorted[S / 2 - 1] + sorted[S / 2]);
    const auto hpd = hpd_interval(all, prob);
    ps.hpd_lower = hpd.first;
    ps.hpd_upper = hpd.second;

    std::vector<std::vector<double>> per_chain(chains.n_chains);
    for (int c = 0; c < chains.n_chains; ++c) {
      per_chain[c].resize(chains.kept);
      for (int t = 0; t < chains.kept; ++t)
        per_chain[c][t] =
            chains.draws_nat(static_cast<Eigen::Index>(c) * chains.kept + t,
                             j);
    }
    ps.n_eff = n_eff(per_chain);
    ps.rhat = chains.n_chains >= 2 ? rhat(per_chain) : kNan;
    ps.se_mean = ps.n_eff > 0.0 ? ps.sd / std::sqrt(ps.n_eff) : kNan;
    summary.parameters.push_back(std::move(ps));
  }

  for (Eigen::Index j = 0; j < chains.p; ++j) {
    ExpSummary es;
    es.name = names[j];
    std::vector<double> ex(S);
    for (Eigen::Index s = 0; s < S; ++s)
      ex[s] = std::exp(chains.draws_nat(s, j));
    double mean = 0.0;
    for (double v : ex) mean += v;
    mean /= static_cast<double>(S);
    es.mean_exp = mean;
    double ss = 0.0;
    for (double v : ex) ss += (v - mean) * (v - mean);
    es.sd_exp = S > 1 ? std::sqrt(ss / static_cast<double>(S - 1)) : 0.0;
    std::vector<double> sorted = ex;
    std::sort(sorted.begin(), sorted.end());
    es.median_exp = (S % 2 == 1)
                        ? sorted[S / 2]
                        : 0.5 * (sorted[S / 2 - 1] + sorted[S / 2]);
    const auto hpd = hpd_interval(ex, prob);
    es.hpd_lower_exp = hpd.first;
    es.hpd_upper_exp = hpd.second;
    summary.exp_block.push_back(std::move(es));
  }

  Criteria crit;
  if (chains.n_obs > 0) {
    const auto [elpd, p_waic, w] = waic(chains.pointwise_loglik);
    crit.elpd_waic = elpd;
    crit.p_waic = p_waic;
    crit.waic = w;
    crit.lpml = lpml(chains.pointwise_loglik);
    crit.neg2_lpml = -2.0 * crit.lpml;
    if (chains.ctx) {
      crit.dic = dic(chains);
      const double dbar_part = crit.dic;  // dic = dbar + p_dic
      crit.p_dic = kNan;
      // Recover p_dic for reporting.
      std::vector<double> dev(S);
      for (Eigen::Index s = 0; s < S; ++s)
        dev[s] = -2.0 * chains.pointwise_loglik.row(s).sum();
      const double dbar = pairwise_sum(dev) / static_cast<double>(S);
      crit.p_dic = dbar_part - dbar;
    } else {
      crit.dic = kNan;
      crit.p_dic = kNan;
    }
    crit.finite = std::isfinite(crit.waic) && std::isfinite(crit.neg2_lpml) &&
                  (!chains.ctx || std::isfinite(crit.dic));
  }
  summary.criteria = crit;
  return summary;
}

}  // namespace bpsurv
