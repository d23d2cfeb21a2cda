#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bpsurv/bayes.hpp"
#include "bpsurv/mle.hpp"
#include "bpsurv/rng.hpp"
#include "bpsurv/types.hpp"

namespace bpsurv {

// Data-generating model: accelerated failure times from a Weibull or
// log-logistic baseline, with an independent censoring time drawn from the
// same family at a fixed scale. Covariates: one standard normal, one
// balanced binary indicator.
struct GeneratorSettings {
  ParametricFamily family = ParametricFamily::WAFT;
  VectorXd beta = (VectorXd(2) << 2.0, -1.0).finished();
  double shape = 2.0;
  double baseline_scale = 10.0;
  double censor_scale = 1.4;
  double censor_shape = 2.0;
  Eigen::Index n = 100;

  void validate() const;
};

// Inverse-transform draws of failure times for each row of the design.
VectorXd its_sample_waft(const GeneratorSettings& settings,
                         const MatrixXd& design, RngStream& rng);
VectorXd its_sample_llaft(const GeneratorSettings& settings,
                          const MatrixXd& design, RngStream& rng);

// Single inverse-transform draw at a given scale/shape from u in (0,1).
double its_invert(ParametricFamily family, double scale, double shape,
                  double u);

std::pair<VectorXd, std::vector<int>> apply_censoring(
    const VectorXd& failure_times, const VectorXd& censor_times);

struct GeneratedData {
  SurvivalDataset data;
  double censor_rate = 0.0;
};

GeneratedData generate_dataset(const GeneratorSettings& settings,
                               std::uint64_t seed,
                               std::uint64_t replication = 0);

// Tunes censor_scale so that the empirical censoring fraction hits the
// target; bisection on a large probe sample.
double calibrate_censor_scale(const GeneratorSettings& settings,
                              double target_rate, Eigen::Index probe_n = 20000,
                              std::uint64_t seed = 7);

enum class FitTarget { Generator, BPPH, BPPO, BPAFT };
enum class FitApproach { MLE, Bayes };

struct PlanEntry {
  FitTarget target = FitTarget::Generator;
  FitApproach approach = FitApproach::MLE;
  std::optional<int> degree;
  MlOptions ml;
  PriorSpec priors;
  McmcConfig mcmc;
  std::string label() const;
};

// What "truth" means for a plan entry: the generator's own coefficients for
// AFT-type fits, or those multiplied by -shape for PH/PO fits.
VectorXd plan_truth(const PlanEntry& entry, const GeneratorSettings& settings);

struct CoefStats {
  std::string name;
  double truth = 0.0;
  double est = 0.0;       // average estimate
  double se = 0.0;        // average estimated standard error / posterior sd
  double sde = 0.0;       // mean squared deviation of the estimates
  double sde_root = 0.0;  // its square root (sd of the estimates)
  double rb = 0.0;        // relative bias, percent
  double coverage = 0.0;  // fraction of 95% intervals containing truth
};

struct ReplicationRow {
  int replication = 0;
  std::vector<double> estimate;
  std::vector<double> se;
  std::vector<double> ci_lower;
  std::vector<double> ci_upper;
  bool converged = false;
  bool hessian_finite = false;
  bool valid = false;
  double censor_rate = 0.0;
};

struct McReport {
  std::string plan_label;
  std::vector<CoefStats> coefficients;
  int R_requested = 0;
  int R_valid = 0;
  int n_nonconverged = 0;
  int n_nonfinite_hessian = 0;
  // min, q1, mean, median, q3, max of the per-replication censoring rate
  std::vector<double> censor_rate_summary;
  std::vector<ReplicationRow> rows;
};

std::vector<McReport> mc_harness(const GeneratorSettings& settings,
                                 const std::vector<PlanEntry>& plan, int R,
                                 std::uint64_t seed);

double relative_difference(double estimate, double reference);

}  // namespace bpsurv
