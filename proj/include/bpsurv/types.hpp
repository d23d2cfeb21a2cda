#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace bpsurv {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class ErrorCode {
  MissingColumn,
  NonPositiveTime,
  InvalidStatus,
  UnparseableCell,
  UnknownReference,
  ZeroVariance,
  OutOfRange,
  NonFiniteTarget,
  DimensionMismatch,
  NonFiniteLikelihood,
  InvalidParameter,
  AllRestartsFailed,
  NonFiniteHessian,
  IntervalsUnavailable,
  SingularBlock,
  NonFiniteInitialPoint,
  DegenerateData,
  TooFewSamples,
  InsufficientChains,
  CovariateMismatch,
  EmptyData,
  LengthMismatch,
  ZeroReference,
  InvalidConfig,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

enum class ModelKind { PH, PO, AFT };

inline const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::PH: return "ph";
    case ModelKind::PO: return "po";
    case ModelKind::AFT: return "aft";
  }
  return "?";
}

// Right-censored survival data: observed times, event indicators and the
// covariate matrix. Immutable after construction; safe to share across
// threads.
struct SurvivalDataset {
  VectorXd times;                         // observed times, all > 0
  std::vector<int> status;                // 1 = event, 0 = right-censored
  MatrixXd design;                        // n x p
  std::vector<std::string> column_names;  // p labels

  Eigen::Index n() const { return times.size(); }
  Eigen::Index p() const { return design.cols(); }
  int events() const {
    int r = 0;
    for (int s : status) r += s;
    return r;
  }

  void validate() const;
};

// Column means and sample standard deviations applied by standardize().
struct StandardizationParams {
  VectorXd means;
  VectorXd sds;

  bool is_identity() const {
    return means.size() == 0 ||
           (means.isZero(0.0) && (sds.array() == 1.0).all());
  }
};

// Regression coefficients plus the baseline shape coefficients stored on the
// log scale, so that exp(log_bp) > 0 always holds.
struct ParameterVector {
  VectorXd beta;    // p regression coefficients
  VectorXd log_bp;  // m log baseline coefficients

  Eigen::Index p() const { return beta.size(); }
  Eigen::Index m() const { return log_bp.size(); }
  Eigen::Index size() const { return p() + m(); }

  VectorXd bp() const { return log_bp.array().exp(); }

  VectorXd packed() const {
    VectorXd out(size());
    out << beta, log_bp;
    return out;
  }

  static ParameterVector unpack(const VectorXd& x, Eigen::Index p) {
    ParameterVector v;
    v.beta = x.head(p);
    v.log_bp = x.tail(x.size() - p);
    return v;
  }
};

// Scale/shape/regression parameters of the parametric reference models.
struct ParametricParams {
  double scale = 1.0;
  double shape = 1.0;
  VectorXd beta;
};

}  // namespace bpsurv
