#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcsfit/regress.hpp"
#include "bcsfit/specfun.hpp"

namespace bcsfit {

enum class ResidualKind { quantile, randomized_quantile, pearson };
std::string_view residual_kind_name(ResidualKind kind);

struct ResidualSet {
  ResidualKind kind = ResidualKind::quantile;
  Eigen::VectorXd values;
  std::vector<std::size_t> rows;            // data row of each value
  std::vector<std::size_t> extreme_tail;    // rows whose CDF hit 0 or 1 and were clamped
  std::size_t realization = 0;
};

struct EnvelopeOptions {
  std::size_t replicates = 100;
  double level = 0.95;
  std::uint64_t seed = 1;
  bool refit = true;  // false: residuals of simulated data under the fitted law
  unsigned threads = 0;
  FitControl control;
};

struct Envelope {
  Eigen::VectorXd expected;  // normal order-statistic means
  Eigen::VectorXd observed;  // ordered quantile residuals of the data
  Eigen::VectorXd lower, median, upper;
  std::size_t outside = 0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  double level = 0.95;
};

struct InfluenceResult {
  Eigen::VectorXd dmax;  // unit norm, largest-magnitude entry positive
  double cdmax = 0.0;    // 2 * max |eigenvalue(B)|
  Eigen::VectorXd Ci;
  std::optional<Eigen::MatrixXd> B;
};

struct GofReport {
  std::string label;
  double loglik = 0.0;
  std::size_t n_params = 0;            // zeta excluded
  std::size_t n_params_with_zeta = 0;  // zeta counted when the family has one
  double aic = 0.0;
  double aic_with_zeta = 0.0;
  double delta_m = 0.0;
  double delta_m_with_zeta = 0.0;
  double upsilon = 0.0;
};

namespace diagnostics {

/// Residuals beyond this are reported as clamped when the CDF rounds to 0 or 1.
inline constexpr double kResidualClamp = 8.2;

/// Phi^{-1}(F(y_i)) over the positive rows of the fit.
ResidualSet quantile_residuals(const FittedModel& fit, const RegressionData& data);

/// Zeros map to Phi^{-1}(U), U ~ Uniform(0, alpha_i]; positives to
/// Phi^{-1}(alpha_i + (1 - alpha_i) F(y_i)). Realization r draws from mix_seed(seed, r).
std::vector<ResidualSet> randomized_quantile_residuals(const FittedModel& fit,
                                                       const RegressionData& data,
                                                       std::size_t realizations = 4,
                                                       std::uint64_t seed = 1);

/// Standardised Pearson residuals of the discrete part; NaN where h_ii = 1.
ResidualSet pearson_residuals(const FittedModel& fit, const RegressionData& data);

/// Mean absolute gap between sorted quantile residuals and normal order-statistic means.
double upsilon(const FittedModel& fit, const RegressionData& data,
               specfun::OrderStatMethod method = specfun::OrderStatMethod::blom);

/// Band index convention: lower = k-th smallest, upper = k-th largest with
/// k = max(1, floor((B + 1)(1 - level) / 2)).
Envelope simulated_envelope(const FittedModel& fit, const RegressionData& data,
                            const EnvelopeOptions& options = {});

/// Per-observation score contributions at the estimate, (params x n).
Eigen::MatrixXd caseweight_delta(const FittedModel& fit, const RegressionData& data);

/// Case-weight local influence. Throws std::runtime_error if J_n is not positive definite.
InfluenceResult local_influence(const FittedModel& fit, const RegressionData& data,
                                bool materialize_b = false);

double aic(double loglik, std::size_t n_params);

/// Throws std::invalid_argument if a fit was not made on `data`.
std::vector<GofReport> gof_report(const std::vector<const FittedModel*>& fits,
                                  const RegressionData& data);

}  // namespace diagnostics
}  // namespace bcsfit
