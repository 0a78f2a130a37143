#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcsfit/binglm.hpp"
#include "bcsfit/dgf.hpp"
#include "bcsfit/link.hpp"
#include "bcsfit/optim.hpp"

namespace bcsfit {

/// Response plus regressor matrices for mu (X), sigma (S) and, for
/// zero-adjusted models, the probability of zero (Z).
struct RegressionData {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  Eigen::MatrixXd S;
  std::optional<Eigen::MatrixXd> Z;
  // Column labels; generated when empty.
  std::vector<std::string> x_names, s_names, z_names;

  std::size_t n() const { return static_cast<std::size_t>(y.size()); }
  /// Throws std::invalid_argument on non-conformable sizes or non-finite entries.
  void validate() const;
};

struct ModelSpec {
  DgfFamily family = DgfFamily::make(FamilyTag::BCNO);
  Link mu_link{LinkKind::log};
  Link sigma_link{LinkKind::log};
  Link alpha_link{LinkKind::logit};
  bool lambda_free = true;
  double lambda_value = 0.0;  // used when lambda is fixed
  double zero_threshold = 0.0;
};

struct FitControl {
  optim::Control optimizer;
  bool compute_information = true;
  double information_step = 1e-5;
  BinaryGlmControl glm;
  unsigned threads = 0;  // for grids; 0 = hardware concurrency
};

struct Convergence {
  int iterations = 0;
  double gradient_norm = 0.0;
  optim::Status status = optim::Status::failed;
  int restarts = 0;
  std::string message;
  // Discrete part of zero-adjusted fits.
  int glm_iterations = 0;
  bool glm_converged = true;
  bool separation = false;
};

struct FittedModel {
  ModelSpec spec;
  bool zero_adjusted = false;
  Eigen::VectorXd kappa;  // empty unless zero_adjusted
  Eigen::VectorXd beta;
  Eigen::VectorXd tau;
  double lambda = 0.0;
  double loglik = 0.0;
  double loglik_discrete = 0.0;    // l1(kappa)
  double loglik_continuous = 0.0;  // l2(beta, tau, lambda)
  Eigen::MatrixXd observed_information;
  Eigen::VectorXd std_errors;  // NaN entries when J_n is not positive definite
  bool information_positive_definite = false;
  Convergence convergence;
  Eigen::VectorXd fitted_mu, fitted_sigma, fitted_alpha;  // all n rows
  Eigen::VectorXd leverage;                               // diag(H*), zero-adjusted only
  std::size_t n_obs = 0;
  std::size_t n_zero = 0;
  std::vector<std::string> parameter_names;  // in theta order

  bool lambda_fixed() const { return !spec.lambda_free; }
  std::optional<double> zeta() const { return spec.family.zeta(); }
  bool converged() const { return convergence.status == optim::Status::converged; }
  /// (kappa, beta, tau, lambda); lambda omitted when fixed.
  Eigen::VectorXd theta() const;
  /// (beta, tau, lambda).
  Eigen::VectorXd continuous_theta() const;
  std::size_t n_params() const { return static_cast<std::size_t>(theta().size()); }
};

struct CoefficientRow {
  std::string block;  // kappa, beta, tau, lambda
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;  // NaN when unavailable
  double z_value = 0.0;
  double p_value = 0.0;
};

enum class ZetaCriterion { upsilon, profile_loglik };

struct ZetaRow {
  double zeta = 0.0;
  bool ok = false;
  double loglik = 0.0;
  double upsilon = 0.0;
  optim::Status status = optim::Status::failed;
  std::string message;
};

struct ZetaSelection {
  ZetaCriterion criterion = ZetaCriterion::upsilon;
  std::vector<ZetaRow> rows;
  std::size_t chosen = 0;
  double zeta = 0.0;
};

namespace regress {

/// Number of continuous-part coefficients, p + q (+1 when lambda is free).
std::size_t continuous_size(const RegressionData& data, const ModelSpec& spec);

/// Rows with y above the zero threshold; Z is dropped.
RegressionData positive_subset(const RegressionData& data, double zero_threshold = 0.0);

struct Predictors {
  Eigen::VectorXd mu, sigma;
  double lambda = 0.0;
  bool valid = true;
};
Predictors predict(const Eigen::VectorXd& theta, const Eigen::MatrixXd& X, const Eigen::MatrixXd& S,
                   const ModelSpec& spec);

/// BCS log-likelihood over every row of `data` (all y must be positive). Invalid
/// predictors give -inf. `weights` are optional case weights.
double loglik_bcs(const Eigen::VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                  const Eigen::VectorXd* weights = nullptr);
Eigen::VectorXd score_bcs(const Eigen::VectorXd& theta, const RegressionData& data,
                          const ModelSpec& spec, const Eigen::VectorXd* weights = nullptr);
/// k x n matrix whose column i is the gradient of the i-th log-likelihood term.
Eigen::MatrixXd score_contributions_bcs(const Eigen::VectorXd& theta, const RegressionData& data,
                                        const ModelSpec& spec);

/// Zero-adjusted log-likelihood l1 + l2 with theta = (kappa, beta, tau, lambda).
double loglik_zabcs(const Eigen::VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                    const Eigen::VectorXd* weights = nullptr);
Eigen::VectorXd score_zabcs(const Eigen::VectorXd& theta, const RegressionData& data,
                            const ModelSpec& spec, const Eigen::VectorXd* weights = nullptr);
Eigen::MatrixXd score_contributions_zabcs(const Eigen::VectorXd& theta, const RegressionData& data,
                                          const ModelSpec& spec);

/// Starting values: least squares of d1(y) on X, (tau1, 0, ...) from the
/// quartile-based dispersion, lambda = 0 (or the fixed value).
Eigen::VectorXd init_theta(const RegressionData& data, const ModelSpec& spec);

/// Negative central-difference Jacobian of the score, symmetrised.
Eigen::MatrixXd observed_information(const Eigen::VectorXd& theta, const RegressionData& data,
                                     const ModelSpec& spec, double rel_step = 1e-5);
Eigen::MatrixXd observed_information_zabcs(const Eigen::VectorXd& theta, const RegressionData& data,
                                           const ModelSpec& spec, double rel_step = 1e-5);

/// Throws std::invalid_argument for unusable data; non-convergence is reported
/// through FittedModel::convergence.
FittedModel fit_bcs(const RegressionData& data, const ModelSpec& spec, const FitControl& control = {},
                    const Eigen::VectorXd* start = nullptr);

/// Two-stage fit: binary GLM for I(y = 0) on Z, then BCS on the positive rows.
/// `start` holds the continuous coefficients only.
FittedModel fit_zabcs(const RegressionData& data, const ModelSpec& spec,
                      const FitControl& control = {}, const Eigen::VectorXd* start = nullptr);

/// fit_zabcs when data.Z is present, fit_bcs otherwise.
FittedModel fit(const RegressionData& data, const ModelSpec& spec, const FitControl& control = {},
                const Eigen::VectorXd* start = nullptr);

/// Model evaluated at a given theta (kappa first when data.Z is present)
/// without optimising. Convergence is left as reported by the caller.
FittedModel model_at(const RegressionData& data, const ModelSpec& spec,
                     const Eigen::VectorXd& theta, bool compute_information = true,
                     double rel_step = 1e-5);

/// Fits the model at each grid value (concurrently) and picks the minimiser
/// of Upsilon or the maximiser of the profile log-likelihood. Ties go to the
/// smaller zeta. Throws when every fit fails.
ZetaSelection select_zeta(const RegressionData& data, const ModelSpec& spec,
                          const std::vector<double>& grid,
                          ZetaCriterion criterion = ZetaCriterion::upsilon,
                          const FitControl& control = {});

/// Estimate, SE, z and two-sided normal p-value per coefficient.
std::vector<CoefficientRow> wald_inference(const FittedModel& fit);

}  // namespace regress
}  // namespace bcsfit
