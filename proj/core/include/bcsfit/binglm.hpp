#pragma once

#include <Eigen/Dense>

#include "bcsfit/link.hpp"

namespace bcsfit {

struct BinaryGlmControl {
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
  double separation_threshold = 30.0;  // on |eta|
};

struct BinaryGlmFit {
  Eigen::VectorXd kappa;
  Eigen::VectorXd eta;
  Eigen::VectorXd fitted_alpha;
  Eigen::MatrixXd information;  // Z' Q Z
  Eigen::VectorXd leverage;     // diag(H*)
  double loglik = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separation = false;
};

namespace binglm {

/// sum_i w_i [I_i log alpha_i + (1 - I_i) log(1 - alpha_i)]. `weights` may be null.
double loglik(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
              const Eigen::MatrixXd& Z, const Link& link, const Eigen::VectorXd* weights = nullptr);

/// Per-observation score columns, m x n: z_i (I_i - alpha_i) / (alpha_i (1 - alpha_i) d'(alpha_i)).
Eigen::MatrixXd score_contributions(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
                                   const Eigen::MatrixXd& Z, const Link& link);

Eigen::VectorXd score(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
                      const Eigen::MatrixXd& Z, const Link& link,
                      const Eigen::VectorXd* weights = nullptr);

/// q_i = 1 / (alpha_i (1 - alpha_i) d'(alpha_i)^2).
Eigen::VectorXd working_weights(const Eigen::VectorXd& alpha, const Link& link);

}  // namespace binglm

/// IRLS with step-halving for a Bernoulli response on Z with link d0.
/// Throws std::invalid_argument when a class is absent or Z is rank deficient.
BinaryGlmFit fit_binary_glm(const Eigen::VectorXd& indicator, const Eigen::MatrixXd& Z,
                            const Link& link, const BinaryGlmControl& control = {});

/// Diagonal of Q^{1/2} Z (Z' Q Z)^{-1} Z' Q^{1/2} at the fitted probabilities.
Eigen::VectorXd leverage_hstar(const BinaryGlmFit& fit, const Eigen::MatrixXd& Z, const Link& link);

}  // namespace bcsfit
