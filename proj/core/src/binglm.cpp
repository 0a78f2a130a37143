#include "bcsfit/binglm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bcsfit {
namespace {

// Keeps fitted probabilities strictly inside (0, 1) during iteration.
constexpr double kProbFloor = 1e-15;

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta, const Link& link) {
  Eigen::VectorXd a(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    a[i] = std::clamp(link.inverse(eta[i]), kProbFloor, 1.0 - kProbFloor);
  }
  return a;
}

void check_inputs(const Eigen::VectorXd& indicator, const Eigen::MatrixXd& Z) {
  if (indicator.size() != Z.rows()) throw std::invalid_argument("binary GLM: size mismatch");
  for (Eigen::Index i = 0; i < indicator.size(); ++i) {
    if (indicator[i] != 0.0 && indicator[i] != 1.0) {
      throw std::invalid_argument("binary GLM: indicator must be 0 or 1");
    }
  }
}

}  // namespace

namespace binglm {

double loglik(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
              const Eigen::MatrixXd& Z, const Link& link, const Eigen::VectorXd* weights) {
  const Eigen::VectorXd eta = Z * kappa;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double a = link.inverse(eta[i]);
    if (!(a > 0.0 && a < 1.0)) return -std::numeric_limits<double>::infinity();
    const double term = indicator[i] == 1.0 ? std::log(a) : std::log1p(-a);
    sum += weights ? (*weights)[i] * term : term;
  }
  return sum;
}

Eigen::MatrixXd score_contributions(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
                                   const Eigen::MatrixXd& Z, const Link& link) {
  const Eigen::VectorXd eta = Z * kappa;
  Eigen::MatrixXd out(Z.cols(), Z.rows());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double a = link.inverse(eta[i]);
    const double c = (indicator[i] - a) / (a * (1.0 - a) * link.derivative(a));
    out.col(i) = c * Z.row(i).transpose();
  }
  return out;
}

Eigen::VectorXd score(const Eigen::VectorXd& kappa, const Eigen::VectorXd& indicator,
                      const Eigen::MatrixXd& Z, const Link& link, const Eigen::VectorXd* weights) {
  const Eigen::MatrixXd c = score_contributions(kappa, indicator, Z, link);
  return weights ? Eigen::VectorXd(c * *weights) : Eigen::VectorXd(c.rowwise().sum());
}

Eigen::VectorXd working_weights(const Eigen::VectorXd& alpha, const Link& link) {
  Eigen::VectorXd q(alpha.size());
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double d = link.derivative(alpha[i]);
    q[i] = 1.0 / (alpha[i] * (1.0 - alpha[i]) * d * d);
  }
  return q;
}

}  // namespace binglm

BinaryGlmFit fit_binary_glm(const Eigen::VectorXd& indicator, const Eigen::MatrixXd& Z,
                            const Link& link, const BinaryGlmControl& control) {
  if (!link.for_probability()) throw std::invalid_argument("binary GLM: link must map (0, 1)");
  check_inputs(indicator, Z);
  const double ones = indicator.sum();
  if (ones == 0.0 || ones == static_cast<double>(indicator.size())) {
    throw std::invalid_argument("binary GLM: both outcome classes must be present");
  }
  const Eigen::Index n = Z.rows();
  const Eigen::Index m = Z.cols();
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
    if (qr.rank() < m) throw std::invalid_argument("binary GLM: Z is rank deficient");
  }

  // Start from the mean-adjusted observation, as glm() does.
  Eigen::VectorXd eta(n);
  for (Eigen::Index i = 0; i < n; ++i) eta[i] = link.apply((indicator[i] + 0.5) / 2.0);
  Eigen::VectorXd kappa = Z.colPivHouseholderQr().solve(eta);

  BinaryGlmFit fit;
  double ll = binglm::loglik(kappa, indicator, Z, link);
  for (int it = 0; it < control.max_iterations; ++it) {
    eta = Z * kappa;
    const Eigen::VectorXd a = probabilities(eta, link);
    Eigen::VectorXd w(n), work(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = link.derivative(a[i]);
      w[i] = 1.0 / (a[i] * (1.0 - a[i]) * d * d);
      work[i] = eta[i] + (indicator[i] - a[i]) * d;
    }
    const Eigen::MatrixXd zw = Z.transpose() * w.asDiagonal();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(zw * Z);
    Eigen::VectorXd proposal = ldlt.solve(zw * work);

    const Eigen::VectorXd grad = binglm::score(kappa, indicator, Z, link);
    fit.gradient_norm = grad.cwiseAbs().maxCoeff();
    fit.iterations = it;
    if (fit.gradient_norm <= control.gradient_tolerance) {
      fit.converged = true;
      break;
    }

    // Step-halving until the likelihood does not decrease. Near the optimum
    // the change is below rounding, so allow a few ulps of slack.
    Eigen::VectorXd step = proposal - kappa;
    double next_ll = binglm::loglik(proposal, indicator, Z, link);
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    int halvings = 0;
    while (!(next_ll >= ll - slack) && halvings < 30) {
      step *= 0.5;
      proposal = kappa + step;
      next_ll = binglm::loglik(proposal, indicator, Z, link);
      ++halvings;
    }
    if (!(next_ll >= ll - slack)) break;
    const bool stalled = step.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + kappa.cwiseAbs().maxCoeff());
    kappa = proposal;
    ll = next_ll;
    fit.iterations = it + 1;
    if (stalled) {
      fit.gradient_norm = binglm::score(kappa, indicator, Z, link).cwiseAbs().maxCoeff();
      fit.converged = fit.gradient_norm <= control.gradient_tolerance;
      break;
    }
  }
  if (!fit.converged) {
    fit.gradient_norm = binglm::score(kappa, indicator, Z, link).cwiseAbs().maxCoeff();
    fit.converged = fit.gradient_norm <= control.gradient_tolerance;
  }

  fit.kappa = kappa;
  fit.eta = Z * kappa;
  fit.fitted_alpha = probabilities(fit.eta, link);
  fit.loglik = binglm::loglik(kappa, indicator, Z, link);
  fit.separation = fit.eta.cwiseAbs().maxCoeff() > control.separation_threshold;
  const Eigen::VectorXd q = binglm::working_weights(fit.fitted_alpha, link);
  fit.information = Z.transpose() * q.asDiagonal() * Z;
  fit.leverage = leverage_hstar(fit, Z, link);
  return fit;
}

Eigen::VectorXd leverage_hstar(const BinaryGlmFit& fit, const Eigen::MatrixXd& Z, const Link& link) {
  const Eigen::VectorXd q = binglm::working_weights(fit.fitted_alpha, link);
  const Eigen::MatrixXd zq = q.cwiseSqrt().asDiagonal() * Z;
  // Thin QR of Q^{1/2} Z: H* = Q_thin Q_thin', so h_ii is a squared row norm.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(zq);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> rank_check(zq);
  if (rank_check.rank() < Z.cols()) throw std::runtime_error("leverage: Z' Q Z is singular");
  const Eigen::MatrixXd thin =
      qr.householderQ() * Eigen::MatrixXd::Identity(Z.rows(), Z.cols());
  return thin.rowwise().squaredNorm();
}

}  // namespace bcsfit
