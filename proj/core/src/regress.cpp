#include "bcsfit/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "bcsfit/bcs.hpp"
#include "bcsfit/diagnostics.hpp"
#include "bcsfit/parallel.hpp"
#include "bcsfit/specfun.hpp"
#include "bcsfit/zabcs.hpp"

namespace bcsfit {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index p_of(const RegressionData& d) { return d.X.cols(); }
Index q_of(const RegressionData& d) { return d.S.cols(); }
Index m_of(const RegressionData& d) { return d.Z ? d.Z->cols() : 0; }

// Per-observation pieces of the score.
struct ScoreTerms {
  double mu_star = 0.0;
  double sigma_star = 0.0;
  double lambda_star = 0.0;
};

ScoreTerms score_terms(double y, double mu, double sigma, double lambda, const DgfFamily& family,
                       double xi) {
  const BcsParams p{mu, sigma, lambda};
  const double log_ratio = std::log(y / mu);
  const double z = bcs::transform_z(y, p);
  const double zv = dgf::z_score_weight(family, z);
  ScoreTerms t;
  t.mu_star = -lambda / mu + (z * sigma * lambda + 1.0) * zv / (mu * sigma);
  t.sigma_star = -1.0 / sigma + z * zv / sigma;
  t.lambda_star = log_ratio - zv * bcs::dz_dlambda(y, p);
  if (lambda != 0.0) {
    t.sigma_star += xi / (std::abs(lambda) * sigma * sigma);
    t.lambda_star += (lambda > 0.0 ? 1.0 : -1.0) * xi / (sigma * lambda * lambda);
  }
  return t;
}

void require_positive_rows(const RegressionData& data) {
  for (Index i = 0; i < data.y.size(); ++i) {
    if (!(data.y[i] > 0.0)) {
      throw std::invalid_argument("BCS log-likelihood requires positive responses");
    }
  }
}

std::vector<std::string> labels(const std::vector<std::string>& given, Index count,
                                const std::string& fallback) {
  if (static_cast<Index>(given.size()) == count) return given;
  std::vector<std::string> out;
  for (Index j = 0; j < count; ++j) out.push_back(fallback + "[" + std::to_string(j) + "]");
  return out;
}

void check_rank(const MatrixXd& M, const char* what) {
  if (M.cols() == 0) {
    throw std::invalid_argument(std::string(what) + " needs at least one column");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(M);
  if (qr.rank() < M.cols()) {
    throw std::invalid_argument(std::string(what) + " is not of full column rank");
  }
}

// Sample quantile, linear interpolation between order statistics.
double sample_quantile(std::vector<double> sorted, double prob) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void fill_information(FittedModel& fit, const MatrixXd& info) {
  fit.observed_information = info;
  const Index k = info.rows();
  fit.std_errors = VectorXd::Constant(k, kNaN);
  fit.information_positive_definite = false;
  if (k == 0 || !info.allFinite()) return;
  Eigen::LLT<MatrixXd> llt(info);
  if (llt.info() != Eigen::Success) return;
  const MatrixXd inv = llt.solve(MatrixXd::Identity(k, k));
  for (Index j = 0; j < k; ++j) fit.std_errors[j] = inv(j, j) > 0.0 ? std::sqrt(inv(j, j)) : kNaN;
  fit.information_positive_definite = true;
}

std::vector<std::string> continuous_names(const RegressionData& data, const ModelSpec& spec) {
  std::vector<std::string> names;
  for (const auto& s : labels(data.x_names, p_of(data), "beta")) names.push_back("mu:" + s);
  for (const auto& s : labels(data.s_names, q_of(data), "tau")) names.push_back("sigma:" + s);
  if (spec.lambda_free) names.push_back("lambda");
  return names;
}

}  // namespace

void RegressionData::validate() const {
  const Index n = y.size();
  if (n == 0) throw std::invalid_argument("no observations");
  if (X.rows() != n || S.rows() != n || (Z && Z->rows() != n)) {
    throw std::invalid_argument("design matrices must have one row per observation");
  }
  if (!y.allFinite() || !X.allFinite() || !S.allFinite() || (Z && !Z->allFinite())) {
    throw std::invalid_argument("data contain non-finite values");
  }
}

VectorXd FittedModel::continuous_theta() const {
  VectorXd t(beta.size() + tau.size() + (spec.lambda_free ? 1 : 0));
  t << beta, tau, VectorXd::Constant(spec.lambda_free ? 1 : 0, lambda);
  return t;
}

VectorXd FittedModel::theta() const {
  const VectorXd c = continuous_theta();
  VectorXd t(kappa.size() + c.size());
  t << kappa, c;
  return t;
}

namespace regress {

std::size_t continuous_size(const RegressionData& data, const ModelSpec& spec) {
  return static_cast<std::size_t>(p_of(data) + q_of(data) + (spec.lambda_free ? 1 : 0));
}

RegressionData positive_subset(const RegressionData& data, double zero_threshold) {
  std::vector<Index> keep;
  for (Index i = 0; i < data.y.size(); ++i) {
    if (!zabcs::is_zero(data.y[i], zero_threshold)) keep.push_back(i);
  }
  RegressionData out;
  const auto k = static_cast<Index>(keep.size());
  out.y.resize(k);
  out.X.resize(k, data.X.cols());
  out.S.resize(k, data.S.cols());
  for (Index r = 0; r < k; ++r) {
    out.y[r] = data.y[keep[r]];
    out.X.row(r) = data.X.row(keep[r]);
    out.S.row(r) = data.S.row(keep[r]);
  }
  out.x_names = data.x_names;
  out.s_names = data.s_names;
  return out;
}

Predictors predict(const VectorXd& theta, const MatrixXd& X, const MatrixXd& S,
                   const ModelSpec& spec) {
  const Index p = X.cols();
  const Index q = S.cols();
  Predictors out;
  out.lambda = spec.lambda_free ? theta[p + q] : spec.lambda_value;
  const VectorXd eta1 = X * theta.head(p);
  const VectorXd eta2 = S * theta.segment(p, q);
  out.mu.resize(X.rows());
  out.sigma.resize(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    out.mu[i] = spec.mu_link.inverse(eta1[i]);
    out.sigma[i] = spec.sigma_link.inverse(eta2[i]);
    if (!(out.mu[i] > 0.0 && std::isfinite(out.mu[i]) && out.sigma[i] > 0.0 &&
          std::isfinite(out.sigma[i]))) {
      out.valid = false;
    }
  }
  if (!std::isfinite(out.lambda)) out.valid = false;
  return out;
}

double loglik_bcs(const VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                  const VectorXd* weights) {
  require_positive_rows(data);
  const Predictors pr = predict(theta, data.X, data.S, spec);
  if (!pr.valid) return kNegInf;
  double sum = 0.0;
  for (Index i = 0; i < data.y.size(); ++i) {
    const double li = bcs::log_pdf(data.y[i], {pr.mu[i], pr.sigma[i], pr.lambda}, spec.family);
    sum += weights ? (*weights)[i] * li : li;
  }
  return std::isfinite(sum) ? sum : kNegInf;
}

MatrixXd score_contributions_bcs(const VectorXd& theta, const RegressionData& data,
                                 const ModelSpec& spec) {
  require_positive_rows(data);
  const Index p = p_of(data);
  const Index q = q_of(data);
  const Index k = static_cast<Index>(continuous_size(data, spec));
  const Predictors pr = predict(theta, data.X, data.S, spec);
  MatrixXd out(k, data.y.size());
  if (!pr.valid) {
    out.setConstant(kNaN);
    return out;
  }
  for (Index i = 0; i < data.y.size(); ++i) {
    const double xi = bcs::truncation_ratio(pr.sigma[i], pr.lambda, spec.family);
    const ScoreTerms t =
        score_terms(data.y[i], pr.mu[i], pr.sigma[i], pr.lambda, spec.family, xi);
    const double t1 = 1.0 / spec.mu_link.derivative(pr.mu[i]);
    const double t2 = 1.0 / spec.sigma_link.derivative(pr.sigma[i]);
    out.col(i).head(p) = (t1 * t.mu_star) * data.X.row(i).transpose();
    out.col(i).segment(p, q) = (t2 * t.sigma_star) * data.S.row(i).transpose();
    if (spec.lambda_free) out(p + q, i) = t.lambda_star;
  }
  return out;
}

VectorXd score_bcs(const VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                   const VectorXd* weights) {
  const MatrixXd c = score_contributions_bcs(theta, data, spec);
  return weights ? VectorXd(c * *weights) : VectorXd(c.rowwise().sum());
}

namespace {

struct ZabcsView {
  VectorXd indicator;
  RegressionData positive;
  std::vector<Index> positive_rows;
};

ZabcsView split(const RegressionData& data, const ModelSpec& spec) {
  if (!data.Z) throw std::invalid_argument("zero-adjusted model requires an alpha design");
  ZabcsView v;
  v.indicator.resize(data.y.size());
  for (Index i = 0; i < data.y.size(); ++i) {
    if (data.y[i] < 0.0) throw std::invalid_argument("responses must be nonnegative");
    const bool zero = zabcs::is_zero(data.y[i], spec.zero_threshold);
    v.indicator[i] = zero ? 1.0 : 0.0;
    if (!zero) v.positive_rows.push_back(i);
  }
  v.positive = positive_subset(data, spec.zero_threshold);
  return v;
}

VectorXd subset(const VectorXd* weights, const std::vector<Index>& rows) {
  VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) out[static_cast<Index>(r)] = (*weights)[rows[r]];
  return out;
}

}  // namespace

double loglik_zabcs(const VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                    const VectorXd* weights) {
  const ZabcsView v = split(data, spec);
  const Index m = m_of(data);
  const double l1 = binglm::loglik(theta.head(m), v.indicator, *data.Z, spec.alpha_link, weights);
  VectorXd w2;
  if (weights) w2 = subset(weights, v.positive_rows);
  const double l2 =
      loglik_bcs(theta.tail(theta.size() - m), v.positive, spec, weights ? &w2 : nullptr);
  return l1 + l2;
}

MatrixXd score_contributions_zabcs(const VectorXd& theta, const RegressionData& data,
                                   const ModelSpec& spec) {
  const ZabcsView v = split(data, spec);
  const Index m = m_of(data);
  const Index k = theta.size();
  MatrixXd out = MatrixXd::Zero(k, data.y.size());
  out.topRows(m) = binglm::score_contributions(theta.head(m), v.indicator, *data.Z, spec.alpha_link);
  const MatrixXd c = score_contributions_bcs(theta.tail(k - m), v.positive, spec);
  for (std::size_t r = 0; r < v.positive_rows.size(); ++r) {
    out.col(v.positive_rows[r]).tail(k - m) = c.col(static_cast<Index>(r));
  }
  return out;
}

VectorXd score_zabcs(const VectorXd& theta, const RegressionData& data, const ModelSpec& spec,
                     const VectorXd* weights) {
  const MatrixXd c = score_contributions_zabcs(theta, data, spec);
  return weights ? VectorXd(c * *weights) : VectorXd(c.rowwise().sum());
}

VectorXd init_theta(const RegressionData& data, const ModelSpec& spec) {
  const Index p = p_of(data);
  const Index q = q_of(data);
  VectorXd theta = VectorXd::Zero(static_cast<Index>(continuous_size(data, spec)));
  VectorXd upsilon(data.y.size());
  for (Index i = 0; i < data.y.size(); ++i) upsilon[i] = spec.mu_link.apply(data.y[i]);
  Eigen::ColPivHouseholderQR<MatrixXd> qr(data.X);
  if (qr.rank() < p) throw std::invalid_argument("X'X is singular: mu design is rank deficient");
  theta.head(p) = qr.solve(upsilon);

  std::vector<double> sorted(data.y.data(), data.y.data() + data.y.size());
  std::sort(sorted.begin(), sorted.end());
  const double q1 = sample_quantile(sorted, 0.25);
  const double q2 = sample_quantile(sorted, 0.5);
  const double q3 = sample_quantile(sorted, 0.75);
  const double cv = 0.75 * (q3 - q1) / q2;
  if (q > 0) theta[p] = std::asinh(cv / 1.5) / specfun::std_normal_quantile(0.75);
  if (spec.lambda_free) theta[p + q] = 0.0;
  return theta;
}

MatrixXd observed_information(const VectorXd& theta, const RegressionData& data,
                              const ModelSpec& spec, double rel_step) {
  const optim::GradientFn g = [&](const VectorXd& x) { return score_bcs(x, data, spec); };
  return -optim::numeric_hessian(g, theta, rel_step);
}

MatrixXd observed_information_zabcs(const VectorXd& theta, const RegressionData& data,
                                    const ModelSpec& spec, double rel_step) {
  const optim::GradientFn g = [&](const VectorXd& x) { return score_zabcs(x, data, spec); };
  return -optim::numeric_hessian(g, theta, rel_step);
}

namespace {

// Continuous-part fit on rows that are all positive.
FittedModel fit_positive(const RegressionData& data, const ModelSpec& spec,
                         const FitControl& control, const VectorXd* start) {
  const Index n = data.y.size();
  const auto k = static_cast<Index>(continuous_size(data, spec));
  if (n <= k) {
    throw std::invalid_argument("need more positive observations than continuous parameters");
  }
  check_rank(data.X, "mu design");
  check_rank(data.S, "sigma design");

  const VectorXd theta0 = start ? *start : init_theta(data, spec);
  if (theta0.size() != k) throw std::invalid_argument("starting vector has the wrong length");
  const optim::Objective objective = [&](const VectorXd& x, VectorXd* grad) {
    const double v = loglik_bcs(x, data, spec);
    if (grad && std::isfinite(v)) *grad = score_bcs(x, data, spec);
    return v;
  };
  const optim::Result res = optim::maximize(objective, theta0, control.optimizer);

  FittedModel fit;
  fit.spec = spec;
  const Index p = p_of(data);
  const Index q = q_of(data);
  fit.beta = res.x.head(p);
  fit.tau = res.x.segment(p, q);
  fit.lambda = spec.lambda_free ? res.x[p + q] : spec.lambda_value;
  fit.loglik_continuous = res.value;
  fit.loglik = res.value;
  fit.convergence.iterations = res.iterations;
  fit.convergence.gradient_norm = res.gradient_norm;
  fit.convergence.status = res.status;
  fit.convergence.restarts = res.restarts;
  fit.convergence.message = res.message;
  if (control.compute_information && std::isfinite(res.value)) {
    fill_information(fit, observed_information(res.x, data, spec, control.information_step));
  }
  fit.parameter_names = continuous_names(data, spec);
  return fit;
}

}  // namespace

FittedModel fit_bcs(const RegressionData& data, const ModelSpec& spec, const FitControl& control,
                    const VectorXd* start) {
  data.validate();
  for (Index i = 0; i < data.y.size(); ++i) {
    if (zabcs::is_zero(data.y[i], spec.zero_threshold) || data.y[i] == 0.0) {
      throw std::invalid_argument(
          "zeros require a third formula part (zero-adjusted model); the BCS density excludes 0");
    }
    if (data.y[i] < 0.0) throw std::invalid_argument("responses must be positive");
  }
  if (!spec.lambda_free && !std::isfinite(spec.lambda_value)) {
    throw std::invalid_argument("fixed lambda must be finite");
  }
  FittedModel fit = fit_positive(data, spec, control, start);
  ModelSpec fixed = spec;
  fixed.lambda_free = false;
  const Predictors pr =
      predict(fit.continuous_theta().head(p_of(data) + q_of(data)), data.X, data.S, fixed);
  fit.fitted_mu = pr.mu;
  fit.fitted_sigma = pr.sigma;
  fit.n_obs = data.n();
  return fit;
}

FittedModel fit_zabcs(const RegressionData& data, const ModelSpec& spec, const FitControl& control,
                      const VectorXd* start) {
  data.validate();
  if (!data.Z) throw std::invalid_argument("zero-adjusted fit requires an alpha formula part");
  const ZabcsView v = split(data, spec);
  const auto zeros = static_cast<std::size_t>(v.indicator.sum());
  if (zeros == 0) {
    throw std::invalid_argument("no zero responses: fit a plain BCS model (two formula parts)");
  }
  if (v.positive_rows.empty()) throw std::invalid_argument("no positive responses to fit");
  const Index m = m_of(data);
  if (static_cast<Index>(data.n()) <= m + static_cast<Index>(continuous_size(data, spec))) {
    throw std::invalid_argument("need more observations than parameters");
  }

  const BinaryGlmFit glm = fit_binary_glm(v.indicator, *data.Z, spec.alpha_link, control.glm);
  FittedModel fit = fit_positive(v.positive, spec, control, start);
  fit.zero_adjusted = true;
  fit.kappa = glm.kappa;
  fit.loglik_discrete = glm.loglik;
  fit.loglik = glm.loglik + fit.loglik_continuous;
  fit.fitted_alpha = glm.fitted_alpha;
  fit.leverage = glm.leverage;
  fit.convergence.glm_iterations = glm.iterations;
  fit.convergence.glm_converged = glm.converged;
  fit.convergence.separation = glm.separation;
  if (!glm.converged && fit.convergence.status == optim::Status::converged) {
    fit.convergence.status = optim::Status::failed;
    fit.convergence.message = "binary component did not converge";
  }
  if (control.compute_information && std::isfinite(fit.loglik)) {
    fill_information(fit, observed_information_zabcs(fit.theta(), data, spec,
                                                     control.information_step));
  }
  std::vector<std::string> names;
  for (const auto& s : labels(data.z_names, m, "kappa")) names.push_back("alpha:" + s);
  for (const auto& s : fit.parameter_names) names.push_back(s);
  fit.parameter_names = std::move(names);

  ModelSpec fixed = spec;
  fixed.lambda_free = false;
  const Predictors pr =
      predict(fit.continuous_theta().head(p_of(data) + q_of(data)), data.X, data.S, fixed);
  fit.fitted_mu = pr.mu;
  fit.fitted_sigma = pr.sigma;
  fit.n_obs = data.n();
  fit.n_zero = zeros;
  return fit;
}

FittedModel fit(const RegressionData& data, const ModelSpec& spec, const FitControl& control,
                const VectorXd* start) {
  return data.Z ? fit_zabcs(data, spec, control, start) : fit_bcs(data, spec, control, start);
}

FittedModel model_at(const RegressionData& data, const ModelSpec& spec, const VectorXd& theta,
                     bool compute_information, double rel_step) {
  data.validate();
  const Index m = m_of(data);
  const auto k = static_cast<Index>(continuous_size(data, spec));
  if (theta.size() != m + k) throw std::invalid_argument("theta has the wrong length");
  FittedModel fit;
  fit.spec = spec;
  fit.zero_adjusted = data.Z.has_value();
  fit.kappa = theta.head(m);
  fit.beta = theta.segment(m, p_of(data));
  fit.tau = theta.segment(m + p_of(data), q_of(data));
  fit.lambda = spec.lambda_free ? theta[m + k - 1] : spec.lambda_value;
  fit.parameter_names = continuous_names(data, spec);
  fit.n_obs = data.n();
  fit.convergence.status = optim::Status::converged;

  ModelSpec fixed = spec;
  fixed.lambda_free = false;
  const Predictors pr =
      predict(fit.continuous_theta().head(p_of(data) + q_of(data)), data.X, data.S, fixed);
  fit.fitted_mu = pr.mu;
  fit.fitted_sigma = pr.sigma;
  if (fit.zero_adjusted) {
    const ZabcsView v = split(data, spec);
    fit.n_zero = static_cast<std::size_t>(v.indicator.sum());
    BinaryGlmFit glm;
    glm.kappa = fit.kappa;
    glm.eta = *data.Z * fit.kappa;
    glm.fitted_alpha.resize(glm.eta.size());
    for (Index i = 0; i < glm.eta.size(); ++i) {
      glm.fitted_alpha[i] = std::clamp(spec.alpha_link.inverse(glm.eta[i]), 1e-15, 1.0 - 1e-15);
    }
    fit.fitted_alpha = glm.fitted_alpha;
    fit.leverage = leverage_hstar(glm, *data.Z, spec.alpha_link);
    fit.loglik_discrete = binglm::loglik(fit.kappa, v.indicator, *data.Z, spec.alpha_link);
    fit.loglik_continuous = loglik_bcs(fit.continuous_theta(), v.positive, spec);
    std::vector<std::string> names;
    for (const auto& s : labels(data.z_names, m, "kappa")) names.push_back("alpha:" + s);
    for (const auto& s : fit.parameter_names) names.push_back(s);
    fit.parameter_names = std::move(names);
  } else {
    fit.loglik_continuous = loglik_bcs(theta, data, spec);
  }
  fit.loglik = fit.loglik_discrete + fit.loglik_continuous;
  if (compute_information && std::isfinite(fit.loglik)) {
    fill_information(fit, fit.zero_adjusted ? observed_information_zabcs(theta, data, spec, rel_step)
                                            : observed_information(theta, data, spec, rel_step));
  }
  return fit;
}

ZetaSelection select_zeta(const RegressionData& data, const ModelSpec& spec,
                          const std::vector<double>& grid, ZetaCriterion criterion,
                          const FitControl& control) {
  if (grid.empty()) throw std::invalid_argument("zeta grid is empty");
  if (!family_has_zeta(spec.family.tag())) {
    throw std::invalid_argument("family has no extra parameter to select");
  }
  ZetaSelection out;
  out.criterion = criterion;
  out.rows.resize(grid.size());
  FitControl inner = control;
  inner.compute_information = false;
  parallel_for(grid.size(), control.threads, [&](std::size_t g) {
    ZetaRow& row = out.rows[g];
    row.zeta = grid[g];
    try {
      ModelSpec s = spec;
      s.family = DgfFamily::make(spec.family.tag(), grid[g]);
      const FittedModel f = fit(data, s, inner);
      row.status = f.convergence.status;
      row.loglik = f.loglik;
      row.upsilon = diagnostics::upsilon(f, data);
      row.ok = f.converged() && std::isfinite(row.loglik) && std::isfinite(row.upsilon);
      if (!f.converged()) row.message = f.convergence.message;
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
    }
  });

  bool any = false;
  for (std::size_t g = 0; g < out.rows.size(); ++g) {
    const ZetaRow& r = out.rows[g];
    if (!r.ok) continue;
    if (!any) {
      out.chosen = g;
      any = true;
      continue;
    }
    const ZetaRow& best = out.rows[out.chosen];
    const bool better = criterion == ZetaCriterion::upsilon ? r.upsilon < best.upsilon
                                                            : r.loglik > best.loglik;
    const bool tie = criterion == ZetaCriterion::upsilon ? r.upsilon == best.upsilon
                                                         : r.loglik == best.loglik;
    if (better || (tie && r.zeta < best.zeta)) out.chosen = g;
  }
  if (!any) throw std::runtime_error("every zeta in the grid failed to fit");
  out.zeta = out.rows[out.chosen].zeta;
  return out;
}

std::vector<CoefficientRow> wald_inference(const FittedModel& fit) {
  std::vector<CoefficientRow> rows;
  const VectorXd theta = fit.theta();
  const Index m = fit.kappa.size();
  const Index p = fit.beta.size();
  const Index q = fit.tau.size();
  for (Index j = 0; j < theta.size(); ++j) {
    CoefficientRow r;
    r.block = j < m ? "kappa" : j < m + p ? "beta" : j < m + p + q ? "tau" : "lambda";
    r.name = static_cast<std::size_t>(j) < fit.parameter_names.size()
                 ? fit.parameter_names[static_cast<std::size_t>(j)]
                 : r.block + "[" + std::to_string(j) + "]";
    r.estimate = theta[j];
    r.std_error = j < fit.std_errors.size() ? fit.std_errors[j] : kNaN;
    if (std::isfinite(r.std_error) && r.std_error > 0.0) {
      r.z_value = r.estimate / r.std_error;
      r.p_value = 2.0 * specfun::std_normal_cdf(-std::abs(r.z_value));
    } else {
      r.z_value = kNaN;
      r.p_value = kNaN;
    }
    rows.push_back(r);
  }
  return rows;
}

}  // namespace regress
}  // namespace bcsfit
