#include "bcsfit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bcsfit/bcs.hpp"
#include "bcsfit/parallel.hpp"
#include "bcsfit/rng.hpp"
#include "bcsfit/zabcs.hpp"

namespace bcsfit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Phi^{-1}(p) given p and 1 - p, choosing whichever keeps precision.
double normal_score(double lower, double upper, bool& clamped) {
  clamped = false;
  if (lower <= 0.0) {
    clamped = true;
    return -diagnostics::kResidualClamp;
  }
  if (upper <= 0.0) {
    clamped = true;
    return diagnostics::kResidualClamp;
  }
  return lower <= 0.5 ? specfun::std_normal_quantile(lower)
                      : -specfun::std_normal_quantile(upper);
}

void check_data(const FittedModel& fit, const RegressionData& data) {
  if (fit.n_obs != data.n() || static_cast<std::size_t>(fit.fitted_mu.size()) != data.n()) {
    throw std::invalid_argument("fit and data disagree on the number of observations");
  }
}

bool is_zero_row(const FittedModel& fit, double y) {
  return fit.zero_adjusted && zabcs::is_zero(y, fit.spec.zero_threshold);
}

BcsParams row_params(const FittedModel& fit, std::size_t i) {
  const auto r = static_cast<Index>(i);
  return {fit.fitted_mu[r], fit.fitted_sigma[r], fit.lambda};
}

// Quantile residuals for given responses under the fitted law at `rows`.
VectorXd residuals_for(const FittedModel& fit, const std::vector<std::size_t>& rows,
                       const VectorXd& y) {
  VectorXd out(y.size());
  for (Index j = 0; j < y.size(); ++j) {
    const BcsParams p = row_params(fit, rows[static_cast<std::size_t>(j)]);
    bool clamped = false;
    out[j] = normal_score(bcs::cdf(y[j], p, fit.spec.family), bcs::sf(y[j], p, fit.spec.family),
                          clamped);
  }
  return out;
}

std::vector<std::size_t> positive_rows(const FittedModel& fit, const RegressionData& data) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!is_zero_row(fit, data.y[static_cast<Index>(i)])) rows.push_back(i);
  }
  return rows;
}

}  // namespace

std::string_view residual_kind_name(ResidualKind kind) {
  switch (kind) {
    case ResidualKind::quantile: return "quantile";
    case ResidualKind::randomized_quantile: return "randomized";
    case ResidualKind::pearson: return "pearson";
  }
  return "?";
}

namespace diagnostics {

ResidualSet quantile_residuals(const FittedModel& fit, const RegressionData& data) {
  check_data(fit, data);
  ResidualSet out;
  out.kind = ResidualKind::quantile;
  out.rows = positive_rows(fit, data);
  out.values.resize(static_cast<Index>(out.rows.size()));
  for (std::size_t j = 0; j < out.rows.size(); ++j) {
    const std::size_t i = out.rows[j];
    const double y = data.y[static_cast<Index>(i)];
    const BcsParams p = row_params(fit, i);
    bool clamped = false;
    out.values[static_cast<Index>(j)] =
        normal_score(bcs::cdf(y, p, fit.spec.family), bcs::sf(y, p, fit.spec.family), clamped);
    if (clamped) out.extreme_tail.push_back(i);
  }
  return out;
}

std::vector<ResidualSet> randomized_quantile_residuals(const FittedModel& fit,
                                                       const RegressionData& data,
                                                       std::size_t realizations,
                                                       std::uint64_t seed) {
  if (realizations < 1) throw std::invalid_argument("realizations must be at least 1");
  check_data(fit, data);
  std::vector<ResidualSet> out;
  for (std::size_t r = 0; r < realizations; ++r) {
    UniformStream uniform(mix_seed(seed, r));
    ResidualSet set;
    set.kind = ResidualKind::randomized_quantile;
    set.realization = r;
    set.values.resize(static_cast<Index>(data.n()));
    for (std::size_t i = 0; i < data.n(); ++i) {
      const auto ii = static_cast<Index>(i);
      const double y = data.y[ii];
      set.rows.push_back(i);
      const double alpha = fit.zero_adjusted ? fit.fitted_alpha[ii] : 0.0;
      bool clamped = false;
      if (is_zero_row(fit, y)) {
        double u = 0.0;
        // Uniform on (0, alpha]; an underflow to exactly 0 is redrawn.
        while (u == 0.0) {
          const double w = static_cast<double>((uniform.next_word() >> 11) + 1) * 0x1.0p-53;
          u = alpha * w;
        }
        set.values[ii] = normal_score(u, 1.0 - u, clamped);
      } else {
        const BcsParams p = row_params(fit, i);
        const double f = bcs::cdf(y, p, fit.spec.family);
        const double s = bcs::sf(y, p, fit.spec.family);
        set.values[ii] = normal_score(alpha + (1.0 - alpha) * f, (1.0 - alpha) * s, clamped);
      }
      if (clamped) set.extreme_tail.push_back(i);
    }
    out.push_back(std::move(set));
  }
  return out;
}

ResidualSet pearson_residuals(const FittedModel& fit, const RegressionData& data) {
  if (!fit.zero_adjusted) throw std::invalid_argument("Pearson residuals need a zero-adjusted fit");
  check_data(fit, data);
  ResidualSet out;
  out.kind = ResidualKind::pearson;
  out.values.resize(static_cast<Index>(data.n()));
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto ii = static_cast<Index>(i);
    out.rows.push_back(i);
    const double a = fit.fitted_alpha[ii];
    const double h = fit.leverage[ii];
    const double indicator = zabcs::is_zero(data.y[ii], fit.spec.zero_threshold) ? 1.0 : 0.0;
    const double denom = a * (1.0 - a) * (1.0 - h);
    out.values[ii] = denom > 0.0 ? (indicator - a) / std::sqrt(denom) : kNaN;
  }
  return out;
}

double upsilon(const FittedModel& fit, const RegressionData& data, specfun::OrderStatMethod method) {
  const ResidualSet r = quantile_residuals(fit, data);
  std::vector<double> sorted(r.values.data(), r.values.data() + r.values.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n == 0) return kNaN;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += std::abs(sorted[i] - specfun::normal_order_stat_mean(i + 1, n, method));
  }
  return sum / static_cast<double>(n);
}

Envelope simulated_envelope(const FittedModel& fit, const RegressionData& data,
                            const EnvelopeOptions& options) {
  if (options.replicates < 19) throw std::invalid_argument("envelope needs at least 19 replicates");
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw std::invalid_argument("envelope level must lie in (0, 1)");
  }
  check_data(fit, data);
  const ResidualSet obs = quantile_residuals(fit, data);
  const std::vector<std::size_t>& rows = obs.rows;
  const auto n = static_cast<Index>(rows.size());

  RegressionData base;
  base.y.resize(n);
  base.X.resize(n, data.X.cols());
  base.S.resize(n, data.S.cols());
  for (Index j = 0; j < n; ++j) {
    const auto i = static_cast<Index>(rows[static_cast<std::size_t>(j)]);
    base.X.row(j) = data.X.row(i);
    base.S.row(j) = data.S.row(i);
  }
  const VectorXd start = fit.continuous_theta();
  FitControl control = options.control;
  control.compute_information = false;

  std::vector<VectorXd> sims(options.replicates);
  std::vector<char> ok(options.replicates, 0);
  parallel_for(options.replicates, options.threads, [&](std::size_t b) {
    UniformStream uniform(mix_seed(options.seed, b));
    RegressionData sim = base;
    for (Index j = 0; j < n; ++j) {
      sim.y[j] = bcs::quantile(uniform.next(), row_params(fit, rows[static_cast<std::size_t>(j)]),
                               fit.spec.family);
    }
    VectorXd r;
    try {
      if (options.refit) {
        const FittedModel refit = regress::fit_bcs(sim, fit.spec, control, &start);
        if (!refit.converged()) return;
        // Map residuals through the refitted law at the same rows.
        FittedModel view = refit;
        std::vector<std::size_t> local(static_cast<std::size_t>(n));
        for (std::size_t j = 0; j < local.size(); ++j) local[j] = j;
        r = residuals_for(view, local, sim.y);
      } else {
        r = residuals_for(fit, rows, sim.y);
      }
    } catch (const std::exception&) {
      return;
    }
    std::sort(r.data(), r.data() + r.size());
    sims[b] = std::move(r);
    ok[b] = 1;
  });

  Envelope env;
  env.level = options.level;
  env.replicates = options.replicates;
  for (char c : ok) env.failures += c ? 0 : 1;
  if (env.failures * 10 > options.replicates) {
    throw std::runtime_error("envelope aborted: " + std::to_string(env.failures) + " of " +
                             std::to_string(options.replicates) + " replicate refits failed");
  }
  std::vector<const VectorXd*> good;
  for (std::size_t b = 0; b < sims.size(); ++b) {
    if (ok[b]) good.push_back(&sims[b]);
  }
  const std::size_t B = good.size();
  const auto k_lo = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor((static_cast<double>(B) + 1.0) *
                                             (1.0 - options.level) / 2.0)));

  env.observed = obs.values;
  std::sort(env.observed.data(), env.observed.data() + env.observed.size());
  env.expected.resize(n);
  env.lower.resize(n);
  env.median.resize(n);
  env.upper.resize(n);
  std::vector<double> column(B);
  for (Index j = 0; j < n; ++j) {
    for (std::size_t b = 0; b < B; ++b) column[b] = (*good[b])[j];
    std::sort(column.begin(), column.end());
    env.lower[j] = column[k_lo - 1];
    env.upper[j] = column[B - k_lo];
    env.median[j] = B % 2 ? column[B / 2] : 0.5 * (column[B / 2 - 1] + column[B / 2]);
    env.expected[j] = specfun::normal_order_stat_mean(static_cast<std::size_t>(j) + 1,
                                                      static_cast<std::size_t>(n));
    if (env.observed[j] < env.lower[j] || env.observed[j] > env.upper[j]) ++env.outside;
  }
  return env;
}

MatrixXd caseweight_delta(const FittedModel& fit, const RegressionData& data) {
  check_data(fit, data);
  return fit.zero_adjusted ? regress::score_contributions_zabcs(fit.theta(), data, fit.spec)
                           : regress::score_contributions_bcs(fit.theta(), data, fit.spec);
}

InfluenceResult local_influence(const FittedModel& fit, const RegressionData& data,
                                bool materialize_b) {
  const MatrixXd delta = caseweight_delta(fit, data);
  const MatrixXd& J = fit.observed_information;
  if (J.rows() != delta.rows()) throw std::runtime_error("observed information is unavailable");
  Eigen::LLT<MatrixXd> llt(J);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("observed information is not positive definite");
  }
  // B = -G'G with G = L^{-1} Delta, so its nonzero spectrum is that of -G G'.
  const MatrixXd G = llt.matrixL().solve(delta);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(G * G.transpose());
  if (eig.info() != Eigen::Success) throw std::runtime_error("eigen-decomposition failed");
  const Index top = eig.eigenvalues().size() - 1;
  const double lambda_max = eig.eigenvalues()[top];

  InfluenceResult out;
  out.cdmax = 2.0 * lambda_max;
  VectorXd d = G.transpose() * eig.eigenvectors().col(top);
  d /= d.norm();
  Index arg = 0;
  d.cwiseAbs().maxCoeff(&arg);
  if (d[arg] < 0.0) d = -d;
  out.dmax = d;
  out.Ci = 2.0 * G.colwise().squaredNorm().transpose();
  if (materialize_b) out.B = -(G.transpose() * G);
  return out;
}

double aic(double loglik, std::size_t n_params) {
  return -2.0 * loglik + 2.0 * static_cast<double>(n_params);
}

std::vector<GofReport> gof_report(const std::vector<const FittedModel*>& fits,
                                  const RegressionData& data) {
  std::vector<GofReport> out;
  for (const FittedModel* f : fits) {
    check_data(*f, data);
    GofReport g;
    g.label = (f->zero_adjusted ? "ZA" : "") + f->spec.family.label();
    g.loglik = f->loglik;
    g.n_params = f->n_params();
    g.n_params_with_zeta = g.n_params + (f->zeta() ? 1 : 0);
    g.aic = aic(g.loglik, g.n_params);
    g.aic_with_zeta = aic(g.loglik, g.n_params_with_zeta);
    g.upsilon = upsilon(*f, data);
    out.push_back(g);
  }
  double best = std::numeric_limits<double>::infinity();
  double best_z = best;
  for (const auto& g : out) {
    best = std::min(best, g.aic);
    best_z = std::min(best_z, g.aic_with_zeta);
  }
  for (auto& g : out) {
    g.delta_m = g.aic - best;
    g.delta_m_with_zeta = g.aic_with_zeta - best_z;
  }
  return out;
}

}  // namespace diagnostics
}  // namespace bcsfit
