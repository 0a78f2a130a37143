// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <bcsfit/bcs.hpp>
#include <bcsfit/binglm.hpp>
#include <bcsfit/diagnostics.hpp>
#include <bcsfit/parallel.hpp>
#include <bcsfit/regress.hpp>
#include <bcsfit/rng.hpp>
#include <bcsfit/specfun.hpp>
#include <bcsfit/zabcs.hpp>
#include <bcsfit_cli/bundled.hpp>
#include <bcsfit_cli/cli.hpp>

#include "mass.hpp"
#include "oracles.hpp"

using namespace bcsfit;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DgfFamily family_for(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::BCT: return DgfFamily::make(tag, 4.0);
    case FamilyTag::BCPE: return DgfFamily::make(tag, 1.5);
    case FamilyTag::BCHP: return DgfFamily::make(tag, 1.2);
    case FamilyTag::BCSL: return DgfFamily::make(tag, 2.0);
    case FamilyTag::BCSN: return DgfFamily::make(tag, 2.0);
    default: return DgfFamily::make(tag);
  }
}

// Several zeta values per family, spanning light and heavy tails.
std::vector<DgfFamily> family_variants(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::BCT: return {DgfFamily::make(tag, 1.0), DgfFamily::make(tag, 4.0), DgfFamily::make(tag, 30.0)};
    case FamilyTag::BCPE: return {DgfFamily::make(tag, 1.0), DgfFamily::make(tag, 1.5), DgfFamily::make(tag, 3.0)};
    case FamilyTag::BCHP: return {DgfFamily::make(tag, 0.5), DgfFamily::make(tag, 1.2), DgfFamily::make(tag, 5.0)};
    case FamilyTag::BCSL: return {DgfFamily::make(tag, 0.5), DgfFamily::make(tag, 2.0), DgfFamily::make(tag, 5.0)};
    case FamilyTag::BCSN: return {DgfFamily::make(tag, 0.5), DgfFamily::make(tag, 2.0), DgfFamily::make(tag, 4.0)};
    default: return {DgfFamily::make(tag)};
  }
}

const double kMus[] = {0.5, 1.0, 5.0};
const double kSigmas[] = {0.1, 0.5, 1.0};
const double kLambdas[] = {-1.0, -0.3, 0.0, 0.3, 1.0};

double normal_draw(UniformStream& u) { return specfun::std_normal_quantile(u.next()); }

// Regression data with log mu = b0 + b1 x, log sigma = t0 + t1 w, logit alpha = k0 + k1 x.
struct Truth {
  Eigen::Vector2d kappa{-0.85, 0.5};
  Eigen::Vector2d beta{1.0, 0.4};
  Eigen::Vector2d tau{-1.0, 0.5};
  double lambda = 0.4;
  bool zero_adjusted = true;

  Eigen::VectorXd theta() const {
    Eigen::VectorXd t(zero_adjusted ? 7 : 5);
    if (zero_adjusted) t << kappa, beta, tau, lambda;
    else t << beta, tau, lambda;
    return t;
  }
};

RegressionData simulate(std::size_t n, const DgfFamily& f, const Truth& truth, std::uint64_t seed) {
  UniformStream u(seed);
  const Link logit(LinkKind::logit);
  RegressionData d;
  d.y.resize(n);
  d.X.resize(n, 2);
  d.S.resize(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = normal_draw(u), w = u.next();
    d.X(i, 0) = d.S(i, 0) = 1.0;
    d.X(i, 1) = x;
    d.S(i, 1) = w;
    const BcsParams p{std::exp(truth.beta[0] + truth.beta[1] * x), std::exp(truth.tau[0] + truth.tau[1] * w),
                      truth.lambda};
    const double a = truth.zero_adjusted ? logit.inverse(truth.kappa[0] + truth.kappa[1] * x) : 0.0;
    const double v = u.next(), b = u.next();
    d.y[i] = v < a ? 0.0 : bcs::quantile(b, p, f);
  }
  if (truth.zero_adjusted) d.Z = d.X;
  return d;
}

FitControl serial_control() {
  FitControl c;
  c.threads = 1;
  return c;
}

// 1. Every family integrates to one over the parameter grid.
Outcome normalization() {
  double worst = 0.0;
  std::string where;
  std::size_t cases = 0;
  for (auto tag : kAllFamilies) {
    const auto f = family_for(tag);
    for (double mu : kMus)
      for (double sigma : kSigmas)
        for (double lambda : kLambdas) {
          const double err = std::abs(oracle::bcs_mass({mu, sigma, lambda}, f) - 1.0);
          ++cases;
          if (!(err <= worst)) {
            worst = err;
            where = fmt("%s mu=%g sigma=%g lambda=%g", f.label().c_str(), mu, sigma, lambda);
          }
        }
  }
  return {worst <= 1e-6, fmt("%zu cases, max |mass - 1| = %.2e at %s", cases, worst, where.c_str())};
}

// r(u) with the constants as printed in the generator table, where the check
// concerns the printed value itself.
double printed_loi(double u) {
  const double e = std::exp(-u);
  return 1.484300029 * e / ((1.0 + e) * (1.0 + e));
}

double renormalized_sn(double zeta, double u) {
  const double s = std::sqrt(u);
  return 2.0 / (zeta * std::sqrt(2.0 * kPi)) * std::cosh(s) *
         std::exp(-2.0 / (zeta * zeta) * std::sinh(s) * std::sinh(s));
}

// 2. int_0^inf u^{-1/2} r(u) du = int_R r(x^2) dx = 1.
Outcome dgf_self_check() {
  double worst = 0.0;
  std::string where;
  std::size_t cases = 0;
  auto note = [&](double value, const std::string& label) {
    const double err = std::abs(value - 1.0);
    ++cases;
    if (!(err <= worst)) {
      worst = err;
      where = label;
    }
  };
  for (auto tag : kAllFamilies)
    for (const auto& f : family_variants(tag)) {
      note(oracle::sinh_sinh([&](double x) { return std::exp(dgf::log_generator(f, x * x)); }), f.label());
      note(dgf::normalization_integral(f), f.label() + " (library)");
    }
  note(oracle::sinh_sinh([](double x) { return printed_loi(x * x); }), "BCLOI printed c");
  for (double z : {0.5, 2.0, 4.0})
    note(oracle::sinh_sinh([z](double x) { return renormalized_sn(z, x * x); }), fmt("BCSN(zeta=%g) table", z));
  return {worst <= 1e-6, fmt("%zu integrals, max |I - 1| = %.2e at %s", cases, worst, where.c_str())};
}

double student_t_cdf(double x, double nu) {
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * kPi);
  auto dens = [&](double t) { return c * std::pow(1.0 + t * t / nu, -(nu + 1) / 2); };
  const double lower = x <= 0.0 ? x : -x;
  const double tail = oracle::exp_sinh([&](double v) { return dens(lower - v); }, 0.0);
  return x <= 0.0 ? tail : 1.0 - tail;
}

// 3. Closed-form reductions.
Outcome closed_forms() {
  UniformStream u(31);
  const auto normal = DgfFamily::make(FamilyTag::BCNO);
  double ln_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double mu = std::exp(-3.0 + 6.0 * u.next());
    const double sigma = 0.05 + 1.95 * u.next();
    const double y = mu * std::exp(sigma * 8.0 * (2.0 * u.next() - 1.0));
    const double lz = std::log(y / mu) / sigma;
    const double ref = -std::log(y) - std::log(sigma) - 0.5 * std::log(2.0 * kPi) - 0.5 * lz * lz;
    const double got = bcs::log_pdf(y, {mu, sigma, 0.0}, normal);
    ln_err = std::max(ln_err, std::abs(got - ref) / std::max(1.0, std::abs(ref)));
  }
  const auto logistic = DgfFamily::make(FamilyTag::BCLOII);
  double lo_err = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = 60.0 * u.next() - 30.0;
    lo_err = std::max(lo_err, std::abs(dgf::base_cdf(logistic, x) - 1.0 / (1.0 + std::exp(-x))));
  }
  double t_err = 0.0;
  for (double nu : {1.0, 2.5, 4.0, 10.0, 30.0}) {
    const auto t = DgfFamily::make(FamilyTag::BCT, nu);
    for (int k = 0; k < 40; ++k) {
      const double x = 80.0 * u.next() - 40.0;
      t_err = std::max(t_err, std::abs(dgf::base_cdf(t, x) - student_t_cdf(x, nu)));
    }
  }
  const bool pass = ln_err <= 1e-12 && lo_err <= 1e-10 && t_err <= 1e-10;
  return {pass, fmt("log-normal %.1e, logistic %.1e, Student-t %.1e", ln_err, lo_err, t_err)};
}

// 4. Analytic score against central differences.
Outcome score_check() {
  UniformStream u(41);
  int failures = 0, za_draws = 0;
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const FamilyTag tag = kAllFamilies[draw % kAllFamilies.size()];
    std::optional<double> zeta;
    switch (tag) {
      case FamilyTag::BCT: zeta = 1.0 + 29.0 * u.next(); break;
      case FamilyTag::BCPE: zeta = 1.0 + 3.0 * u.next(); break;
      case FamilyTag::BCHP:
      case FamilyTag::BCSL:
      case FamilyTag::BCSN: zeta = 0.5 + 4.5 * u.next(); break;
      default: break;
    }
    ModelSpec spec;
    spec.family = DgfFamily::make(tag, zeta);
    Truth truth;
    truth.zero_adjusted = draw % 3 == 0;
    za_draws += truth.zero_adjusted;
    const double r = u.next();
    truth.lambda = r < 0.2 ? 1e-3 * (2.0 * u.next() - 1.0) : 3.0 * u.next() - 1.5;
    const std::size_t n = 20 + static_cast<std::size_t>(80 * u.next());
    const auto d = simulate(n, spec.family, truth, mix_seed(41, draw));
    Eigen::VectorXd th = truth.theta();
    for (Eigen::Index j = 0; j + 1 < th.size(); ++j) th[j] += 0.4 * (u.next() - 0.5);

    auto ll = [&](const Eigen::VectorXd& t) {
      return truth.zero_adjusted ? regress::loglik_zabcs(t, d, spec) : regress::loglik_bcs(t, d, spec);
    };
    const Eigen::VectorXd s =
        truth.zero_adjusted ? regress::score_zabcs(th, d, spec) : regress::score_bcs(th, d, spec);
    const Eigen::VectorXd fd = oracle::central_gradient(ll, th);
    const double tol = std::abs(truth.lambda) < 1e-3 ? 1e-4 : 1e-5;
    bool ok = std::isfinite(ll(th));
    for (Eigen::Index j = 0; j < th.size(); ++j) {
      const double e = oracle::rel_err(s[j], fd[j]);
      worst = std::max(worst, e / tol);
      ok = ok && e <= tol;
    }
    if (!ok) {
      ++failures;
      std::cerr << "  score draw " << draw << " " << spec.family.label() << " lambda=" << truth.lambda << '\n';
    }
  }
  return {failures == 0, fmt("100 draws (%d zero-adjusted), %d outside tolerance, worst error/tol = %.1e", za_draws,
                             failures, worst)};
}

// 5. Quantile identities.
Outcome quantile_check() {
  const double probs[] = {1e-6, 1e-3, 0.025, 0.3, 0.5, 0.7, 0.975, 0.999, 1.0 - 1e-6};
  double rt = 0.0, prop = 0.0, med = 0.0;
  for (auto tag : kAllFamilies) {
    const auto f = family_for(tag);
    for (double mu : kMus)
      for (double sigma : kSigmas)
        for (double lambda : kLambdas) {
          const BcsParams p{mu, sigma, lambda};
          for (double pr : probs) {
            const double q = bcs::quantile(pr, p, f);
            rt = std::max(rt, std::abs(bcs::cdf(q, p, f) - pr));
            for (double c : {0.01, 3.7, 250.0}) {
              const double qc = bcs::quantile(pr, {c * mu, sigma, lambda}, f);
              prop = std::max(prop, std::abs(qc - c * q) / (c * q));
            }
          }
          if (lambda == 0.0) med = std::max(med, std::abs(bcs::quantile(0.5, p, f) - mu) / mu);
        }
  }
  const bool pass = rt <= 1e-8 && prop <= 1e-10 && med <= 1e-10;
  return {pass, fmt("cdf(quantile) %.1e, proportionality %.1e, lambda=0 median %.1e", rt, prop, med)};
}

// 6. Bias and Wald coverage for zero-adjusted logistic type II data.
Outcome monte_carlo() {
  const auto family = DgfFamily::make(FamilyTag::BCLOII);
  ModelSpec spec;
  spec.family = family;
  const Truth truth;
  const Eigen::VectorXd th0 = truth.theta();
  const Eigen::Index k = th0.size();
  const std::size_t reps = 500;
  const std::size_t sizes[] = {200, 500, 1000};
  std::vector<Eigen::VectorXd> abs_bias, bias_se;
  Eigen::VectorXd coverage;
  std::size_t failed_total = 0;
  for (std::size_t n : sizes) {
    std::vector<Eigen::VectorXd> est(reps), se(reps);
    std::vector<char> ok(reps, 0);
    parallel_for(reps, 0, [&](std::size_t r) {
      const auto d = simulate(n, family, truth, mix_seed(20261016, n * 100000 + r));
      const auto fit = regress::fit_zabcs(d, spec, serial_control());
      if (!fit.converged() || !fit.information_positive_definite) return;
      est[r] = fit.theta();
      se[r] = fit.std_errors;
      ok[r] = 1;
    });
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(k), sq = Eigen::VectorXd::Zero(k), inside = Eigen::VectorXd::Zero(k);
    std::size_t used = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      if (!ok[r]) continue;
      ++used;
      sum += est[r] - th0;
      sq += (est[r] - th0).cwiseAbs2();
      for (Eigen::Index j = 0; j < k; ++j) inside[j] += std::abs(est[r][j] - th0[j]) <= 1.959963984540054 * se[r][j];
    }
    failed_total += reps - used;
    const double m = static_cast<double>(used);
    const Eigen::VectorXd mean = sum / m;
    abs_bias.push_back(mean.cwiseAbs());
    // Monte Carlo standard error of each bias estimate.
    bias_se.push_back(((sq / m - mean.cwiseAbs2()) * (m / (m - 1.0)) / m).cwiseSqrt());
    coverage = inside / static_cast<double>(used);
  }
  bool decreasing = true;
  for (Eigen::Index j = 0; j < k; ++j)
    decreasing = decreasing && abs_bias[0][j] > abs_bias[1][j] && abs_bias[1][j] > abs_bias[2][j];
  const bool covered = coverage.minCoeff() >= 0.92 && coverage.maxCoeff() <= 0.97;
  std::ostringstream detail;
  detail << "failed fits " << failed_total << "; |bias| n=200/500/1000:";
  for (Eigen::Index j = 0; j < k; ++j)
    detail << fmt(" [%.4f %.4f %.4f]", abs_bias[0][j], abs_bias[1][j], abs_bias[2][j]);
  detail << "; Monte Carlo SE of bias:";
  for (Eigen::Index j = 0; j < k; ++j)
    detail << fmt(" [%.4f %.4f %.4f]", bias_se[0][j], bias_se[1][j], bias_se[2][j]);
  detail << "; coverage n=1000:";
  for (Eigen::Index j = 0; j < k; ++j) detail << fmt(" %.3f", coverage[j]);
  return {decreasing && covered, detail.str()};
}

// 7. Likelihood factorisation and block-diagonal information.
Outcome factorization() {
  double fac = 0.0, split = 0.0, cross = 0.0;
  int fits = 0;
  for (auto tag : {FamilyTag::BCLOII, FamilyTag::BCNO, FamilyTag::BCT}) {
    ModelSpec spec;
    spec.family = family_for(tag);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const auto d = simulate(1000, spec.family, Truth{}, mix_seed(70, seed * 10 + static_cast<int>(tag)));
      const auto fit = regress::fit_zabcs(d, spec);
      if (!fit.converged()) return {false, "fit did not converge for " + spec.family.label()};
      ++fits;
      const double scale = std::max(1.0, std::abs(fit.loglik));
      fac = std::max(fac, std::abs(fit.loglik - (fit.loglik_discrete + fit.loglik_continuous)) / scale);

      // l(theta) recomputed from its two factors on their own data.
      Eigen::VectorXd zero(d.y.size());
      for (Eigen::Index i = 0; i < d.y.size(); ++i) zero[i] = d.y[i] == 0.0 ? 1.0 : 0.0;
      const double l1 = binglm::loglik(fit.kappa, zero, *d.Z, spec.alpha_link);
      const double l2 = regress::loglik_bcs(fit.continuous_theta(), regress::positive_subset(d), spec);
      const double l = regress::loglik_zabcs(fit.theta(), d, spec);
      split = std::max(split, std::abs(l - (l1 + l2)) / scale);

      const Eigen::Index m = fit.kappa.size();
      const Eigen::Index c = fit.theta().size() - m;
      const Eigen::MatrixXd J = regress::observed_information_zabcs(fit.theta(), d, spec);
      cross = std::max({cross, J.topRightCorner(m, c).cwiseAbs().maxCoeff(),
                        fit.observed_information.topRightCorner(m, c).cwiseAbs().maxCoeff()});
    }
  }
  const bool pass = fac <= 1e-12 && split <= 1e-12 && cross <= 1e-6;
  return {pass, fmt("%d fits; reported split %.1e, recomputed split %.1e, max cross-block |J| %.1e", fits, fac,
                    split, cross)};
}

// 8. Residual calibration under correct specification.
Outcome residual_calibration() {
  ModelSpec spec;
  spec.family = DgfFamily::make(FamilyTag::BCLOII);
  Truth truth;
  truth.zero_adjusted = false;
  const std::size_t reps = 200;
  std::vector<int> rejected(reps, -1);
  parallel_for(reps, 0, [&](std::size_t r) {
    const auto d = simulate(500, spec.family, truth, mix_seed(80, r));
    const auto fit = regress::fit_bcs(d, spec, serial_control());
    if (!fit.converged()) return;
    const auto res = diagnostics::quantile_residuals(fit, d);
    std::vector<double> v(res.values.data(), res.values.data() + res.values.size());
    rejected[r] = oracle::ks_rejects_5pct(oracle::ks_statistic(v, oracle::normal_cdf), v.size());
  });
  int used = 0, rej = 0;
  for (int v : rejected) {
    if (v < 0) continue;
    ++used;
    rej += v;
  }
  const double rate = static_cast<double>(rej) / used;

  ModelSpec za;
  za.family = spec.family;
  double worst_mean = 0.0, worst_sd = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = simulate(2000, za.family, Truth{}, mix_seed(81, seed));
    const auto fit = regress::fit_zabcs(d, za);
    const auto res = diagnostics::pearson_residuals(fit, d);
    double s = 0.0, ss = 0.0;
    int m = 0;
    for (double v : res.values) {
      if (!std::isfinite(v)) continue;
      s += v;
      ss += v * v;
      ++m;
    }
    const double mean = s / m;
    const double sd = std::sqrt((ss - m * mean * mean) / (m - 1));
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_sd = std::max(worst_sd, std::abs(sd - 1.0));
  }
  const bool pass = used == static_cast<int>(reps) && rate >= 0.02 && rate <= 0.09 && worst_mean <= 0.1 &&
                    worst_sd <= 0.1;
  return {pass, fmt("KS rejection %d/%d = %.1f%% (target 2%%-9%%); Pearson over 5 fits: max |mean| %.3f, "
                    "max |sd - 1| %.3f",
                    rej, used, 100.0 * rate, worst_mean, worst_sd)};
}

// 9. Case-weight influence.
Outcome influence() {
  double delta_err = 0.0, curv_err = 0.0;
  for (bool za : {false, true}) {
    ModelSpec spec;
    spec.family = DgfFamily::make(FamilyTag::BCLOII);
    Truth truth;
    truth.zero_adjusted = za;
    const std::size_t n = 150;
    const auto d = simulate(n, spec.family, truth, za ? 91 : 90);
    const auto fit = regress::fit(d, spec);
    if (!fit.converged()) return {false, "influence fit did not converge"};
    const Eigen::MatrixXd delta = diagnostics::caseweight_delta(fit, d);
    const Eigen::VectorXd th = fit.theta();
    for (std::size_t i : {0, 7, 42, 99, 149}) {
      for (Eigen::Index j = 0; j < th.size(); ++j) {
        auto ll = [&](double dt, double dw) {
          Eigen::VectorXd t = th;
          t[j] += dt;
          Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
          w[i] += dw;
          return za ? regress::loglik_zabcs(t, d, spec, &w) : regress::loglik_bcs(t, d, spec, &w);
        };
        const double h = 1e-4 * std::max(1.0, std::abs(th[j])), e = 0.5;
        const double fd = (ll(h, e) - ll(h, -e) - ll(-h, e) + ll(-h, -e)) / (4 * h * e);
        delta_err = std::max(delta_err, oracle::rel_err(delta(j, i), fd, 1e-3));
      }
    }
    const auto inf = diagnostics::local_influence(fit, d, true);
    const Eigen::MatrixXd& B = *inf.B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B);
    const double big = 2.0 * eig.eigenvalues().cwiseAbs().maxCoeff();
    const double at_dmax = 2.0 * std::abs(inf.dmax.dot(B * inf.dmax));
    curv_err = std::max({curv_err, std::abs(at_dmax - big) / std::max(1.0, big),
                         std::abs(inf.cdmax - big) / std::max(1.0, big)});
  }

  ModelSpec spec;
  spec.family = DgfFamily::make(FamilyTag::BCLOII);
  Truth truth;
  truth.zero_adjusted = false;
  const std::size_t seeds = 50, n = 200;
  std::vector<char> hit(seeds, 0);
  parallel_for(seeds, 0, [&](std::size_t s) {
    auto d = simulate(n, spec.family, truth, mix_seed(92, s));
    UniformStream pick(mix_seed(93, s));
    const auto planted = static_cast<Eigen::Index>(std::min<double>(n - 1, std::floor(n * pick.next())));
    d.y[planted] *= 50.0;
    const auto fit = regress::fit_bcs(d, spec, serial_control());
    if (!fit.converged()) return;
    const auto inf = diagnostics::local_influence(fit, d);
    Eigen::Index arg = 0;
    inf.dmax.cwiseAbs().maxCoeff(&arg);
    hit[s] = arg == planted;
  });
  const auto found = std::count(hit.begin(), hit.end(), 1);
  const bool pass = delta_err <= 1e-4 && curv_err <= 1e-8 && found >= 45;
  return {pass, fmt("Delta vs FD %.1e; curvature at dmax %.1e; planted outlier found in %td/50", delta_err,
                    curv_err, found)};
}

// 10. AIC, Delta_m and zeta selection.
Outcome model_selection() {
  Truth truth;
  truth.zero_adjusted = false;
  const auto t4 = DgfFamily::make(FamilyTag::BCT, 4.0);
  const auto d = simulate(400, t4, truth, 100);
  std::vector<FittedModel> fits;
  for (auto tag : kAllFamilies) {
    ModelSpec s;
    s.family = family_for(tag);
    fits.push_back(regress::fit_bcs(d, s));
  }
  std::vector<const FittedModel*> ptrs;
  for (const auto& f : fits) ptrs.push_back(&f);
  const auto report = diagnostics::gof_report(ptrs, d);
  bool aic_exact = true;
  double best = HUGE_VAL;
  for (std::size_t i = 0; i < report.size(); ++i) {
    const auto& r = report[i];
    aic_exact = aic_exact && r.aic == -2.0 * r.loglik + 2.0 * static_cast<double>(r.n_params) &&
                r.loglik == fits[i].loglik && r.n_params == fits[i].n_params();
    best = std::min(best, r.aic);
  }
  bool delta_ok = true;
  for (const auto& r : report) delta_ok = delta_ok && (r.aic == best ? r.delta_m == 0.0 : r.delta_m > 0.0);

  std::vector<double> grid;
  for (int z = 1; z <= 20; ++z) grid.push_back(z);
  ModelSpec spec;
  spec.family = t4;
  const std::size_t seeds = 100;
  std::vector<double> chosen(seeds, 0.0);
  parallel_for(seeds, 0, [&](std::size_t s) {
    const auto data = simulate(1000, t4, truth, mix_seed(101, s));
    chosen[s] = regress::select_zeta(data, spec, grid, ZetaCriterion::upsilon, serial_control()).zeta;
  });
  const auto within = std::count_if(chosen.begin(), chosen.end(), [](double z) { return z >= 2.0 && z <= 8.0; });
  return {aic_exact && delta_ok && within >= 80,
          fmt("AIC exact: %s; Delta_m of best is 0: %s; zeta in [2, 8] for %td/100 seeds", aic_exact ? "yes" : "no",
              delta_ok ? "yes" : "no", within)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::cerr << "  bcsfit " << args.front() << " exited " << code << ": " << err.str();
  return code;
}

std::string schema_problem(const json& fit, const json& diag) {
  if (fit.value("schema", "") != "bcsfit.fit-report") return "fit schema tag";
  if (fit.value("schema_version", 0) != cli::kSchemaVersion) return "fit schema version";
  for (const char* key : {"invocation", "data", "model", "coefficients", "theta", "loglik", "gof", "convergence"})
    if (!fit.contains(key)) return std::string("fit report lacks ") + key;
  if (!fit["coefficients"].is_array() || fit["coefficients"].size() != fit["theta"].size())
    return "coefficient table size";
  for (const auto& c : fit["coefficients"])
    for (const char* key : {"block", "name", "estimate", "std_error", "z_value", "p_value"})
      if (!c.contains(key)) return std::string("coefficient row lacks ") + key;
  for (const char* key : {"total", "discrete", "continuous"})
    if (!fit["loglik"][key].is_number()) return std::string("loglik lacks ") + key;
  if (fit["data"].value("n", 0) != static_cast<int>(cli::kBundledRows)) return "row count";

  if (diag.value("schema", "") != "bcsfit.diagnostics") return "diagnostics schema tag";
  if (diag.value("schema_version", 0) != cli::kSchemaVersion) return "diagnostics schema version";
  if (!diag["summary"].is_object() || !diag["tables"].is_array() || diag["tables"].empty()) return "diagnostics body";
  for (const auto& t : diag["tables"]) {
    if (!t["name"].is_string() || !t["columns"].is_array() || !t["data"].is_array() || t["data"].empty())
      return "table shape";
    for (const auto& row : t["data"])
      if (!row.is_array() || row.size() != t["columns"].size())
        return "row width in " + t["name"].get<std::string>();
  }
  return {};
}

// 11. gen-data -> fit -> diagnose through the command-line entry point.
Outcome end_to_end() {
  const fs::path dir = fs::current_path() / "acceptance_work";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string data = (dir / "bundled.csv").string();
  const std::string report = (dir / "fit.json").string();
  const std::string diag = (dir / "diagnostics.json").string();
  const std::string terms = "age + sex + years_sc + residence + income + children";
  const std::string formula = "y ~ " + terms + " | " + terms + " | " + terms;

  auto pipeline = [&]() -> std::vector<std::string> {
    if (cli({"gen-data", "--out", data, "--seed", "7"}) != 0) return {};
    if (cli({"fit", "--data", data, "--formula", formula, "--family", "BCLOII", "--out", report}) != 0) return {};
    if (cli({"diagnose", "--fit", report, "--residuals", "quantile,randomized,pearson", "--envelope", "100",
             "--influence", "--seed", "11", "--out", diag}) != 0)
      return {};
    return {slurp(data), slurp(data + ".truth.json"), slurp(report), slurp(diag)};
  };

  const auto start = std::chrono::steady_clock::now();
  const auto first = pipeline();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (first.empty()) return {false, "pipeline failed"};
  const auto second = pipeline();
  const bool identical = second == first;

  const auto fit = json::parse(first[2]);
  const auto dj = json::parse(first[3]);
  const std::string status = fit["convergence"].value("status", "");
  const std::string problem = schema_problem(fit, dj);
  const bool pass = status == "converged" && problem.empty() && identical && seconds <= 60.0;
  return {pass, fmt("status %s; schema %s; reruns %s; pipeline %.1f s", status.c_str(),
                    problem.empty() ? "valid" : problem.c_str(), identical ? "byte-identical" : "differ", seconds)};
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;  // 0 = no runtime requirement
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "normalization", 120.0, normalization},
      {2, "generator self-check", 0.0, dgf_self_check},
      {3, "closed-form reductions", 0.0, closed_forms},
      {4, "score correctness", 120.0, score_check},
      {5, "quantile machinery", 0.0, quantile_check},
      {6, "Monte Carlo recovery", 900.0, monte_carlo},
      {7, "two-stage factorization", 0.0, factorization},
      {8, "residual calibration", 0.0, residual_calibration},
      {9, "influence", 0.0, influence},
      {10, "model selection", 0.0, model_selection},
      {11, "end-to-end CLI", 0.0, end_to_end},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && seconds > c.budget_seconds) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_seconds);
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.title << ": " << o.detail
              << fmt(" (%.1f s)", seconds) << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
