#include "bcsfit/bcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bcsfit/rng.hpp"

namespace bcsfit {

void BcsParams::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("BCS: mu must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("BCS: sigma must be positive");
  }
  if (!std::isfinite(lambda)) throw std::invalid_argument("BCS: lambda must be finite");
}

namespace bcs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double y, const char* where) {
  if (!(y > 0.0)) throw std::domain_error(std::string(where) + ": response must be positive");
}

// (e^w (w - 1) + 1) / w^2 as a power series, for small |w|.
double dz_series(double w) {
  double sum = 0.0;
  double inv_factorial = 0.5;  // 1 / k!
  double power = 1.0;          // w^{k-2}
  for (int k = 2; k < 40; ++k) {
    const double term = (k - 1) * inv_factorial * power;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    inv_factorial /= (k + 1);
    power *= w;
  }
  return sum;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double transform_z(double y, const BcsParams& p) {
  require_positive(y, "transform_z");
  const double log_ratio = std::log(y / p.mu);
  if (p.lambda == 0.0) return log_ratio / p.sigma;
  return std::expm1(p.lambda * log_ratio) / (p.sigma * p.lambda);
}

double dz_dlambda(double y, const BcsParams& p) {
  require_positive(y, "dz_dlambda");
  const double log_ratio = std::log(y / p.mu);
  const double w = p.lambda * log_ratio;
  if (std::abs(w) < 0.1) return log_ratio * log_ratio * dz_series(w) / p.sigma;
  return (std::exp(w) * (w - 1.0) + 1.0) / (p.sigma * p.lambda * p.lambda);
}

double log_truncation(double sigma, double lambda, const DgfFamily& family) {
  if (lambda == 0.0) return 0.0;
  const double delta = 1.0 / (sigma * std::abs(lambda));
  return dgf::log_base_cdf(family, delta);
}

double truncation_ratio(double sigma, double lambda, const DgfFamily& family) {
  if (lambda == 0.0) return 0.0;
  const double delta = 1.0 / (sigma * std::abs(lambda));
  if (std::isinf(delta)) return 0.0;
  return std::exp(dgf::log_generator(family, delta * delta) - dgf::log_base_cdf(family, delta));
}

double log_pdf(double y, const BcsParams& p, const DgfFamily& family, DomainPolicy policy) {
  if (!(y > 0.0)) {
    if (policy == DomainPolicy::permissive) return -kInf;
    throw std::domain_error("log_pdf: response must be positive");
  }
  const double z = transform_z(y, p);
  const double base = -std::log(y) - std::log(p.sigma) + dgf::log_generator(family, z * z);
  if (p.lambda == 0.0) return base;
  return base + p.lambda * std::log(y / p.mu) - log_truncation(p.sigma, p.lambda, family);
}

double pdf(double y, const BcsParams& p, const DgfFamily& family) {
  return std::exp(log_pdf(y, p, family));
}

double cdf(double y, const BcsParams& p, const DgfFamily& family) {
  if (std::isnan(y)) throw std::domain_error("cdf: NaN response");
  if (y <= 0.0) return 0.0;
  if (std::isinf(y)) return 1.0;
  const double z = transform_z(y, p);
  if (p.lambda == 0.0) return dgf::base_cdf(family, z);
  const double delta = 1.0 / (p.sigma * std::abs(p.lambda));
  const double mass = dgf::base_cdf(family, delta);
  if (p.lambda < 0.0) return clamp01(dgf::base_cdf(family, z) / mass);
  return clamp01((dgf::base_cdf(family, z) - dgf::base_sf(family, delta)) / mass);
}

double sf(double y, const BcsParams& p, const DgfFamily& family) {
  if (std::isnan(y)) throw std::domain_error("sf: NaN response");
  if (y <= 0.0) return 1.0;
  if (std::isinf(y)) return 0.0;
  const double z = transform_z(y, p);
  if (p.lambda == 0.0) return dgf::base_sf(family, z);
  const double delta = 1.0 / (p.sigma * std::abs(p.lambda));
  const double mass = dgf::base_cdf(family, delta);
  if (p.lambda > 0.0) return clamp01(dgf::base_sf(family, z) / mass);
  return clamp01((dgf::base_sf(family, z) - dgf::base_sf(family, delta)) / mass);
}

double quantile(double prob, const BcsParams& p, const DgfFamily& family) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
  if (p.lambda == 0.0) return p.mu * std::exp(p.sigma * dgf::base_quantile(family, prob));
  const double delta = 1.0 / (p.sigma * std::abs(p.lambda));
  const double mass = dgf::base_cdf(family, delta);
  double target = p.lambda > 0.0 ? prob * mass + dgf::base_sf(family, delta) : prob * mass;
  target = std::clamp(target, std::numeric_limits<double>::min(),
                      std::nextafter(1.0, 0.0));
  const double zp = dgf::base_quantile(family, target);
  return p.mu * std::exp(std::log1p(p.sigma * p.lambda * zp) / p.lambda);
}

std::vector<double> sample(std::size_t n, const BcsParams& p, const DgfFamily& family,
                           std::uint64_t seed) {
  p.validate();
  std::vector<double> out;
  out.reserve(n);
  UniformStream uniform(seed);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(uniform.next(), p, family));
  return out;
}

}  // namespace bcs
}  // namespace bcsfit
