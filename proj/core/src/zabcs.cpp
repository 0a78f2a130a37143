#include "bcsfit/zabcs.hpp"

#include <cmath>
#include <stdexcept>

#include "bcsfit/rng.hpp"

namespace bcsfit {

void ZabcsParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ZABCS: alpha must lie in (0, 1)");
  continuous.validate();
}

namespace zabcs {

bool is_zero(double y, double zero_threshold) {
  return zero_threshold > 0.0 ? std::abs(y) <= zero_threshold : y == 0.0;
}

double density_or_mass(double y, const ZabcsParams& p, const DgfFamily& family) {
  if (!(y >= 0.0)) throw std::domain_error("density_or_mass: response must be nonnegative");
  if (y == 0.0) return p.alpha;
  return (1.0 - p.alpha) * bcs::pdf(y, p.continuous, family);
}

double log_density_or_mass(double y, const ZabcsParams& p, const DgfFamily& family) {
  if (!(y >= 0.0)) throw std::domain_error("log_density_or_mass: response must be nonnegative");
  if (y == 0.0) return std::log(p.alpha);
  return std::log1p(-p.alpha) + bcs::log_pdf(y, p.continuous, family);
}

double cdf(double y, const ZabcsParams& p, const DgfFamily& family) {
  if (std::isnan(y)) throw std::domain_error("cdf: NaN response");
  if (y < 0.0) return 0.0;
  return p.alpha + (1.0 - p.alpha) * bcs::cdf(y, p.continuous, family);
}

double quantile(double prob, const ZabcsParams& p, const DgfFamily& family) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("quantile: p must lie in (0, 1)");
  if (prob <= p.alpha) return 0.0;
  return bcs::quantile((prob - p.alpha) / (1.0 - p.alpha), p.continuous, family);
}

std::vector<double> sample(std::size_t n, const ZabcsParams& p, const DgfFamily& family,
                           std::uint64_t seed) {
  p.validate();
  std::vector<double> out;
  out.reserve(n);
  UniformStream uniform(seed);
  for (std::size_t i = 0; i < n; ++i) out.push_back(quantile(uniform.next(), p, family));
  return out;
}

}  // namespace zabcs
}  // namespace bcsfit
