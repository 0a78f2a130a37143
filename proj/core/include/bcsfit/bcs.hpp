#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bcsfit/dgf.hpp"

namespace bcsfit {

/// Scale mu > 0, relative dispersion sigma > 0 and skewness lambda.
struct BcsParams {
  double mu = 1.0;
  double sigma = 1.0;
  double lambda = 0.0;

  /// Throws std::invalid_argument if an invariant is violated.
  void validate() const;
};

/// How log_pdf treats responses outside (0, inf).
enum class DomainPolicy {
  strict,      ///< throw std::domain_error
  permissive,  ///< return -inf (for optimizer line searches)
};

namespace bcs {

/// Box-Cox transform z = ((y/mu)^lambda - 1) / (sigma lambda), log branch at lambda = 0.
double transform_z(double y, const BcsParams& params);

/// dz/dlambda, continuous through lambda = 0.
double dz_dlambda(double y, const BcsParams& params);

/// log R(1 / (sigma |lambda|)); zero when lambda = 0.
double log_truncation(double sigma, double lambda, const DgfFamily& family);

/// r(delta^2) / R(delta) with delta = 1 / (sigma |lambda|); zero when lambda = 0.
double truncation_ratio(double sigma, double lambda, const DgfFamily& family);

double log_pdf(double y, const BcsParams& params, const DgfFamily& family,
               DomainPolicy policy = DomainPolicy::strict);
double pdf(double y, const BcsParams& params, const DgfFamily& family);

/// F(y); zero for y <= 0.
double cdf(double y, const BcsParams& params, const DgfFamily& family);

/// 1 - F(y), evaluated without cancellation in the upper tail.
double sf(double y, const BcsParams& params, const DgfFamily& family);

double quantile(double p, const BcsParams& params, const DgfFamily& family);

/// Inverse-CDF draws; identical output for identical seeds.
std::vector<double> sample(std::size_t n, const BcsParams& params, const DgfFamily& family,
                           std::uint64_t seed);

}  // namespace bcs
}  // namespace bcsfit
