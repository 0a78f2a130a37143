#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bcsfit/bcs.hpp"

namespace bcsfit {

/// Point mass alpha at zero mixed with a BCS law for the positive part.
struct ZabcsParams {
  double alpha = 0.5;
  BcsParams continuous;

  void validate() const;
};

namespace zabcs {

/// True when y counts as a zero observation. The default threshold of 0 means
/// exact equality; a positive threshold treats |y| <= threshold as zero.
bool is_zero(double y, double zero_threshold = 0.0);

/// alpha at y = 0, (1 - alpha) f(y) for y > 0.
double density_or_mass(double y, const ZabcsParams& params, const DgfFamily& family);

/// log of density_or_mass.
double log_density_or_mass(double y, const ZabcsParams& params, const DgfFamily& family);

double cdf(double y, const ZabcsParams& params, const DgfFamily& family);

/// Zero for p <= alpha, otherwise the BCS quantile at (p - alpha) / (1 - alpha).
double quantile(double p, const ZabcsParams& params, const DgfFamily& family);

std::vector<double> sample(std::size_t n, const ZabcsParams& params, const DgfFamily& family,
                           std::uint64_t seed);

}  // namespace zabcs
}  // namespace bcsfit
