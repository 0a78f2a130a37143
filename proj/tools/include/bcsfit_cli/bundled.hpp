#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <bcsfit/dataset.hpp>

namespace bcsfit::cli {

/// One coefficient of the generating model.
struct TruthCoefficient {
  std::string block;  // alpha, mu, sigma, lambda
  std::string name;
  double value;
};

struct BundledTruth {
  std::string family = "BCLOII";
  std::size_t n = 4232;
  std::uint64_t seed = 0;
  std::vector<TruthCoefficient> coefficients;
};

inline constexpr std::size_t kBundledRows = 4232;

/// Synthetic household-expenditure-like data with covariates age, sex,
/// years_sc, residence, income, children and a zero-adjusted BCLOII
/// response y (about 93% zeros). Deterministic per seed.
Dataset generate_bundled_dataset(std::uint64_t seed, BundledTruth* truth = nullptr);

}  // namespace bcsfit::cli
