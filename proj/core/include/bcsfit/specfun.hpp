#pragma once

#include <cstddef>

namespace bcsfit {

/// Tolerance budget shared by every routine that integrates numerically.
struct PrecisionPolicy {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_quadrature_subdivisions = 200;

  /// Throws std::invalid_argument when a field violates its invariant.
  void validate() const;
};

namespace specfun {

/// Standard normal CDF. Rejects NaN and infinities.
double std_normal_cdf(double x);

/// Standard normal density.
double std_normal_pdf(double x);

/// Inverse of std_normal_cdf on the open interval (0, 1) (Wichura AS241).
double std_normal_quantile(double p);

/// log Gamma(x) for x > 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x).
double reg_lower_incomplete_gamma(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x), computed
/// without cancellation for large x.
double reg_upper_incomplete_gamma(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_incomplete_beta(double a, double b, double x);

/// I_x(a, b) with the complement 1 - x supplied separately so callers with
/// x close to 1 keep full relative precision in the tail.
double reg_incomplete_beta(double a, double b, double x, double one_minus_x);

/// log B(a, b).
double log_beta(double a, double b);

/// Modified Bessel function of the second kind, order one.
double bessel_k1(double x);

enum class OrderStatMethod {
  blom,   ///< Phi^-1((i - 0.375) / (n + 0.25))
  exact,  ///< numerical integration of the order-statistic density
};

/// Expected value of the i-th order statistic (1-based) in a standard normal
/// sample of size n.
double normal_order_stat_mean(std::size_t i, std::size_t n,
                              OrderStatMethod method = OrderStatMethod::blom,
                              const PrecisionPolicy& policy = {});

}  // namespace specfun
}  // namespace bcsfit
