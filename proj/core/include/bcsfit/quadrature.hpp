#pragma once

#include <functional>
#include <stdexcept>

#include "bcsfit/specfun.hpp"

namespace bcsfit::quadrature {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Integrand = std::function<double(double)>;

// Global adaptive Gauss-Kronrod (7/15) integration. Bounds may be infinite;
// infinite ranges are mapped onto finite ones before subdivision.
Result integrate(const Integrand& f, double lower, double upper,
                 const PrecisionPolicy& policy = {});

// Same as integrate() but throws QuadratureError when the tolerance was not met.
double integrate_or_throw(const Integrand& f, double lower, double upper,
                          const PrecisionPolicy& policy = {});

}  // namespace bcsfit::quadrature
