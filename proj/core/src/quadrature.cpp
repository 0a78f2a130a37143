#include "bcsfit/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace bcsfit::quadrature {
namespace {

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f_left{};
  std::array<double, 7> f_right{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double fl = f(center - dx);
    const double fr = f(center + dx);
    f_left[j] = fl;
    f_right[j] = fr;
    kronrod += kKronrodWeights[j] * (fl + fr);
    abs_sum += kKronrodWeights[j] * (std::abs(fl) + std::abs(fr));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (fl + fr);
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
  }
  const double value = kronrod * half;
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  const double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * abs_sum, error);
  }
  return {a, b, value, error};
}

Result integrate_finite(const Integrand& f, double a, double b, const PrecisionPolicy& policy) {
  Result out;
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  out.evaluations = 15;
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int subdivisions = 0;
  auto tolerance = [&] { return std::max(policy.abs_tol, policy.rel_tol * std::abs(total)); };
  while (total_err > tolerance() && subdivisions < policy.max_quadrature_subdivisions) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;  // interval cannot be split further in double precision
    }
    Segment left = gauss_kronrod(f, worst.a, mid);
    Segment right = gauss_kronrod(f, mid, worst.b);
    out.evaluations += 30;
    ++subdivisions;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.abs_error = total_err;
  out.subdivisions = subdivisions;
  out.converged = total_err <= std::max(policy.abs_tol, policy.rel_tol * std::abs(total));
  return out;
}

}  // namespace

Result integrate(const Integrand& f, double lower, double upper, const PrecisionPolicy& policy) {
  policy.validate();
  if (std::isnan(lower) || std::isnan(upper)) {
    throw std::invalid_argument("integrate: NaN bound");
  }
  if (lower == upper) return {0.0, 0.0, 0, 0, true};
  if (lower > upper) {
    Result r = integrate(f, upper, lower, policy);
    r.value = -r.value;
    return r;
  }
  const bool lower_inf = std::isinf(lower);
  const bool upper_inf = std::isinf(upper);
  if (!lower_inf && !upper_inf) return integrate_finite(f, lower, upper, policy);

  // x = a + (1 - t) / t maps t in (0, 1] onto [a, inf).
  auto guard = [](double v) { return std::isfinite(v) ? v : 0.0; };
  if (!lower_inf) {
    const double a = lower;
    Integrand g = [&f, a, guard](double t) {
      const double x = a + (1.0 - t) / t;
      if (!std::isfinite(x)) return 0.0;
      return guard(f(x) / (t * t));
    };
    return integrate_finite(g, 0.0, 1.0, policy);
  }
  if (!upper_inf) {
    const double b = upper;
    Integrand g = [&f, b, guard](double t) {
      const double x = b - (1.0 - t) / t;
      if (!std::isfinite(x)) return 0.0;
      return guard(f(x) / (t * t));
    };
    return integrate_finite(g, 0.0, 1.0, policy);
  }
  Integrand g = [&f, guard](double t) {
    const double x = (1.0 - t) / t;
    if (!std::isfinite(x)) return 0.0;
    return guard((f(x) + f(-x)) / (t * t));
  };
  return integrate_finite(g, 0.0, 1.0, policy);
}

double integrate_or_throw(const Integrand& f, double lower, double upper,
                          const PrecisionPolicy& policy) {
  const Result r = integrate(f, lower, upper, policy);
  if (!r.converged) {
    throw QuadratureError("quadrature did not reach tolerance (estimated error " +
                          std::to_string(r.abs_error) + " after " +
                          std::to_string(r.subdivisions) + " subdivisions)");
  }
  return r.value;
}

}  // namespace bcsfit::quadrature
