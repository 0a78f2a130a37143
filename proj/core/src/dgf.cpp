#include "bcsfit/dgf.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bcsfit/quadrature.hpp"

namespace bcsfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// BCLOI normalising constant 1 / (sqrt(pi) * (1 - 2^{3/2}) * zeta_R(-1/2)),
// about 1.484300027.
constexpr double kRiemannZetaMinusHalf = -0.20788622497735456601730672539704930;
const double kLogisticTypeIConstant =
    1.0 / (std::sqrt(std::numbers::pi) * (1.0 - 2.0 * std::numbers::sqrt2) * kRiemannZetaMinusHalf);

// Quadrature settings for the families whose base CDF has no closed form.
// The absolute floor is tiny so far-tail masses keep relative precision.
const PrecisionPolicy kTailPolicy{1e-300, 1e-12, 200};

// Sum_{k>=0} x^k / (a (a+1) ... (a+k)), i.e. gamma(a, x) e^x x^{-a}.
double kummer_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < 10000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Sum_{k>=1} x^{k-1} / ((a+1) ... (a+k)).
double kummer_tail_series(double a, double x) {
  double term = 1.0 / (a + 1.0);
  double sum = term;
  for (int k = 2; k < 10000; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double zeta_of(const DgfFamily& f) { return *f.zeta(); }

// 1 - R(x) for x >= 0.
double upper_tail(const DgfFamily& f, double x) {
  if (x == 0.0) return 0.5;
  if (std::isinf(x)) return 0.0;
  switch (f.tag()) {
    case FamilyTag::BCNO:
      return 0.5 * std::erfc(x / std::numbers::sqrt2);
    case FamilyTag::BCT: {
      const double nu = zeta_of(f);
      if (x <= 1.0) {
        const double denom = nu + x * x;
        return 0.5 * specfun::reg_incomplete_beta(0.5 * nu, 0.5, nu / denom, x * x / denom);
      }
      // x * x may overflow; work with r = nu / x^2 instead. For tiny r the
      // leading series term w^a / (a B(a, 1/2)) is exact to rounding.
      const double r = nu / x / x;
      const double a = 0.5 * nu;
      if (r < 1e-30) {
        const double log_w = std::log(nu) - 2.0 * std::log(x);
        return 0.5 * std::exp(a * log_w - std::log(a) - specfun::log_beta(a, 0.5));
      }
      return 0.5 * specfun::reg_incomplete_beta(a, 0.5, r / (1.0 + r), 1.0 / (1.0 + r));
    }
    case FamilyTag::BCPE: {
      const double zeta = zeta_of(f);
      return 0.5 * specfun::reg_upper_incomplete_gamma(1.0 / zeta,
                                                        f.shape_scale() * std::pow(x, zeta));
    }
    case FamilyTag::BCLOII:
      return 1.0 / (1.0 + std::exp(x));
    case FamilyTag::BCSN: {
      const double arg = 2.0 / zeta_of(f) * std::sinh(x);
      return 0.5 * std::erfc(arg / std::numbers::sqrt2);
    }
    case FamilyTag::BCSL: {
      // Slash law: Z = N / U^{1 / (2 zeta)}.
      const double zeta = zeta_of(f);
      const double a = zeta + 0.5;
      const double y = 0.5 * x * x;
      const double normal_tail = 0.5 * std::erfc(x / std::numbers::sqrt2);
      double correction;
      if (y < 25.0) {
        correction = x * std::exp(-y) * kummer_series(a, y) /
                     (2.0 * std::sqrt(2.0 * std::numbers::pi));
      } else {
        correction = std::exp(-2.0 * zeta * std::log(x) + (zeta - 1.0) * std::numbers::ln2 +
                              specfun::log_gamma(a) - 0.5 * std::log(std::numbers::pi)) *
                     specfun::reg_lower_incomplete_gamma(a, y);
      }
      return normal_tail + correction;
    }
    case FamilyTag::BCLOI:
    case FamilyTag::BCHP: {
      auto density = [&f](double t) { return std::exp(dgf::log_generator(f, t * t)); };
      return quadrature::integrate(density, x, kInf, kTailPolicy).value;
    }
  }
  throw std::logic_error("upper_tail: unknown family");
}

double tail_density(const DgfFamily& f, double x) {
  return std::exp(dgf::log_generator(f, x * x));
}

// Solves upper_tail(x) = q for x >= 0, q in (0, 1/2).
double invert_upper_tail(const DgfFamily& f, double q) {
  const double log_q = std::log(q);
  auto g = [&](double x) { return std::log(upper_tail(f, x)) - log_q; };
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("base_quantile: failed to bracket root");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double tail = upper_tail(f, x);
    const double gx = std::log(tail) - log_q;
    if (gx > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (gx == 0.0) return x;
    const double slope = -tail_density(f, x) / tail;
    double next = x - gx / slope;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
    if (hi - lo <= 1e-15 * std::max(1.0, lo)) return x;
  }
  return x;
}

}  // namespace

std::string_view family_name(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::BCNO: return "BCNO";
    case FamilyTag::BCT: return "BCT";
    case FamilyTag::BCPE: return "BCPE";
    case FamilyTag::BCLOI: return "BCLOI";
    case FamilyTag::BCLOII: return "BCLOII";
    case FamilyTag::BCHP: return "BCHP";
    case FamilyTag::BCSL: return "BCSL";
    case FamilyTag::BCSN: return "BCSN";
  }
  return "?";
}

std::optional<FamilyTag> parse_family_tag(std::string_view text) {
  for (FamilyTag tag : kAllFamilies) {
    if (family_name(tag) == text) return tag;
  }
  return std::nullopt;
}

bool family_has_zeta(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::BCNO:
    case FamilyTag::BCLOI:
    case FamilyTag::BCLOII:
      return false;
    default:
      return true;
  }
}

double zeta_lower_bound(FamilyTag tag) { return tag == FamilyTag::BCPE ? 1.0 : 0.0; }

bool zeta_in_domain(FamilyTag tag, double zeta) {
  if (!std::isfinite(zeta)) return false;
  return tag == FamilyTag::BCPE ? zeta >= 1.0 : zeta > 0.0;
}

DgfFamily DgfFamily::make(FamilyTag tag, std::optional<double> zeta) {
  if (family_has_zeta(tag) && !zeta) {
    throw std::invalid_argument(std::string(family_name(tag)) + " requires an extra parameter zeta");
  }
  if (!family_has_zeta(tag) && zeta) {
    throw std::invalid_argument(std::string(family_name(tag)) + " takes no extra parameter zeta");
  }
  if (zeta && !zeta_in_domain(tag, *zeta)) {
    std::ostringstream msg;
    msg << "zeta = " << *zeta << " outside the domain of " << family_name(tag)
        << (tag == FamilyTag::BCPE ? " (zeta >= 1)" : " (zeta > 0)");
    throw std::invalid_argument(msg.str());
  }
  DgfFamily f;
  f.tag_ = tag;
  f.zeta_ = zeta;
  switch (tag) {
    case FamilyTag::BCNO:
      f.log_norm_ = -kHalfLog2Pi;
      break;
    case FamilyTag::BCT: {
      const double nu = *zeta;
      f.log_norm_ = 0.5 * nu * std::log(nu) - specfun::log_beta(0.5, 0.5 * nu);
      break;
    }
    case FamilyTag::BCPE: {
      const double z = *zeta;
      const double log_p = -std::numbers::ln2 / z +
                           0.5 * (specfun::log_gamma(1.0 / z) - specfun::log_gamma(3.0 / z));
      f.log_norm_ = std::log(z) - log_p - (1.0 + 1.0 / z) * std::numbers::ln2 -
                    specfun::log_gamma(1.0 / z);
      f.shape_scale_ = 0.5 * std::exp(-z * log_p);
      break;
    }
    case FamilyTag::BCLOI:
      f.log_norm_ = std::log(kLogisticTypeIConstant);
      break;
    case FamilyTag::BCLOII:
      f.log_norm_ = 0.0;
      break;
    case FamilyTag::BCHP:
      f.log_norm_ = -std::log(2.0 * specfun::bessel_k1(*zeta));
      break;
    case FamilyTag::BCSL:
      f.log_norm_ = std::log(*zeta) - kHalfLog2Pi;
      break;
    case FamilyTag::BCSN:
      // 2 / (zeta sqrt(2 pi)) so that R(x) = Phi((2 / zeta) sinh x) integrates to one.
      f.log_norm_ = std::log(2.0 / *zeta) - kHalfLog2Pi;
      break;
  }
  return f;
}

DgfFamily DgfFamily::parse(std::string_view tag, std::optional<double> zeta) {
  auto parsed = parse_family_tag(tag);
  if (!parsed) throw std::invalid_argument("unknown family '" + std::string(tag) + "'");
  return make(*parsed, zeta);
}

std::string DgfFamily::label() const {
  std::ostringstream out;
  out << name();
  if (zeta_) out << "(zeta=" << *zeta_ << ")";
  return out.str();
}

namespace dgf {

double log_generator(const DgfFamily& f, double u) {
  if (!(u >= 0.0)) throw std::domain_error("log_generator: u must be nonnegative");
  if (std::isinf(u)) return -kInf;
  switch (f.tag()) {
    case FamilyTag::BCNO:
      return f.log_norm() - 0.5 * u;
    case FamilyTag::BCT: {
      const double nu = zeta_of(f);
      return f.log_norm() - 0.5 * (nu + 1.0) * std::log(nu + u);
    }
    case FamilyTag::BCPE:
      return f.log_norm() - f.shape_scale() * std::pow(u, 0.5 * zeta_of(f));
    case FamilyTag::BCLOI:
      return f.log_norm() - u - 2.0 * std::log1p(std::exp(-u));
    case FamilyTag::BCLOII: {
      const double s = std::sqrt(u);
      return -s - 2.0 * std::log1p(std::exp(-s));
    }
    case FamilyTag::BCHP:
      return f.log_norm() - zeta_of(f) * std::sqrt(1.0 + u);
    case FamilyTag::BCSL: {
      const double zeta = zeta_of(f);
      const double a = zeta + 0.5;
      const double x = 0.5 * u;
      if (x < 25.0) return f.log_norm() - x + std::log(kummer_series(a, x));
      return std::log(zeta) + zeta * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi) -
             a * std::log(u) + specfun::log_gamma(a) +
             std::log(specfun::reg_lower_incomplete_gamma(a, x));
    }
    case FamilyTag::BCSN: {
      const double s = std::sqrt(u);
      const double zeta = zeta_of(f);
      const double sh = std::sinh(s);
      if (!std::isfinite(sh)) return -kInf;
      const double log_cosh = s + std::log1p(std::exp(-2.0 * s)) - std::numbers::ln2;
      return f.log_norm() + log_cosh - 2.0 / (zeta * zeta) * sh * sh;
    }
  }
  throw std::logic_error("log_generator: unknown family");
}

double score_weight(const DgfFamily& f, double t) {
  if (!std::isfinite(t)) throw std::domain_error("score_weight: t must be finite");
  const double u = t * t;
  switch (f.tag()) {
    case FamilyTag::BCNO:
      return 1.0;
    case FamilyTag::BCT: {
      const double nu = zeta_of(f);
      return (nu + 1.0) / (nu + u);
    }
    case FamilyTag::BCPE: {
      const double zeta = zeta_of(f);
      if (t == 0.0) {
        if (zeta < 2.0) return kInf;
        return zeta == 2.0 ? zeta * f.shape_scale() : 0.0;
      }
      return zeta * f.shape_scale() * std::pow(std::abs(t), zeta - 2.0);
    }
    case FamilyTag::BCLOI:
      return 2.0 * std::tanh(0.5 * u);
    case FamilyTag::BCLOII: {
      const double s = std::abs(t);
      if (s < 1e-4) return 0.5 - s * s / 24.0;
      return std::tanh(0.5 * s) / s;
    }
    case FamilyTag::BCHP:
      return zeta_of(f) / std::sqrt(1.0 + u);
    case FamilyTag::BCSL: {
      const double a = zeta_of(f) + 0.5;
      const double x = 0.5 * u;
      if (x < 25.0) {
        const double e = kummer_tail_series(a, x);
        return a * e / (1.0 + x * e);
      }
      return 2.0 * a / u -
             std::exp((a - 1.0) * std::log(x) - x - specfun::log_gamma(a)) /
                 specfun::reg_lower_incomplete_gamma(a, x);
    }
    case FamilyTag::BCSN: {
      const double s = std::abs(t);
      const double zeta = zeta_of(f);
      if (s < 1e-6) return 4.0 / (zeta * zeta) - 1.0;
      return 2.0 / (zeta * zeta) * std::sinh(2.0 * s) / s - std::tanh(s) / s;
    }
  }
  throw std::logic_error("score_weight: unknown family");
}

double z_score_weight(const DgfFamily& f, double t) {
  if (f.tag() == FamilyTag::BCPE) {
    if (!std::isfinite(t)) throw std::domain_error("z_score_weight: t must be finite");
    if (t == 0.0) return 0.0;
    const double zeta = zeta_of(f);
    return std::copysign(zeta * f.shape_scale() * std::pow(std::abs(t), zeta - 1.0), t);
  }
  return t * score_weight(f, t);
}

double base_cdf(const DgfFamily& f, double x) {
  if (std::isnan(x)) throw std::domain_error("base_cdf: NaN argument");
  return x >= 0.0 ? 1.0 - upper_tail(f, x) : upper_tail(f, -x);
}

double base_sf(const DgfFamily& f, double x) {
  if (std::isnan(x)) throw std::domain_error("base_sf: NaN argument");
  return x >= 0.0 ? upper_tail(f, x) : 1.0 - upper_tail(f, -x);
}

double log_base_cdf(const DgfFamily& f, double x) {
  if (std::isnan(x)) throw std::domain_error("log_base_cdf: NaN argument");
  return x >= 0.0 ? std::log1p(-upper_tail(f, x)) : std::log(upper_tail(f, -x));
}

double base_quantile(const DgfFamily& f, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("base_quantile: p must lie in (0, 1)");
  switch (f.tag()) {
    case FamilyTag::BCNO:
      return specfun::std_normal_quantile(p);
    case FamilyTag::BCLOII:
      return std::log(p) - std::log1p(-p);
    case FamilyTag::BCSN:
      return std::asinh(0.5 * zeta_of(f) * specfun::std_normal_quantile(p));
    default:
      break;
  }
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -invert_upper_tail(f, p);
  return invert_upper_tail(f, 1.0 - p);
}

double normalization_integral(const DgfFamily& f, const PrecisionPolicy& policy) {
  // Substituting u = t^2 removes the u^{-1/2} endpoint singularity.
  auto integrand = [&f](double t) { return 2.0 * std::exp(log_generator(f, t * t)); };
  return quadrature::integrate_or_throw(integrand, 0.0, kInf, policy);
}

}  // namespace dgf
}  // namespace bcsfit
