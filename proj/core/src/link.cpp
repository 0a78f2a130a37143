#include "bcsfit/link.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bcsfit/specfun.hpp"

namespace bcsfit {
namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::optional<Link> Link::parse(std::string_view name) {
  if (name == "log") return Link(LinkKind::log);
  if (name == "identity") return Link(LinkKind::identity);
  if (name == "sqrt") return Link(LinkKind::sqrt);
  if (name == "logit") return Link(LinkKind::logit);
  if (name == "probit") return Link(LinkKind::probit);
  if (name == "cloglog") return Link(LinkKind::cloglog);
  return std::nullopt;
}

std::string_view Link::name() const {
  switch (kind_) {
    case LinkKind::log: return "log";
    case LinkKind::identity: return "identity";
    case LinkKind::sqrt: return "sqrt";
    case LinkKind::logit: return "logit";
    case LinkKind::probit: return "probit";
    case LinkKind::cloglog: return "cloglog";
  }
  return "?";
}

bool Link::for_probability() const {
  return kind_ == LinkKind::logit || kind_ == LinkKind::probit || kind_ == LinkKind::cloglog;
}

double Link::apply(double x) const {
  switch (kind_) {
    case LinkKind::log: return std::log(x);
    case LinkKind::identity: return x;
    case LinkKind::sqrt: return std::sqrt(x);
    case LinkKind::logit: return std::log(x) - std::log1p(-x);
    case LinkKind::probit: return specfun::std_normal_quantile(x);
    case LinkKind::cloglog: return std::log(-std::log1p(-x));
  }
  return kNaN;
}

double Link::inverse(double eta) const {
  if (!std::isfinite(eta)) return kNaN;
  switch (kind_) {
    case LinkKind::log: return std::exp(eta);
    case LinkKind::identity: return eta > 0.0 ? eta : kNaN;
    case LinkKind::sqrt: return eta > 0.0 ? eta * eta : kNaN;
    case LinkKind::logit:
      return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    case LinkKind::probit: return specfun::std_normal_cdf(eta);
    case LinkKind::cloglog: return -std::expm1(-std::exp(eta));
  }
  return kNaN;
}

double Link::derivative(double x) const {
  switch (kind_) {
    case LinkKind::log: return 1.0 / x;
    case LinkKind::identity: return 1.0;
    case LinkKind::sqrt: return 0.5 / std::sqrt(x);
    case LinkKind::logit: return 1.0 / (x * (1.0 - x));
    case LinkKind::probit:
      return 1.0 / specfun::std_normal_pdf(specfun::std_normal_quantile(x));
    case LinkKind::cloglog: return -1.0 / ((1.0 - x) * std::log1p(-x));
  }
  return kNaN;
}

}  // namespace bcsfit
