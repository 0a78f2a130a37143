#pragma once

#include <optional>
#include <string_view>

namespace bcsfit {

enum class LinkKind { log, identity, sqrt, logit, probit, cloglog };

/// Monotone link d(x) = eta. log/identity/sqrt act on (0, inf), the rest on (0, 1).
class Link {
 public:
  constexpr Link() = default;
  constexpr explicit Link(LinkKind kind) : kind_(kind) {}

  static std::optional<Link> parse(std::string_view name);

  LinkKind kind() const { return kind_; }
  std::string_view name() const;
  bool for_probability() const;

  /// d(x).
  double apply(double x) const;
  /// d^{-1}(eta); NaN when eta lies outside the image of the domain.
  double inverse(double eta) const;
  /// d'(x).
  double derivative(double x) const;

  bool operator==(const Link&) const = default;

 private:
  LinkKind kind_ = LinkKind::log;
};

}  // namespace bcsfit
