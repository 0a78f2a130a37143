#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "bcsfit/specfun.hpp"

namespace bcsfit {

/// The eight density generating functions supported for the continuous part.
enum class FamilyTag { BCNO, BCT, BCPE, BCLOI, BCLOII, BCHP, BCSL, BCSN };

inline constexpr std::array<FamilyTag, 8> kAllFamilies = {
    FamilyTag::BCNO,   FamilyTag::BCT,  FamilyTag::BCPE, FamilyTag::BCLOI,
    FamilyTag::BCLOII, FamilyTag::BCHP, FamilyTag::BCSL, FamilyTag::BCSN};

std::string_view family_name(FamilyTag tag);
std::optional<FamilyTag> parse_family_tag(std::string_view text);

/// True for families carrying the extra shape parameter zeta.
bool family_has_zeta(FamilyTag tag);

/// Smallest admissible zeta; the bound is inclusive only for BCPE (zeta >= 1).
double zeta_lower_bound(FamilyTag tag);
bool zeta_in_domain(FamilyTag tag, double zeta);

/// A density generating function r(u) together with its extra parameter.
///
/// Immutable once built. Normalising constants are computed at construction so
/// the per-observation routines below stay cheap.
class DgfFamily {
 public:
  /// Throws std::invalid_argument when zeta is missing, forbidden or out of
  /// the family's domain.
  static DgfFamily make(FamilyTag tag, std::optional<double> zeta = std::nullopt);

  /// Parses an ASCII tag such as "BCT".
  static DgfFamily parse(std::string_view tag, std::optional<double> zeta = std::nullopt);

  FamilyTag tag() const { return tag_; }
  std::optional<double> zeta() const { return zeta_; }
  std::string_view name() const { return family_name(tag_); }
  /// "BCT(zeta=4)" or "BCNO".
  std::string label() const;

  double log_norm() const { return log_norm_; }
  double shape_scale() const { return shape_scale_; }

  bool operator==(const DgfFamily& other) const {
    return tag_ == other.tag_ && zeta_ == other.zeta_;
  }

 private:
  DgfFamily() = default;
  FamilyTag tag_ = FamilyTag::BCNO;
  std::optional<double> zeta_;
  double log_norm_ = 0.0;
  // BCPE: 1 / (2 p(zeta)^zeta). Unused elsewhere.
  double shape_scale_ = 0.0;
};

namespace dgf {

/// log r(u) for u >= 0.
double log_generator(const DgfFamily& family, double u);

/// v(t) = -2 r'(t^2) / r(t^2). Infinite at t = 0 for BCPE with zeta < 2.
double score_weight(const DgfFamily& family, double t);

/// t * v(t); finite everywhere, including t = 0 for BCPE.
double z_score_weight(const DgfFamily& family, double t);

/// Base CDF R(x) = int_{-inf}^x r(u^2) du.
double base_cdf(const DgfFamily& family, double x);

/// 1 - R(x), evaluated directly so it keeps relative precision in the upper tail.
double base_sf(const DgfFamily& family, double x);

/// log R(x) without rounding R to one in the upper tail.
double log_base_cdf(const DgfFamily& family, double x);

/// Inverse of base_cdf on (0, 1).
double base_quantile(const DgfFamily& family, double p);

/// Numerical value of int_0^inf u^{-1/2} r(u) du (should be one).
double normalization_integral(const DgfFamily& family, const PrecisionPolicy& policy = {});

}  // namespace dgf
}  // namespace bcsfit
