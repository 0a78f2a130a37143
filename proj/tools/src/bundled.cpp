#include "bcsfit_cli/bundled.hpp"

#include <algorithm>
#include <cmath>

#include <bcsfit/bcs.hpp>
#include <bcsfit/link.hpp>
#include <bcsfit/rng.hpp>
#include <bcsfit/specfun.hpp>

namespace bcsfit::cli {
namespace {

// Generating model. Covariates enter on their natural scale; sex and
// residence through indicators for "male" and "urban".
struct Coefs {
  double intercept, age, male, years_sc, urban, income, children;
};
constexpr Coefs kAlpha{3.2, 0.012, 0.25, -0.06, -0.35, -0.09, -0.10};
constexpr Coefs kMu{3.6, 0.006, 0.10, 0.035, 0.20, 0.09, -0.06};
constexpr double kSigmaIntercept = -0.45;
constexpr double kSigmaIncome = -0.03;
constexpr double kLambda = 0.25;

double linear(const Coefs& c, double age, double male, double years, double urban, double income,
              double children) {
  return c.intercept + c.age * age + c.male * male + c.years_sc * years + c.urban * urban +
         c.income * income + c.children * children;
}

}  // namespace

Dataset generate_bundled_dataset(std::uint64_t seed, BundledTruth* truth) {
  const std::size_t n = kBundledRows;
  UniformStream covariates(mix_seed(seed, 0));
  UniformStream response(mix_seed(seed, 1));
  const DgfFamily family = DgfFamily::make(FamilyTag::BCLOII);
  const Link logit(LinkKind::logit);

  std::vector<double> age(n), years(n), income(n), children(n), y(n);
  std::vector<std::string> sex(n), residence(n);
  for (std::size_t i = 0; i < n; ++i) {
    age[i] = std::floor(18.0 + 62.0 * covariates.next());
    const bool male = covariates.next() < 0.48;
    sex[i] = male ? "male" : "female";
    const bool urban = covariates.next() < 0.82;
    residence[i] = urban ? "urban" : "rural";
    years[i] = std::floor(17.0 * covariates.next());
    // Monthly per-capita income in thousands, log-normal and strictly positive.
    const double z = specfun::std_normal_quantile(covariates.next());
    const double raw = std::exp(0.3 + 0.06 * years[i] + 0.7 * z);
    income[i] = std::max(0.001, std::round(1000.0 * raw) / 1000.0);
    children[i] = std::floor(4.0 * std::pow(covariates.next(), 1.8));

    const double m = male ? 1.0 : 0.0;
    const double u = urban ? 1.0 : 0.0;
    const double alpha =
        logit.inverse(linear(kAlpha, age[i], m, years[i], u, income[i], children[i]));
    const double mu = std::exp(linear(kMu, age[i], m, years[i], u, income[i], children[i]));
    const double sigma = std::exp(kSigmaIntercept + kSigmaIncome * income[i]);
    const double a = response.next();
    const double b = response.next();
    y[i] = a <= alpha ? 0.0 : bcs::quantile(b, {mu, sigma, kLambda}, family);
  }

  Dataset data;
  data.add_numeric("y", y);
  data.add_numeric("age", age);
  data.add_categorical("sex", sex);
  data.add_numeric("years_sc", years);
  data.add_categorical("residence", residence);
  data.add_numeric("income", income);
  data.add_numeric("children", children);

  if (truth) {
    truth->n = n;
    truth->seed = seed;
    truth->family = "BCLOII";
    truth->coefficients.clear();
    const auto push = [&](const char* block, const Coefs& c) {
      truth->coefficients.push_back({block, "(Intercept)", c.intercept});
      truth->coefficients.push_back({block, "age", c.age});
      truth->coefficients.push_back({block, "sex:male", c.male});
      truth->coefficients.push_back({block, "years_sc", c.years_sc});
      truth->coefficients.push_back({block, "residence:urban", c.urban});
      truth->coefficients.push_back({block, "income", c.income});
      truth->coefficients.push_back({block, "children", c.children});
    };
    push("alpha", kAlpha);
    push("mu", kMu);
    truth->coefficients.push_back({"sigma", "(Intercept)", kSigmaIntercept});
    truth->coefficients.push_back({"sigma", "income", kSigmaIncome});
    truth->coefficients.push_back({"lambda", "lambda", kLambda});
  }
  return data;
}

}  // namespace bcsfit::cli
