#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bcsfit/dataset.hpp"
#include "bcsfit/formula.hpp"
#include "bcsfit/regress.hpp"

namespace bcsfit {

class DesignError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kInterceptName = "(Intercept)";

/// Builds y, X, S and (for three-part formulas) Z. Numeric covariates pass
/// through; categorical ones get one indicator column per non-reference level,
/// named "var:level", with the alphabetically first level as reference. The
/// intercept, when present, is the first column.
RegressionData build_design(const Dataset& data, const FormulaAst& formula);

/// Sorted distinct levels of a categorical column.
std::vector<std::string> column_levels(const Column& column);

}  // namespace bcsfit
