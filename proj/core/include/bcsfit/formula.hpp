#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bcsfit {

struct FormulaPart {
  bool intercept = true;
  std::vector<std::string> terms;

  bool operator==(const FormulaPart&) const = default;
};

/// response ~ mu-part | sigma-part | alpha-part. A third part means a
/// zero-adjusted model.
struct FormulaAst {
  std::string response;
  FormulaPart mu;
  FormulaPart sigma;
  std::optional<FormulaPart> alpha;

  bool zero_adjusted() const { return alpha.has_value(); }
  /// Response first, then each distinct covariate in order of appearance.
  std::vector<std::string> variables() const;

  bool operator==(const FormulaAst&) const = default;
};

class FormulaError : public std::invalid_argument {
 public:
  FormulaError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Grammar:
///   formula := ident "~" part ("|" part ("|" part)?)?
///   part    := item ("+" item)*
///   item    := ident | "1" | "0"
/// "0" drops the part's intercept. Errors carry the byte offset.
FormulaAst parse_formula(std::string_view text);

/// Canonical text; parse_formula(unparse_formula(f)) == f.
std::string unparse_formula(const FormulaAst& formula);

}  // namespace bcsfit
