#include "bcsfit/formula.hpp"

#include <algorithm>
#include <cctype>

namespace bcsfit {
namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  FormulaAst run() {
    FormulaAst f;
    skip();
    if (pos_ >= s_.size()) fail("expected response name");
    f.response = ident("expected response name");
    skip();
    expect('~');
    f.mu = part();
    skip();
    if (accept('|')) {
      f.sigma = part();
      skip();
      if (accept('|')) {
        f.alpha = part();
        skip();
        if (pos_ < s_.size() && s_[pos_] == '|') fail("at most three formula parts are allowed");
      }
    }
    skip();
    if (pos_ < s_.size()) fail(std::string("unexpected character '") + s_[pos_] + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw FormulaError("formula syntax error at offset " + std::to_string(pos_) + ": " + what,
                       pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident(const char* what) {
    skip();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail(what);
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  FormulaPart part() {
    FormulaPart p;
    bool saw_zero = false;
    bool saw_one = false;
    do {
      skip();
      const std::size_t at = pos_;
      if (pos_ < s_.size() && (s_[pos_] == '0' || s_[pos_] == '1') &&
          (pos_ + 1 >= s_.size() || !ident_char(s_[pos_ + 1]))) {
        const bool zero = s_[pos_] == '0';
        ++pos_;
        if ((zero && saw_zero) || (!zero && saw_one)) {
          pos_ = at;
          fail("duplicate term");
        }
        (zero ? saw_zero : saw_one) = true;
        continue;
      }
      std::string name = ident("expected a term");
      if (std::find(p.terms.begin(), p.terms.end(), name) != p.terms.end()) {
        pos_ = at;
        fail("duplicate term '" + name + "'");
      }
      p.terms.push_back(std::move(name));
    } while (accept('+'));
    if (saw_zero && saw_one) fail("a part cannot both add and drop the intercept");
    p.intercept = !saw_zero;
    return p;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string unparse_part(const FormulaPart& p) {
  std::string out;
  if (p.terms.empty()) return p.intercept ? "1" : "0";
  if (!p.intercept) out = "0";
  for (const auto& t : p.terms) {
    if (!out.empty()) out += " + ";
    out += t;
  }
  return out;
}

}  // namespace

FormulaError::FormulaError(const std::string& what, std::size_t offset)
    : std::invalid_argument(what), offset_(offset) {}

std::vector<std::string> FormulaAst::variables() const {
  std::vector<std::string> out{response};
  const auto add = [&](const FormulaPart& p) {
    for (const auto& t : p.terms) {
      if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    }
  };
  add(mu);
  add(sigma);
  if (alpha) add(*alpha);
  return out;
}

FormulaAst parse_formula(std::string_view text) { return Parser(text).run(); }

std::string unparse_formula(const FormulaAst& f) {
  std::string out = f.response + " ~ " + unparse_part(f.mu) + " | " + unparse_part(f.sigma);
  if (f.alpha) out += " | " + unparse_part(*f.alpha);
  return out;
}

}  // namespace bcsfit
