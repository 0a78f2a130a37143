#include "bcsfit/design.hpp"

#include <algorithm>
#include <set>

namespace bcsfit {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;

struct Block {
  MatrixXd M;
  std::vector<std::string> names;
};

Block build_block(const Dataset& data, const FormulaPart& part, const char* what) {
  const std::size_t n = data.rows();
  std::vector<std::vector<double>> cols;
  std::vector<std::string> names;
  if (part.intercept) {
    cols.emplace_back(n, 1.0);
    names.emplace_back(kInterceptName);
  }
  for (const auto& term : part.terms) {
    const Column* c = data.find(term);
    if (!c) throw DesignError(std::string(what) + ": unknown column '" + term + "'");
    if (c->numeric) {
      cols.push_back(c->values);
      names.push_back(term);
      continue;
    }
    const auto levels = column_levels(*c);
    if (levels.size() < 2) {
      throw DesignError(std::string(what) + ": categorical column '" + term +
                        "' needs at least two levels");
    }
    for (std::size_t l = 1; l < levels.size(); ++l) {
      std::vector<double> ind(n);
      for (std::size_t i = 0; i < n; ++i) ind[i] = c->labels[i] == levels[l] ? 1.0 : 0.0;
      cols.push_back(std::move(ind));
      names.push_back(term + ":" + levels[l]);
    }
  }
  if (cols.empty()) {
    throw DesignError(std::string(what) + " part has no columns; it needs at least an intercept");
  }
  Block b;
  b.M.resize(static_cast<Index>(n), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) b.M(static_cast<Index>(i), static_cast<Index>(j)) = cols[j][i];
  }
  b.names = std::move(names);

  Eigen::ColPivHouseholderQR<MatrixXd> qr(b.M);
  if (qr.rank() < b.M.cols()) {
    // Columns pivoted past the rank are combinations of the others.
    std::string list;
    const auto& perm = qr.colsPermutation().indices();
    for (Index k = qr.rank(); k < b.M.cols(); ++k) {
      if (!list.empty()) list += ", ";
      list += b.names[static_cast<std::size_t>(perm[k])];
    }
    throw DesignError(std::string(what) + " design is rank deficient; collinear columns: " + list);
  }
  return b;
}

}  // namespace

std::vector<std::string> column_levels(const Column& column) {
  std::set<std::string> s;
  for (std::size_t i = 0; i < column.labels.size(); ++i) {
    if (!column.missing[i]) s.insert(column.labels[i]);
  }
  return {s.begin(), s.end()};
}

RegressionData build_design(const Dataset& data, const FormulaAst& formula) {
  const Column* resp = data.find(formula.response);
  if (!resp) throw DesignError("unknown response column '" + formula.response + "'");
  if (!resp->numeric) throw DesignError("response '" + formula.response + "' must be numeric");
  for (std::size_t i = 0; i < data.rows(); ++i) {
    if (resp->missing[i]) throw DesignError("response has missing values");
  }
  RegressionData out;
  out.y = Eigen::Map<const Eigen::VectorXd>(resp->values.data(), static_cast<Index>(data.rows()));
  Block x = build_block(data, formula.mu, "mu");
  Block s = build_block(data, formula.sigma, "sigma");
  out.X = std::move(x.M);
  out.x_names = std::move(x.names);
  out.S = std::move(s.M);
  out.s_names = std::move(s.names);
  if (formula.alpha) {
    Block z = build_block(data, *formula.alpha, "alpha");
    out.Z = std::move(z.M);
    out.z_names = std::move(z.names);
  }
  return out;
}

}  // namespace bcsfit
