#include "bcsfit_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include <bcsfit/bcs.hpp>
#include <bcsfit/dataset.hpp>
#include <bcsfit/design.hpp>
#include <bcsfit/diagnostics.hpp>
#include <bcsfit/formula.hpp>
#include <bcsfit/parallel.hpp>
#include <bcsfit/regress.hpp>
#include <bcsfit/rng.hpp>
#include <bcsfit/zabcs.hpp>

#include "bcsfit_cli/bundled.hpp"

namespace bcsfit::cli {
namespace {

using json = nlohmann::ordered_json;
using Eigen::Index;
using Eigen::VectorXd;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- helpers

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

json table_json(const Table& t) {
  json j;
  j["name"] = t.name;
  j["columns"] = t.columns;
  json data = json::array();
  for (const auto& r : t.rows) {
    json row = json::array();
    for (double v : r) row.push_back(number_or_null(v));
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  return j;
}

void write_table_csv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_number(r[c]);
    out << '\n';
  }
}

void emit_json(const json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("'" + path + "' is not valid JSON: " + e.what());
  }
}

Link parse_link(const std::string& name, bool probability, const char* what) {
  const auto link = Link::parse(name);
  if (!link || link->for_probability() != probability) {
    throw UsageError(std::string("invalid ") + what + " link '" + name + "'");
  }
  return *link;
}

// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size()) {
      throw UsageError("invalid zeta grid '" + text + "' (expected lo:hi:step)");
    }
    parts.push_back(v);
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw UsageError("invalid zeta grid '" + text + "' (expected lo:hi:step with step > 0)");
  }
  std::vector<double> grid;
  for (int k = 0;; ++k) {
    double v = parts[0] + k * parts[2];
    if (v > parts[1] + 1e-9 * parts[2]) break;
    v = std::round(v * 1e10) / 1e10;
    grid.push_back(v);
    if (grid.size() > 100000) throw UsageError("zeta grid too large");
  }
  return grid;
}

std::string join_invocation(const std::vector<std::string>& args) {
  std::string s = "bcsfit";
  for (const auto& a : args) {
    const bool quote = a.find_first_of(" \t|~\"'") != std::string::npos || a.empty();
    s += ' ';
    if (quote) {
      s += '\'';
      for (char c : a) s += c == '\'' ? std::string("'\\''") : std::string(1, c);
      s += '\'';
    } else {
      s += a;
    }
  }
  return s;
}

// ---------------------------------------------------------------- model setup

struct ModelOptions {
  std::string data;
  std::string formula;
  std::string family;
  std::optional<double> zeta;
  std::string zeta_grid;
  std::optional<double> fix_lambda;
  std::string link_mu = "log";
  std::string link_sigma = "log";
  std::string link_alpha = "logit";
  std::string delimiter = ",";
  double zero_threshold = 0.0;
  unsigned threads = 0;
};

void add_model_options(CLI::App* app, ModelOptions& o) {
  app->add_option("--data", o.data, "CSV file with a header row");
  app->add_option("--formula", o.formula, "response ~ mu-part | sigma-part | alpha-part");
  app->add_option("--family", o.family, "BCNO, BCT, BCPE, BCLOI, BCLOII, BCHP, BCSL or BCSN");
  app->add_option("--zeta", o.zeta, "extra parameter, held fixed");
  app->add_option("--zeta-grid", o.zeta_grid, "lo:hi:step grid for selecting zeta");
  app->add_option("--fix-lambda", o.fix_lambda, "hold lambda at this value");
  app->add_option("--link-mu", o.link_mu, "log, identity or sqrt");
  app->add_option("--link-sigma", o.link_sigma, "log, identity or sqrt");
  app->add_option("--link-alpha", o.link_alpha, "logit, probit or cloglog");
  app->add_option("--delimiter", o.delimiter, "CSV field delimiter");
  app->add_option("--zero-threshold", o.zero_threshold, "|y| <= threshold counts as zero");
  app->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

struct Prepared {
  ModelOptions options;
  Dataset table;
  std::size_t rows_read = 0;
  std::size_t rows_dropped = 0;
  FormulaAst ast;
  RegressionData data;
  ModelSpec spec;
  FamilyTag tag = FamilyTag::BCNO;
  std::vector<double> grid;  // zeta grid, when given
};

Prepared prepare(const ModelOptions& o) {
  if (o.data.empty()) throw UsageError("--data is required");
  if (o.formula.empty()) throw UsageError("--formula is required");
  if (o.family.empty()) throw UsageError("--family is required");
  if (o.delimiter.size() != 1) throw UsageError("--delimiter must be a single character");
  Prepared p;
  p.options = o;
  const auto tag = parse_family_tag(o.family);
  if (!tag) throw UsageError("unknown family '" + o.family + "'");
  p.tag = *tag;
  p.ast = parse_formula(o.formula);

  CsvOptions csv;
  csv.delimiter = o.delimiter[0];
  const Dataset raw = read_csv_file(o.data, csv);
  p.rows_read = raw.rows();
  for (const auto& v : p.ast.variables()) {
    if (!raw.find(v)) throw UsageError("formula refers to unknown column '" + v + "'");
  }
  p.table = raw.drop_missing(p.ast.variables(), &p.rows_dropped);
  p.data = build_design(p.table, p.ast);

  p.spec.mu_link = parse_link(o.link_mu, false, "mu");
  p.spec.sigma_link = parse_link(o.link_sigma, false, "sigma");
  p.spec.alpha_link = parse_link(o.link_alpha, true, "alpha");
  p.spec.zero_threshold = o.zero_threshold;
  if (o.fix_lambda) {
    p.spec.lambda_free = false;
    p.spec.lambda_value = *o.fix_lambda;
  }
  if (!o.zeta_grid.empty()) p.grid = parse_grid(o.zeta_grid);
  if (family_has_zeta(p.tag)) {
    if (o.zeta) {
      p.spec.family = DgfFamily::make(p.tag, *o.zeta);
    } else if (p.grid.empty()) {
      throw UsageError("family " + o.family + " needs --zeta or --zeta-grid");
    }
  } else {
    if (o.zeta || !p.grid.empty()) throw UsageError("family " + o.family + " has no zeta");
    p.spec.family = DgfFamily::make(p.tag);
  }
  if (!p.ast.zero_adjusted()) {
    for (Index i = 0; i < p.data.y.size(); ++i) {
      if (p.data.y[i] == 0.0 || std::abs(p.data.y[i]) <= o.zero_threshold) {
        throw UsageError(
            "response has zeros: zeros require a third formula part (zero-adjusted model)");
      }
    }
  }
  return p;
}

// Grid rows outside the family domain are rejected up front.
struct GridOutcome {
  ZetaSelection selection;
  std::vector<std::pair<double, std::string>> rejected;
};

GridOutcome run_grid(const Prepared& p, ZetaCriterion criterion,
                     const FitControl& control) {
  GridOutcome g;
  std::vector<double> valid;
  for (double z : p.grid) {
    if (zeta_in_domain(p.tag, z)) {
      valid.push_back(z);
    } else {
      std::ostringstream msg;
      msg << "zeta " << z << " outside the " << family_name(p.tag) << " domain ("
          << (p.tag == FamilyTag::BCPE ? "zeta >= 1" : "zeta > 0") << ")";
      g.rejected.emplace_back(z, msg.str());
    }
  }
  if (valid.empty()) throw UsageError("zeta grid has no admissible values");
  ModelSpec spec = p.spec;
  spec.family = DgfFamily::make(p.tag, valid.front());
  g.selection = regress::select_zeta(p.data, spec, valid, criterion, control);
  return g;
}

json selection_json(const GridOutcome& g) {
  json j;
  j["criterion"] = g.selection.criterion == ZetaCriterion::upsilon ? "upsilon" : "profile_loglik";
  j["chosen_zeta"] = g.selection.zeta;
  json rows = json::array();
  std::vector<std::pair<double, json>> all;
  for (std::size_t k = 0; k < g.selection.rows.size(); ++k) {
    const ZetaRow& r = g.selection.rows[k];
    json row;
    row["zeta"] = r.zeta;
    row["status"] = r.ok ? std::string(optim::status_name(r.status)) : std::string("failed");
    row["loglik"] = r.ok ? number_or_null(r.loglik) : json(nullptr);
    row["upsilon"] = r.ok ? number_or_null(r.upsilon) : json(nullptr);
    row["chosen"] = k == g.selection.chosen;
    row["message"] = r.message;
    all.emplace_back(r.zeta, std::move(row));
  }
  for (const auto& [z, msg] : g.rejected) {
    json row;
    row["zeta"] = z;
    row["status"] = "rejected";
    row["loglik"] = nullptr;
    row["upsilon"] = nullptr;
    row["chosen"] = false;
    row["message"] = msg;
    all.emplace_back(z, std::move(row));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [z, row] : all) rows.push_back(std::move(row));
  j["rows"] = std::move(rows);
  return j;
}

json model_json(const Prepared& p, const ModelSpec& spec) {
  json m;
  m["formula"] = unparse_formula(p.ast);
  m["response"] = p.ast.response;
  m["family"] = std::string(family_name(p.tag));
  m["zeta"] = spec.family.zeta() ? json(*spec.family.zeta()) : json(nullptr);
  m["zero_adjusted"] = p.ast.zero_adjusted();
  m["links"] = {{"mu", std::string(spec.mu_link.name())},
                {"sigma", std::string(spec.sigma_link.name())},
                {"alpha", p.ast.zero_adjusted() ? json(std::string(spec.alpha_link.name()))
                                                : json(nullptr)}};
  m["lambda"] = {{"free", spec.lambda_free},
                 {"fixed_value", spec.lambda_free ? json(nullptr) : json(spec.lambda_value)}};
  m["zero_threshold"] = spec.zero_threshold;
  return m;
}

json data_json(const Prepared& p, std::size_t n_zero) {
  return {{"path", p.options.data},
          {"delimiter", p.options.delimiter},
          {"rows_read", p.rows_read},
          {"rows_dropped", p.rows_dropped},
          {"n", p.data.n()},
          {"n_zero", n_zero}};
}

json fit_report(const Prepared& p, const FittedModel& fit, const GridOutcome* grid,
                const std::string& invocation) {
  json r;
  r["schema"] = "bcsfit.fit-report";
  r["schema_version"] = kSchemaVersion;
  r["invocation"] = invocation;
  r["data"] = data_json(p, fit.n_zero);
  r["model"] = model_json(p, fit.spec);
  r["zeta_selection"] = grid ? selection_json(*grid) : json(nullptr);
  json coefs = json::array();
  for (const auto& c : regress::wald_inference(fit)) {
    coefs.push_back({{"block", c.block},
                     {"name", c.name},
                     {"estimate", c.estimate},
                     {"std_error", number_or_null(c.std_error)},
                     {"z_value", number_or_null(c.z_value)},
                     {"p_value", number_or_null(c.p_value)}});
  }
  r["coefficients"] = std::move(coefs);
  const VectorXd theta = fit.theta();
  r["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
  r["loglik"] = {{"total", fit.loglik},
                 {"discrete", fit.zero_adjusted ? json(fit.loglik_discrete) : json(nullptr)},
                 {"continuous", fit.loglik_continuous}};
  double ups = std::numeric_limits<double>::quiet_NaN();
  try {
    ups = diagnostics::upsilon(fit, p.data);
  } catch (const std::exception&) {
  }
  const std::size_t r0 = fit.n_params();
  const std::size_t rz = r0 + (fit.zeta() ? 1 : 0);
  r["gof"] = {{"n_params", r0},
              {"n_params_with_zeta", rz},
              {"aic", diagnostics::aic(fit.loglik, r0)},
              {"aic_with_zeta", diagnostics::aic(fit.loglik, rz)},
              {"upsilon", number_or_null(ups)}};
  const Convergence& c = fit.convergence;
  json conv = {{"status", std::string(optim::status_name(c.status))},
               {"iterations", c.iterations},
               {"gradient_norm", number_or_null(c.gradient_norm)},
               {"restarts", c.restarts},
               {"message", c.message},
               {"information_positive_definite", fit.information_positive_definite}};
  if (fit.zero_adjusted) {
    conv["binary"] = {{"iterations", c.glm_iterations},
                      {"converged", c.glm_converged},
                      {"separation", c.separation}};
  } else {
    conv["binary"] = nullptr;
  }
  r["convergence"] = std::move(conv);
  return r;
}

// Rebuilds options and the fitted model from a fit report without refitting.
std::pair<Prepared, FittedModel> load_report(const std::string& path) {
  const json r = read_json_file(path);
  if (r.value("schema", "") != "bcsfit.fit-report") throw UsageError("'" + path + "' is not a fit report");
  if (r.value("schema_version", 0) != kSchemaVersion) {
    throw UsageError("unsupported fit report schema version");
  }
  ModelOptions o;
  try {
    o.data = r.at("data").at("path").get<std::string>();
    o.delimiter = r.at("data").at("delimiter").get<std::string>();
    const json& m = r.at("model");
    o.formula = m.at("formula").get<std::string>();
    o.family = m.at("family").get<std::string>();
    if (!m.at("zeta").is_null()) o.zeta = m.at("zeta").get<double>();
    o.link_mu = m.at("links").at("mu").get<std::string>();
    o.link_sigma = m.at("links").at("sigma").get<std::string>();
    if (!m.at("links").at("alpha").is_null()) o.link_alpha = m.at("links").at("alpha").get<std::string>();
    if (!m.at("lambda").at("free").get<bool>()) o.fix_lambda = m.at("lambda").at("fixed_value").get<double>();
    o.zero_threshold = m.at("zero_threshold").get<double>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed fit report: ") + e.what());
  }
  Prepared p = prepare(o);
  const auto theta_vec = r.at("theta").get<std::vector<double>>();
  const VectorXd theta = Eigen::Map<const VectorXd>(theta_vec.data(), static_cast<Index>(theta_vec.size()));
  FittedModel fit = regress::model_at(p.data, p.spec, theta);
  const std::string status = r.at("convergence").at("status").get<std::string>();
  fit.convergence.status = status == "converged" ? optim::Status::converged
                           : status == "max_iter" ? optim::Status::max_iter
                                                  : optim::Status::failed;
  return {std::move(p), std::move(fit)};
}

// ---------------------------------------------------------------- commands

struct Shared {
  std::vector<std::string> args;
  std::ostream* out;
  std::ostream* err;
};

int cmd_fit(const ModelOptions& o, const std::string& criterion, const std::string& out_path,
            std::uint64_t seed, const Shared& sh) {
  Prepared p = prepare(o);
  FitControl control;
  control.threads = o.threads;
  control.optimizer.seed = seed;
  std::optional<GridOutcome> grid;
  if (!p.grid.empty() && !o.zeta) {
    grid = run_grid(p, criterion == "profile" ? ZetaCriterion::profile_loglik : ZetaCriterion::upsilon,
                    control);
    p.spec.family = DgfFamily::make(p.tag, grid->selection.zeta);
  }
  const FittedModel fit = regress::fit(p.data, p.spec, control);
  emit_json(fit_report(p, fit, grid ? &*grid : nullptr, join_invocation(sh.args)), out_path, *sh.out);
  if (!fit.converged()) {
    *sh.err << "fit did not converge: " << fit.convergence.message << '\n';
    return kExitNoConvergence;
  }
  return kExitOk;
}

struct DiagnoseOptions {
  std::string fit_report;
  std::size_t envelope = 0;
  double level = 0.95;
  bool influence = false;
  std::vector<std::string> residuals;
  std::size_t realizations = 4;
  std::string out;
  std::string csv_dir;
  bool fast_envelope = false;
};

int cmd_diagnose(const ModelOptions& mo, const DiagnoseOptions& d, std::uint64_t seed,
                 const Shared& sh) {
  Prepared p;
  FittedModel fit;
  if (!d.fit_report.empty()) {
    std::tie(p, fit) = load_report(d.fit_report);
  } else {
    p = prepare(mo);
    if (!p.spec.family.zeta() && family_has_zeta(p.tag)) {
      throw UsageError("diagnose needs a fixed --zeta when refitting");
    }
    FitControl control;
    control.threads = mo.threads;
    control.optimizer.seed = seed;
    fit = regress::fit(p.data, p.spec, control);
  }
  if (d.realizations < 1) throw UsageError("--realizations must be at least 1");

  std::vector<std::string> kinds = d.residuals;
  if (kinds.empty()) kinds.push_back(fit.zero_adjusted ? "randomized" : "quantile");

  json j;
  j["schema"] = "bcsfit.diagnostics";
  j["schema_version"] = kSchemaVersion;
  j["invocation"] = join_invocation(sh.args);
  j["model"] = model_json(p, fit.spec);
  j["fit_status"] = std::string(optim::status_name(fit.convergence.status));
  std::vector<Table> tables;
  json summary;
  summary["loglik"] = fit.loglik;
  summary["aic"] = diagnostics::aic(fit.loglik, fit.n_params());
  summary["upsilon"] = number_or_null(diagnostics::upsilon(fit, p.data));

  for (const auto& kind : kinds) {
    if (kind == "quantile") {
      const ResidualSet r = diagnostics::quantile_residuals(fit, p.data);
      Table t{"residuals_quantile", {"row", "y", "fitted_mu", "fitted_sigma", "residual"}, {}};
      for (std::size_t k = 0; k < r.rows.size(); ++k) {
        const auto i = static_cast<Index>(r.rows[k]);
        t.rows.push_back({static_cast<double>(i + 1), p.data.y[i], fit.fitted_mu[i],
                          fit.fitted_sigma[i], r.values[static_cast<Index>(k)]});
      }
      std::vector<std::size_t> tail;
      for (auto i : r.extreme_tail) tail.push_back(i + 1);
      summary["extreme_tail_rows"] = tail;
      tables.push_back(std::move(t));
    } else if (kind == "randomized") {
      const auto sets = diagnostics::randomized_quantile_residuals(fit, p.data, d.realizations, seed);
      Table t{"residuals_randomized", {"row", "y"}, {}};
      for (std::size_t k = 0; k < sets.size(); ++k) t.columns.push_back("r" + std::to_string(k + 1));
      for (std::size_t i = 0; i < p.data.n(); ++i) {
        std::vector<double> row{static_cast<double>(i + 1), p.data.y[static_cast<Index>(i)]};
        for (const auto& s : sets) row.push_back(s.values[static_cast<Index>(i)]);
        t.rows.push_back(std::move(row));
      }
      tables.push_back(std::move(t));
    } else if (kind == "pearson") {
      if (!fit.zero_adjusted) throw UsageError("Pearson residuals need a zero-adjusted model");
      const ResidualSet r = diagnostics::pearson_residuals(fit, p.data);
      Table t{"residuals_pearson", {"row", "zero", "fitted_alpha", "leverage", "residual"}, {}};
      for (std::size_t i = 0; i < p.data.n(); ++i) {
        const auto ii = static_cast<Index>(i);
        t.rows.push_back({static_cast<double>(i + 1),
                          zabcs::is_zero(p.data.y[ii], fit.spec.zero_threshold) ? 1.0 : 0.0,
                          fit.fitted_alpha[ii], fit.leverage[ii], r.values[ii]});
      }
      tables.push_back(std::move(t));
    } else {
      throw UsageError("unknown residual kind '" + kind + "' (quantile, randomized, pearson)");
    }
  }

  if (d.envelope > 0) {
    EnvelopeOptions eo;
    eo.replicates = d.envelope;
    eo.level = d.level;
    eo.seed = mix_seed(seed, 1000);
    eo.threads = mo.threads;
    eo.refit = !d.fast_envelope;
    const Envelope env = diagnostics::simulated_envelope(fit, p.data, eo);
    Table t{"envelope", {"index", "expected", "observed", "lower", "median", "upper"}, {}};
    for (Index j2 = 0; j2 < env.observed.size(); ++j2) {
      t.rows.push_back({static_cast<double>(j2 + 1), env.expected[j2], env.observed[j2],
                        env.lower[j2], env.median[j2], env.upper[j2]});
    }
    tables.push_back(std::move(t));
    const double frac = env.observed.size()
                            ? static_cast<double>(env.outside) / static_cast<double>(env.observed.size())
                            : 0.0;
    summary["envelope"] = {{"replicates", env.replicates},
                           {"level", env.level},
                           {"refit", eo.refit},
                           {"failures", env.failures},
                           {"outside", env.outside},
                           {"outside_fraction", frac}};
  }

  if (d.influence) {
    const InfluenceResult inf = diagnostics::local_influence(fit, p.data);
    Table t{"influence", {"row", "dmax", "abs_dmax", "Ci"}, {}};
    Index arg_d = 0;
    Index arg_c = 0;
    inf.dmax.cwiseAbs().maxCoeff(&arg_d);
    inf.Ci.maxCoeff(&arg_c);
    for (Index i = 0; i < inf.dmax.size(); ++i) {
      t.rows.push_back({static_cast<double>(i + 1), inf.dmax[i], std::abs(inf.dmax[i]), inf.Ci[i]});
    }
    tables.push_back(std::move(t));
    summary["influence"] = {{"cdmax", inf.cdmax},
                            {"dmax_norm", inf.dmax.norm()},
                            {"argmax_abs_dmax", arg_d + 1},
                            {"argmax_Ci", arg_c + 1}};
  }

  j["summary"] = std::move(summary);
  json tj = json::array();
  for (const auto& t : tables) tj.push_back(table_json(t));
  j["tables"] = std::move(tj);
  if (!d.csv_dir.empty()) {
    for (const auto& t : tables) write_table_csv(t, d.csv_dir + "/" + t.name + ".csv");
  }
  emit_json(j, d.out, *sh.out);
  return kExitOk;
}

int cmd_select_zeta(const ModelOptions& o, const std::string& criterion, const std::string& out_path,
                    const std::string& csv_path, std::uint64_t seed, const Shared& sh) {
  if (o.zeta_grid.empty()) throw UsageError("--zeta-grid is required");
  ModelOptions opts = o;
  opts.zeta.reset();
  Prepared p = prepare(opts);
  if (!family_has_zeta(p.tag)) throw UsageError("family has no zeta to select");
  FitControl control;
  control.threads = o.threads;
  control.optimizer.seed = seed;
  const GridOutcome g = run_grid(
      p, criterion == "profile" ? ZetaCriterion::profile_loglik : ZetaCriterion::upsilon, control);
  json j;
  j["schema"] = "bcsfit.zeta-selection";
  j["schema_version"] = kSchemaVersion;
  j["invocation"] = join_invocation(sh.args);
  j["model"] = model_json(p, p.spec);
  j["selection"] = selection_json(g);
  if (!csv_path.empty()) {
    std::ofstream f(csv_path, std::ios::binary);
    if (!f) throw UsageError("cannot write '" + csv_path + "'");
    f << "zeta,status,loglik,upsilon,chosen\n";
    for (const auto& row : j["selection"]["rows"]) {
      f << format_number(row["zeta"].get<double>()) << ',' << row["status"].get<std::string>() << ','
        << (row["loglik"].is_null() ? "NA" : format_number(row["loglik"].get<double>())) << ','
        << (row["upsilon"].is_null() ? "NA" : format_number(row["upsilon"].get<double>())) << ','
        << (row["chosen"].get<bool>() ? 1 : 0) << '\n';
    }
  }
  emit_json(j, out_path, *sh.out);
  return kExitOk;
}

struct SimulateOptions {
  std::string family;
  std::optional<double> zeta;
  long long n = -1;
  std::size_t replicates = 1;
  double mu = 1.0;
  double sigma = 0.5;
  double lambda = 0.0;
  std::optional<double> alpha;
  std::string fit_report;
  std::string out;
  unsigned threads = 0;
};

struct Generator {
  RegressionData design;  // y unused
  ModelSpec spec;
  VectorXd theta;  // (kappa, beta, tau, lambda)
  FittedModel truth;
  Dataset table;  // covariates for single-replicate output
  std::string response = "y";
};

VectorXd simulate_response(const Generator& g, std::uint64_t seed) {
  UniformStream u(seed);
  const Index n = g.design.X.rows();
  VectorXd y(n);
  for (Index i = 0; i < n; ++i) {
    const double a = u.next();
    const double b = u.next();
    if (g.truth.zero_adjusted && a <= g.truth.fitted_alpha[i]) {
      y[i] = 0.0;
    } else {
      y[i] = bcs::quantile(b, {g.truth.fitted_mu[i], g.truth.fitted_sigma[i], g.truth.lambda},
                           g.spec.family);
    }
  }
  return y;
}

int cmd_simulate(const SimulateOptions& s, std::uint64_t seed, const Shared& sh) {
  Generator g;
  if (!s.fit_report.empty()) {
    auto [p, fit] = load_report(s.fit_report);
    g.design = p.data;
    g.spec = p.spec;
    g.theta = fit.theta();
    g.truth = std::move(fit);
    g.table = p.table;
    g.response = p.ast.response;
    if (s.n >= 0 && static_cast<std::size_t>(s.n) != g.design.n()) {
      throw UsageError("--n must match the report's data when --fit is given");
    }
  } else {
    if (s.family.empty()) throw UsageError("--family or --fit is required");
    if (s.n <= 0) throw UsageError("--n must be a positive integer");
    const auto tag = parse_family_tag(s.family);
    if (!tag) throw UsageError("unknown family '" + s.family + "'");
    if (family_has_zeta(*tag) && !s.zeta) throw UsageError("family " + s.family + " needs --zeta");
    try {
      g.spec.family = DgfFamily::make(*tag, family_has_zeta(*tag) ? s.zeta : std::nullopt);
      BcsParams{s.mu, s.sigma, s.lambda}.validate();
      if (s.alpha) ZabcsParams{*s.alpha, {s.mu, s.sigma, s.lambda}}.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    const auto n = static_cast<Index>(s.n);
    g.design.y = VectorXd::Ones(n);
    g.design.X = Eigen::MatrixXd::Ones(n, 1);
    g.design.S = Eigen::MatrixXd::Ones(n, 1);
    g.design.x_names = g.design.s_names = {kInterceptName};
    std::vector<double> theta;
    if (s.alpha) {
      g.design.Z = Eigen::MatrixXd::Ones(n, 1);
      g.design.z_names = {kInterceptName};
      theta.push_back(g.spec.alpha_link.apply(*s.alpha));
    }
    theta.push_back(std::log(s.mu));
    theta.push_back(std::log(s.sigma));
    theta.push_back(s.lambda);
    g.theta = Eigen::Map<VectorXd>(theta.data(), static_cast<Index>(theta.size()));
    if (s.alpha) g.design.y[0] = 0.0;  // keeps model_at's zero split well-defined
    g.truth = regress::model_at(g.design, g.spec, g.theta, false);
  }
  if (s.replicates < 1) throw UsageError("--replicates must be at least 1");

  if (s.replicates == 1) {
    const VectorXd y = simulate_response(g, mix_seed(seed, 0));
    std::vector<double> yv(y.data(), y.data() + y.size());
    Dataset outd;
    if (!s.fit_report.empty()) {
      for (const auto& c : g.table.columns()) {
        if (c.name == g.response) {
          outd.add_numeric(c.name, yv);
        } else {
          outd.add_column(c);
        }
      }
    } else {
      outd.add_numeric("y", yv);
    }
    if (s.out.empty() || s.out == "-") {
      write_csv(*sh.out, outd);
    } else {
      std::ofstream f(s.out, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + s.out + "'");
      write_csv(f, outd);
    }
    return kExitOk;
  }

  // Study mode: refit every replicate under the generating specification.
  const std::size_t R = s.replicates;
  const auto k = static_cast<std::size_t>(g.theta.size());
  std::vector<VectorXd> est(R), se(R);
  std::vector<char> ok(R, 0);
  parallel_for(R, s.threads, [&](std::size_t r) {
    RegressionData d = g.design;
    d.y = simulate_response(g, mix_seed(seed, r));
    try {
      FitControl control;
      control.optimizer.seed = mix_seed(seed, r + R);
      const FittedModel f = regress::fit(d, g.spec, control);
      if (!f.converged()) return;
      est[r] = f.theta();
      se[r] = f.std_errors;
      ok[r] = 1;
    } catch (const std::exception&) {
    }
  });
  std::vector<std::string> names = g.truth.parameter_names;
  json params = json::array();
  std::size_t used = 0;
  for (char c : ok) used += c ? 1 : 0;
  for (std::size_t j = 0; j < k; ++j) {
    double sum = 0.0, sq = 0.0;
    std::size_t cover = 0, cover_n = 0;
    const double truth = g.theta[static_cast<Index>(j)];
    for (std::size_t r = 0; r < R; ++r) {
      if (!ok[r]) continue;
      const double e = est[r][static_cast<Index>(j)] - truth;
      sum += e;
      sq += e * e;
      const double sej = se[r][static_cast<Index>(j)];
      if (std::isfinite(sej)) {
        ++cover_n;
        if (std::abs(e) <= 1.959963984540054 * sej) ++cover;
      }
    }
    const double m = used ? static_cast<double>(used) : std::nan("");
    params.push_back({{"name", j < names.size() ? names[j] : "theta[" + std::to_string(j) + "]"},
                      {"truth", truth},
                      {"bias", number_or_null(sum / m)},
                      {"rmse", number_or_null(std::sqrt(sq / m))},
                      {"coverage_95", cover_n ? json(static_cast<double>(cover) / cover_n) : json(nullptr)},
                      {"n_used", used}});
  }
  json j;
  j["schema"] = "bcsfit.simulation-study";
  j["schema_version"] = kSchemaVersion;
  j["invocation"] = join_invocation(sh.args);
  j["family"] = g.spec.family.label();
  j["zero_adjusted"] = g.truth.zero_adjusted;
  j["n"] = g.design.n();
  j["replicates"] = R;
  j["failures"] = R - used;
  j["parameters"] = std::move(params);
  emit_json(j, s.out, *sh.out);
  return kExitOk;
}

int cmd_gen_data(std::uint64_t seed, const std::string& out_path, const Shared& sh) {
  BundledTruth truth;
  const Dataset d = generate_bundled_dataset(seed, &truth);
  json t;
  t["schema"] = "bcsfit.bundled-truth";
  t["schema_version"] = kSchemaVersion;
  t["family"] = truth.family;
  t["zero_adjusted"] = true;
  t["links"] = {{"mu", "log"}, {"sigma", "log"}, {"alpha", "logit"}};
  t["n"] = truth.n;
  t["seed"] = truth.seed;
  json coefs = json::array();
  for (const auto& c : truth.coefficients) {
    coefs.push_back({{"block", c.block}, {"name", c.name}, {"value", c.value}});
  }
  t["coefficients"] = std::move(coefs);
  if (out_path.empty() || out_path == "-") {
    write_csv(*sh.out, d);
    return kExitOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + out_path + "'");
  write_csv(f, d);
  emit_json(t, out_path + ".truth.json", *sh.out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Box-Cox symmetric and zero-adjusted regression", "bcsfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bcsfit 0.1.0");
  std::uint64_t seed = 1;

  ModelOptions fit_opts;
  std::string fit_out, fit_criterion = "upsilon";
  auto* fit = app.add_subcommand("fit", "fit a BCS or zero-adjusted BCS regression");
  add_model_options(fit, fit_opts);
  fit->add_option("--criterion", fit_criterion, "zeta selector: upsilon or profile")
      ->check(CLI::IsMember({"upsilon", "profile"}));
  fit->add_option("--out", fit_out, "report path (default: standard output)");
  fit->add_option("--seed", seed, "seed for optimiser restarts");

  ModelOptions diag_model;
  DiagnoseOptions diag;
  auto* dg = app.add_subcommand("diagnose", "residuals, envelopes and local influence");
  add_model_options(dg, diag_model);
  dg->add_option("--fit", diag.fit_report, "fit report to diagnose (no refit)");
  dg->add_option("--envelope", diag.envelope, "replicates for a simulated envelope (>= 19)");
  dg->add_option("--level", diag.level, "envelope level");
  dg->add_flag("--fast-envelope", diag.fast_envelope, "skip replicate refits");
  dg->add_flag("--influence", diag.influence, "case-weight local influence");
  dg->add_option("--residuals", diag.residuals, "quantile, randomized, pearson")->delimiter(',');
  dg->add_option("--realizations", diag.realizations, "randomized residual realizations");
  dg->add_option("--out", diag.out, "JSON output path");
  dg->add_option("--csv-dir", diag.csv_dir, "directory for CSV tables");
  dg->add_option("--seed", seed, "seed for randomisation and envelopes");

  ModelOptions sel_opts;
  std::string sel_out, sel_csv, sel_criterion = "upsilon";
  auto* sel = app.add_subcommand("select-zeta", "profile the extra parameter over a grid");
  add_model_options(sel, sel_opts);
  sel->add_option("--criterion", sel_criterion, "upsilon or profile")
      ->check(CLI::IsMember({"upsilon", "profile"}));
  sel->add_option("--out", sel_out, "JSON output path");
  sel->add_option("--csv", sel_csv, "CSV table path");
  sel->add_option("--seed", seed, "seed for optimiser restarts");

  SimulateOptions sim;
  auto* sm = app.add_subcommand("simulate", "simulate data or run a Monte Carlo study");
  sm->add_option("--family", sim.family, "family tag");
  sm->add_option("--zeta", sim.zeta, "extra parameter");
  sm->add_option("--n", sim.n, "sample size");
  sm->add_option("--replicates", sim.replicates, "1 emits data; more runs a study");
  sm->add_option("--mu", sim.mu, "scale");
  sm->add_option("--sigma", sim.sigma, "relative dispersion");
  sm->add_option("--lambda", sim.lambda, "skewness");
  sm->add_option("--alpha", sim.alpha, "probability of zero (zero-adjusted)");
  sm->add_option("--fit", sim.fit_report, "use a fit report as the generator");
  sm->add_option("--out", sim.out, "output path");
  sm->add_option("--threads", sim.threads, "worker threads (0 = all cores)");
  sm->add_option("--seed", seed, "seed");

  std::string gen_out;
  auto* gen = app.add_subcommand("gen-data", "write the bundled synthetic dataset");
  gen->add_option("--out", gen_out, "CSV path; truth goes to <out>.truth.json");
  gen->add_option("--seed", seed, "seed");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Shared sh{args, &out, &err};
  try {
    if (*fit) return cmd_fit(fit_opts, fit_criterion, fit_out, seed, sh);
    if (*dg) return cmd_diagnose(diag_model, diag, seed, sh);
    if (*sel) return cmd_select_zeta(sel_opts, sel_criterion, sel_out, sel_csv, seed, sh);
    if (*sm) return cmd_simulate(sim, seed, sh);
    if (*gen) return cmd_gen_data(seed, gen_out, sh);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormulaError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace bcsfit::cli
