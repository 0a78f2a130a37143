#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <bcsfit/dataset.hpp>
#include <bcsfit_cli/bundled.hpp>
#include <bcsfit_cli/cli.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = bcsfit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Scratch directory plus a small zero-adjusted dataset, created once.
struct Workspace {
  fs::path dir = fs::current_path() / "cli_work";
  std::string bundled, small, positive;

  Workspace() {
    fs::remove_all(dir);
    fs::create_directories(dir);
    bundled = (dir / "bundled.csv").string();
    REQUIRE(cli({"gen-data", "--out", bundled, "--seed", "7"}).code == 0);

    // First 600 bundled rows keep both zeros and positives.
    std::istringstream in(slurp(bundled));
    std::ofstream s(dir / "small.csv", std::ios::binary), pos(dir / "positive.csv", std::ios::binary);
    std::string line;
    std::getline(in, line);
    s << line << '\n';
    pos << line << '\n';
    for (int i = 0; i < 600 && std::getline(in, line); ++i) s << line << '\n';
    const auto d = bcsfit::read_csv_file(bundled);
    const auto& y = d.at("y").values;
    std::istringstream again(slurp(bundled));
    std::getline(again, line);
    for (std::size_t i = 0; std::getline(again, line); ++i)
      if (y[i] > 0.0) pos << line << '\n';
    small = (dir / "small.csv").string();
    positive = (dir / "positive.csv").string();
  }
};

Workspace& ws() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--version"}).code == 0);
  CHECK(cli({"fit", "--help"}).code == 0);
  CHECK(cli({"fit", "--data", ws().small}).code == 2);
  CHECK(cli({"fit", "--data", "missing.csv", "--formula", "y ~ 1", "--family", "BCNO"}).code == 2);
  auto bad = cli({"fit", "--data", ws().small, "--formula", "y ~", "--family", "BCNO"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("offset 3") != std::string::npos);
  CHECK(cli({"fit", "--data", ws().small, "--formula", "y ~ height | 1 | 1", "--family", "BCNO"}).code == 2);
  CHECK(cli({"fit", "--data", ws().small, "--formula", "y ~ age | 1 | 1", "--family", "BCXX"}).code == 2);
  CHECK(cli({"fit", "--data", ws().small, "--formula", "y ~ age | 1 | 1", "--family", "BCT"}).code == 2);
  CHECK(cli({"fit", "--data", ws().small, "--formula", "y ~ age | 1 | 1", "--family", "BCNO", "--link-mu",
             "logit"})
            .code == 2);
}

TEST_CASE("bundled dataset") {
  const auto d = bcsfit::read_csv_file(ws().bundled);
  CHECK(d.rows() == bcsfit::cli::kBundledRows);
  for (const char* name : {"y", "age", "sex", "years_sc", "residence", "income", "children"}) CHECK(d.find(name));
  std::size_t zeros = 0;
  for (double y : d.at("y").values) zeros += y == 0.0;
  const double frac = static_cast<double>(zeros) / d.rows();
  CHECK(frac >= 0.91);
  CHECK(frac <= 0.95);
  for (double v : d.at("income").values) CHECK(v > 0.0);

  const auto truth = json::parse(slurp(ws().bundled + ".truth.json"));
  CHECK(truth["schema"] == "bcsfit.bundled-truth");
  CHECK(truth["n"] == 4232);

  const std::string again = (ws().dir / "again.csv").string();
  REQUIRE(cli({"gen-data", "--out", again, "--seed", "7"}).code == 0);
  CHECK(slurp(again) == slurp(ws().bundled));
  REQUIRE(cli({"gen-data", "--out", again, "--seed", "8"}).code == 0);
  CHECK(slurp(again) != slurp(ws().bundled));
}

TEST_CASE("fit report") {
  const auto r = cli({"fit", "--data", ws().bundled, "--formula", "y ~ age | 1 | age", "--family", "BCLOII"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == "bcsfit.fit-report");
  CHECK(j["schema_version"] == bcsfit::cli::kSchemaVersion);
  CHECK(j["convergence"]["status"] == "converged");
  CHECK(j["model"]["zero_adjusted"] == true);
  CHECK(j["data"]["n"] == 4232);
  CHECK(j["invocation"].get<std::string>().find("--family BCLOII") != std::string::npos);
  const double total = j["loglik"]["total"];
  const double parts = j["loglik"]["discrete"].get<double>() + j["loglik"]["continuous"].get<double>();
  CHECK(std::abs(total - parts) <= 1e-12 * std::abs(total));
  CHECK(j["gof"]["aic"].get<double>() == doctest::Approx(-2 * total + 2 * j["gof"]["n_params"].get<double>()));
  bool lambda_row = false;
  for (const auto& c : j["coefficients"]) lambda_row = lambda_row || c["block"] == "lambda";
  CHECK(lambda_row);
  CHECK(j["coefficients"].size() == j["theta"].size());
}

TEST_CASE("zeros with a two-part formula") {
  const auto r = cli({"fit", "--data", ws().small, "--formula", "y ~ age", "--family", "BCNO"});
  CHECK(r.code == 2);
  CHECK(r.err.find("zeros require a third formula part") != std::string::npos);
}

TEST_CASE("fixed lambda drops the lambda row") {
  const auto r = cli({"fit", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCNO", "--fix-lambda",
                      "0"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  for (const auto& c : j["coefficients"]) CHECK(c["block"] != "lambda");
  CHECK(j["model"]["lambda"]["free"] == false);
  CHECK(j["model"]["lambda"]["fixed_value"] == 0.0);
}

TEST_CASE("zeta selection") {
  const auto one = cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCT",
                        "--zeta-grid", "5"});
  REQUIRE(one.code == 0);
  const auto j = json::parse(one.out);
  CHECK(j["schema"] == "bcsfit.zeta-selection");
  CHECK(j["selection"]["chosen_zeta"] == 5.0);

  const auto pe = cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCPE",
                       "--zeta-grid", "0.5:2:0.5"});
  REQUIRE(pe.code == 0);
  const auto rows = json::parse(pe.out)["selection"]["rows"];
  REQUIRE(rows.size() == 4);
  CHECK(rows[0]["zeta"] == 0.5);
  CHECK(rows[0]["status"] == "rejected");
  CHECK(rows[0]["message"].get<std::string>().find("domain") != std::string::npos);
  CHECK(rows[1]["status"] != "rejected");

  CHECK(cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCPE", "--zeta-grid",
             "0.2:0.8:0.2"})
            .code == 2);
  CHECK(cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCT", "--zeta-grid",
             "3:1:1"})
            .code == 2);
  CHECK(cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCNO", "--zeta-grid",
             "1:3:1"})
            .code == 2);

  const std::string csv = (ws().dir / "sel.csv").string();
  REQUIRE(cli({"select-zeta", "--data", ws().positive, "--formula", "y ~ age", "--family", "BCT", "--zeta-grid",
               "2:6:2", "--csv", csv, "--out", (ws().dir / "sel.json").string()})
              .code == 0);
  CHECK(slurp(csv).rfind("zeta,status,loglik,upsilon,chosen\n", 0) == 0);
}

TEST_CASE("diagnose round trip and reruns") {
  const std::string report = (ws().dir / "fit.json").string();
  REQUIRE(cli({"fit", "--data", ws().bundled, "--formula", "y ~ age | 1 | age", "--family", "BCLOII", "--out",
               report})
              .code == 0);
  const std::vector<std::string> from_report{"diagnose", "--fit", report, "--residuals",
                                             "quantile,randomized,pearson", "--envelope", "19", "--influence",
                                             "--seed", "11"};
  const auto a = cli(from_report);
  REQUIRE(a.code == 0);
  CHECK(cli(from_report).out == a.out);

  const auto j = json::parse(a.out);
  CHECK(j["schema"] == "bcsfit.diagnostics");
  CHECK(j["summary"]["influence"]["dmax_norm"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<std::string> names;
  for (const auto& t : j["tables"]) names.push_back(t["name"]);
  CHECK(names == std::vector<std::string>{"residuals_quantile", "residuals_randomized", "residuals_pearson",
                                          "envelope", "influence"});
  const auto& rnd = j["tables"][1];
  CHECK(rnd["columns"] == json({"row", "y", "r1", "r2", "r3", "r4"}));

  // Refitting from the same flags gives the same residuals as reading the report.
  const auto refit = cli({"diagnose", "--data", ws().bundled, "--formula", "y ~ age | 1 | age", "--family",
                          "BCLOII", "--residuals", "quantile,randomized", "--seed", "11"});
  REQUIRE(refit.code == 0);
  const auto k = json::parse(refit.out);
  REQUIRE(!j["tables"][0]["data"].empty());
  CHECK(k["tables"][0]["data"] == j["tables"][0]["data"]);
  CHECK(k["tables"][1]["data"] == j["tables"][1]["data"]);

  const std::string csv_dir = (ws().dir / "tables").string();
  fs::create_directories(csv_dir);
  REQUIRE(cli({"diagnose", "--fit", report, "--csv-dir", csv_dir, "--out", (ws().dir / "diag.json").string()})
              .code == 0);
  CHECK(fs::exists(fs::path(csv_dir) / "residuals_randomized.csv"));

  CHECK(cli({"diagnose", "--fit", report, "--realizations", "0"}).code == 2);
  CHECK(cli({"diagnose", "--fit", report, "--residuals", "deviance"}).code == 2);
  CHECK(cli({"diagnose", "--fit", ws().bundled}).code == 2);
}

TEST_CASE("simulate") {
  CHECK(cli({"simulate", "--family", "BCNO", "--n", "0"}).code == 2);
  CHECK(cli({"simulate", "--family", "BCT", "--n", "10"}).code == 2);
  CHECK(cli({"simulate", "--family", "BCNO", "--n", "10", "--sigma", "-1"}).code == 2);
  const std::vector<std::string> args{"simulate", "--family", "BCLOII", "--n", "50", "--alpha", "0.3", "--seed", "4"};
  const auto a = cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == cli(args).out);
  CHECK(a.out.rfind("y\n", 0) == 0);

  const std::vector<std::string> study{"simulate", "--family", "BCNO", "--n", "100", "--replicates", "20",
                                       "--mu", "2", "--sigma", "0.4", "--lambda", "0.3", "--seed", "9"};
  const auto s = cli(study);
  REQUIRE(s.code == 0);
  CHECK(s.out == cli(study).out);
  const auto j = json::parse(s.out);
  CHECK(j["schema"] == "bcsfit.simulation-study");
  CHECK(j["failures"] == 0);
  CHECK(j["parameters"].size() == 3);
}
