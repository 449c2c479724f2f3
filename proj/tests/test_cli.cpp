#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "cli_support.hpp"

using cli_support::parse_csv;
using cli_support::run;
using nlohmann::json;

namespace {

const std::string kData = PQKANT_TEST_DATA;

double num(const std::string& s) {
  double v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(r.ec == std::errc());
  return v;
}

std::size_t col(const cli_support::Csv& csv, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i) {
    if (csv.header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

double alpha(double p, double q, int n) {
  const double pn = std::pow(p, n);
  const double in = (pn - std::pow(q, n)) / (p - q);
  return pn / ((p + q) * in);
}

}  // namespace

TEST_CASE("moments: row count, m0 and the x = 0 row") {
  const auto r = run({"moments", "--n", "10", "--p", "0.9", "--q", "0.8", "--grid", "11"});
  REQUIRE(r.code == 0);
  const auto csv = parse_csv(r.out);
  CHECK(csv.header == std::vector<std::string>{"x", "m0", "m1", "m2", "central2", "delta_n",
                                               "delta_n_local", "alpha_n"});
  REQUIRE(csv.rows.size() == 11);
  for (const auto& row : csv.rows) CHECK(std::abs(num(row[1]) - 1.0) <= 1e-15);
  CHECK(num(csv.rows[0][0]) == 0.0);
  CHECK(num(csv.rows[0][2]) == doctest::Approx(alpha(0.9, 0.8, 10)).epsilon(1e-13));
}

TEST_CASE("CSV and JSON carry identical values") {
  for (const std::string cmd : {"moments", "eval", "bounds"}) {
    const std::vector<std::string> base = {cmd, "--n", "12", "--p", "0.9", "--q", "0.8",
                                           "--grid", "9", "--fn", "sin7"};
    auto json_args = base;
    json_args.insert(json_args.end(), {"--format", "json"});
    const auto c = run(base);
    const auto j = run(json_args);
    REQUIRE(c.code == 0);
    REQUIRE(j.code == 0);
    const auto csv = parse_csv(c.out);
    const auto doc = json::parse(j.out);
    CHECK(doc["meta"]["command"] == cmd);
    CHECK(doc["meta"]["version"] == pqkant::cli::kVersion);
    CHECK(doc["meta"].contains("params"));
    REQUIRE(doc["rows"].size() == csv.rows.size());
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
      for (std::size_t k = 0; k < csv.header.size(); ++k) {
        const auto& v = doc["rows"][i][csv.header[k]];
        if (v.is_string()) CHECK(v.get<std::string>() == csv.rows[i][k]);
        else CHECK(v.get<double>() == num(csv.rows[i][k]));
      }
    }
  }
}

TEST_CASE("eval on one, t and sin7") {
  const auto one = parse_csv(run({"eval", "--fn", "one", "--p", "0.9", "--q", "0.8"}).out);
  REQUIRE(one.rows.size() == 201);
  for (const auto& row : one.rows) CHECK(std::abs(num(row[2]) - 1.0) <= 1e-12);

  const auto t = parse_csv(run({"eval", "--fn", "t", "--p", "0.9", "--q", "0.8", "--n", "15"}).out);
  for (const auto& row : t.rows) {
    CHECK(std::abs(num(row[2]) - num(row[0]) - alpha(0.9, 0.8, 15)) <= 1e-12);
  }

  const auto r = run({"--config", kData + "/golden_eval.json", "eval"});
  // Subcommand options belong after the subcommand name.
  CHECK(r.code == 2);
  const auto s = run({"eval", "--config", kData + "/golden_eval.json"});
  REQUIRE(s.code == 0);
  const auto sin7 = parse_csv(s.out);
  CHECK(sin7.header == std::vector<std::string>{"x", "f", "K"});
  REQUIRE(sin7.rows.size() == 201);
  for (const auto& row : sin7.rows) CHECK(std::isfinite(num(row[2])));
}

TEST_CASE("converge rows") {
  const auto one = parse_csv(run({"converge", "--fn", "one", "--n-list", "10,20,40"}).out);
  REQUIRE(one.rows.size() == 3);
  for (const auto& row : one.rows) CHECK(num(row[col(one, "sup_error")]) <= 1e-12);

  const auto t = parse_csv(run({"converge", "--fn", "t", "--n-list", "10,25,50"}).out);
  for (const auto& row : t.rows) {
    const int n = std::stoi(row[0]);
    CHECK(std::abs(num(row[col(t, "sup_error")]) -
                   alpha(num(row[col(t, "p")]), num(row[col(t, "q")]), n)) <= 1e-13);
  }

  const auto r = run({"converge", "--config", kData + "/golden_converge.json"});
  REQUIRE(r.code == 0);
  const auto sin7 = parse_csv(r.out);
  REQUIRE(sin7.rows.size() == 5);
  for (std::size_t i = 1; i < sin7.rows.size(); ++i) {
    CHECK(num(sin7.rows[i][3]) < num(sin7.rows[i - 1][3]));
  }

  const auto constant = run({"converge", "--seq", "constant", "--p", "0.9", "--q", "0.8",
                             "--n-list", "5,10", "--format", "json"});
  REQUIRE(constant.code == 0);
  const auto doc = json::parse(constant.out);
  CHECK(doc["meta"]["params"]["seq"] == "constant");
  CHECK(doc["rows"][1]["p"] == 0.9);
}

TEST_CASE("bounds rows and summary") {
  const auto one = run({"bounds", "--fn", "one", "--theorem", "3.2", "--grid", "11"});
  REQUIRE(one.code == 0);
  const auto csv = parse_csv(one.out);
  CHECK(csv.header ==
        std::vector<std::string>{"x", "actual", "bound", "bound_unit", "slack", "theorem"});
  for (const auto& row : csv.rows) {
    CHECK(std::abs(num(row[1])) <= 1e-12);
    CHECK(num(row[2]) == 0.0);
    CHECK(row[5] == "thm32");
  }
  CHECK(one.err.rfind("min_slack=", 0) == 0);

  const auto lip = run({"bounds", "--fn", "abs_half", "--theorem", "3.3", "--M", "1", "--alpha",
                        "1", "--n", "10", "--grid", "21", "--format", "json"});
  REQUIRE(lip.code == 0);
  const auto doc = json::parse(lip.out);
  CHECK(doc["rows"].size() == 21);
  CHECK(doc["rows"][0]["theorem"] == "thm33");
  CHECK(doc["meta"]["summary"]["min_slack"].is_number());
  CHECK(doc["meta"]["params"]["M"] == 1.0);

  const auto local = run({"bounds", "--fn", "sin7", "--theorem", "3.4", "--C", "4", "--grid", "5"});
  REQUIRE(local.code == 0);
  CHECK(local.err.find("informational") != std::string::npos);

  const auto golden = run({"bounds", "--config", kData + "/golden_bounds.json"});
  REQUIRE(golden.code == 0);
  for (const auto& row : parse_csv(golden.out).rows) CHECK(num(row[4]) >= 0.0);
}

TEST_CASE("figure presets") {
  std::map<std::string, std::size_t> series = {{"fig1", 4}, {"fig2", 4}, {"fig3", 3}, {"fig4", 3}};
  std::map<std::string, std::map<std::string, double>> sup;
  for (const auto& [id, count] : series) {
    const auto r = run({"figure", "--preset", id});
    REQUIRE(r.code == 0);
    const auto csv = parse_csv(r.out);
    CHECK(csv.header == std::vector<std::string>{"series", "p", "q", "n", "x", "f", "K"});
    CHECK(csv.rows.size() == count * 201);
    for (const auto& row : csv.rows) {
      const std::string key = row[1] + "," + row[2];
      sup[id][key] = std::max(sup[id][key], std::abs(num(row[6]) - num(row[5])));
    }
  }
  CHECK(pqkant::cli::figure_preset("fig1").series.size() == 4);
  // Larger n at matching (p, q).
  for (const auto& [key, error] : sup["fig1"]) CHECK(sup["fig2"][key] <= error);
  // Parameters nearer 1 at fixed n.
  CHECK(sup["fig1"]["0.999,0.99"] < sup["fig1"]["0.75,0.7"]);

  const auto j = json::parse(run({"figure", "--config", kData + "/golden_figure.json",
                                  "--format", "json"}).out);
  CHECK(j["meta"]["params"]["parameter_values"] == "illustrative");
  CHECK(j["meta"]["params"]["series"].size() == 3);
  CHECK(j["rows"].size() == 3 * 201);
}

TEST_CASE("validation failures exit with 2") {
  CHECK(run({"moments", "--p", "0.8", "--q", "0.9"}).code == 2);
  CHECK(run({"moments", "--p", "0.8", "--q", "0.8"}).code == 2);
  CHECK(run({"moments", "--p", "1.2", "--q", "0.5"}).code == 2);
  CHECK(run({"moments", "--p", "0.5", "--q", "0"}).code == 2);
  CHECK(run({"moments", "--p", "0.5"}).code == 2);
  CHECK(run({"eval", "--n", "501"}).code == 2);
  CHECK(run({"eval", "--grid", "1"}).code == 2);
  CHECK(run({"eval", "--fn", "cos"}).code == 2);
  CHECK(run({"eval", "--format", "xml"}).code == 2);
  CHECK(run({"converge", "--n-list", "10,5"}).code == 2);
  CHECK(run({"bounds", "--theorem", "3.3"}).code == 2);
  CHECK(run({"bounds", "--theorem", "3.5"}).code == 2);
  CHECK(run({"figure", "--preset", "fig9"}).code == 2);
  CHECK(run({"figure"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"eval", "--n", "abc"}).code == 2);
  CHECK(run({"eval", "--config", kData + "/unknown_key.json"}).code == 2);
}

TEST_CASE("input-file and numerical failures") {
  CHECK(run({"eval", "--fn-file", kData + "/bad_value.csv"}).code == 4);
  CHECK(run({"eval", "--fn-file", kData + "/missing.csv"}).code == 4);
  CHECK(run({"eval", "--fn-file", kData + "/short_domain.csv"}).code == 4);
  CHECK(run({"eval", "--config", kData + "/broken.json"}).code == 4);
  CHECK(run({"eval", "--fn-file", kData + "/tent.csv", "--n", "5", "--p", "0.9", "--q", "0.8"})
            .code == 0);
  CHECK(run({"eval", "--p", "0.999", "--q", "0.99", "--max-terms", "5"}).code == 3);
}

TEST_CASE("config precedence, determinism and --out") {
  const auto from_file = json::parse(
      run({"moments", "--config", kData + "/golden_moments.json", "--format", "json"}).out);
  CHECK(from_file["meta"]["params"]["n"] == 10);
  CHECK(from_file["rows"].size() == 11);
  const auto overridden = json::parse(run({"moments", "--config", kData + "/golden_moments.json",
                                           "--n", "7", "--format", "json"})
                                          .out);
  CHECK(overridden["meta"]["params"]["n"] == 7);
  CHECK(overridden["meta"]["params"]["p"] == 0.9);

  const std::vector<std::string> args = {"eval", "--fn", "sin7", "--n", "20", "--grid", "51"};
  CHECK(run(args).out == run(args).out);

  const std::string path = "pqkant_test_out.csv";
  std::remove(path.c_str());
  const auto r = run({"moments", "--grid", "3", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("x,m0,", 0) == 0);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("process exit codes") {
  const std::string bin = PQKANT_CLI_PATH;
  CHECK(cli_support::binary_exit_code(bin, "moments --grid 3") == 0);
  CHECK(cli_support::binary_exit_code(bin, "moments --p 0.5 --q 0.7") == 2);
  CHECK(cli_support::binary_exit_code(bin, "eval --fn-file /nonexistent.csv") == 4);
  CHECK(cli_support::binary_exit_code(bin, "--version") == 0);
}
