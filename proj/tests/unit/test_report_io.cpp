#include <string>

#include "doctest.h"
#include "mixconc/error.hpp"
#include "mixconc/report_io.hpp"

using namespace mixconc;

namespace {

DeviationReport sample_report() {
  const StochasticMatrix a = StochasticMatrix::from_source_rows({{0.9, 0.1}, {0.2, 0.8}});
  const ChainSpec spec(StochasticVector::point_mass(2, 1), a, {}, "two");
  ExperimentOptions opt;
  opt.stationary = false;
  return deviation_experiment(spec, 200, 300, 12, Statistic::TotalVariation, {0.01, 0.033, 0.1, 0.2}, opt);
}

std::size_t lines(const std::string& s) {
  std::size_t count = 0;
  for (char c : s) count += c == '\n';
  return count;
}

}  // namespace

TEST_CASE("structured reports round-trip exactly") {
  const DeviationReport r = sample_report();
  const std::string text = format_deviation_report(r, OutputFormat::Structured);
  const DeviationReport back = parse_deviation_report(text);
  CHECK(back == r);
  CHECK(format_deviation_report(back, OutputFormat::Structured) == text);
}

TEST_CASE("csv reports have one header and one line per epsilon") {
  const DeviationReport r = sample_report();
  const std::string csv = format_deviation_report(r, OutputFormat::Csv);
  CHECK(lines(csv) == 1 + r.rows.size());
  CHECK(csv.rfind(std::string(kDeviationCsvHeader) + "\n", 0) == 0);
  const auto rows = parse_deviation_csv(csv);
  REQUIRE(rows.size() == r.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i] == r.rows[i]);
  CHECK_THROWS_AS(parse_deviation_csv("eps,bound\n0.1,0.2\n"), Error);
}

TEST_CASE("text reports name every row") {
  const std::string text = format_deviation_report(sample_report(), OutputFormat::Text);
  CHECK(text.find("total_variation") != std::string::npos);
  CHECK(text.find("0.0330") != std::string::npos);
  CHECK(text.find("correction") != std::string::npos);
}

TEST_CASE("malformed structured reports are rejected") {
  CHECK_THROWS_AS(parse_deviation_report("{"), Error);
  CHECK_THROWS_AS(parse_deviation_report(R"({"n": 3})"), Error);
}

TEST_CASE("output format names") {
  CHECK(parse_output_format("text") == OutputFormat::Text);
  CHECK(parse_output_format("csv") == OutputFormat::Csv);
  CHECK(parse_output_format("structured") == OutputFormat::Structured);
  CHECK_THROWS_AS(parse_output_format("yaml"), Error);
}

TEST_CASE("lemma reports serialize in every format") {
  LemmaSuiteOptions o;
  o.instances = 10;
  const LemmaReport r = exact_lemma_suite(o);
  const std::string csv = format_lemma_report(r, OutputFormat::Csv);
  CHECK(lines(csv) == 1 + r.checks.size());
  CHECK(format_lemma_report(r, OutputFormat::Structured).find("\"all_passed\": true") != std::string::npos);
  CHECK(format_lemma_report(r, OutputFormat::Text).find("all lemmas hold") != std::string::npos);
}
