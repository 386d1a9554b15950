#include "mixconc/report_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

#include "mixconc/error.hpp"

namespace mixconc {

namespace {

using nlohmann::json;

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json to_json(const DeviationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"epsilon", row.epsilon},
                    {"threshold", row.threshold},
                    {"exceedances", row.exceedances},
                    {"empirical_frequency", row.empirical_frequency},
                    {"mc_halfwidth", row.mc_halfwidth},
                    {"bound", row.bound},
                    {"bound_raw", row.bound_raw},
                    {"satisfied", row.satisfied}});
  return {{"spec_id", r.spec_id},
          {"n", r.n},
          {"trials", r.trials},
          {"seed", r.seed},
          {"statistic", std::string(to_string(r.statistic))},
          {"delta_mc", r.delta_mc},
          {"stationary", r.stationary},
          {"G", r.G},
          {"theta", r.theta},
          {"correction", r.correction},
          {"all_satisfied", r.all_satisfied()},
          {"rows", std::move(rows)}};
}

std::string deviation_text(const DeviationReport& r) {
  std::ostringstream out;
  out << "deviation experiment: " << (r.spec_id.empty() ? "<unnamed>" : r.spec_id) << "\n"
      << "  statistic   " << to_string(r.statistic) << "\n"
      << "  n           " << r.n << "\n"
      << "  trials      " << r.trials << "\n"
      << "  seed        " << r.seed << "\n"
      << "  G, theta    " << fixed(r.G) << ", " << fixed(r.theta) << "\n"
      << "  start       " << (r.stationary ? "stationary" : "initial law, correction " + fixed(r.correction))
      << "\n"
      << "  delta_mc    " << r.delta_mc << "\n\n";
  out << "  epsilon    threshold  frequency  halfwidth  bound      ok\n";
  for (const auto& row : r.rows)
    out << "  " << fixed(row.epsilon, 4) << "     " << fixed(row.threshold) << "   " << fixed(row.empirical_frequency)
        << "   " << fixed(row.mc_halfwidth) << "   " << fixed(row.bound) << "   " << (row.satisfied ? "yes" : "NO")
        << "\n";
  out << (r.all_satisfied() ? "all rows satisfied\n" : "SOME ROWS VIOLATED\n");
  return out.str();
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  if (name == "text") return OutputFormat::Text;
  if (name == "csv") return OutputFormat::Csv;
  if (name == "structured" || name == "json") return OutputFormat::Structured;
  throw Error(ErrorCode::InvalidArgument, "unknown output format '" + std::string(name) + "'");
}

std::string format_deviation_report(const DeviationReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Structured:
      return to_json(report).dump(2) + "\n";
    case OutputFormat::Csv: {
      std::string out(kDeviationCsvHeader);
      out += "\n";
      for (const auto& row : report.rows)
        out += exact(row.epsilon) + "," + exact(row.threshold) + "," + std::to_string(row.exceedances) + "," +
               exact(row.empirical_frequency) + "," + exact(row.mc_halfwidth) + "," + exact(row.bound) + "," +
               exact(row.bound_raw) + "," + (row.satisfied ? "1" : "0") + "\n";
      return out;
    }
    case OutputFormat::Text:
      return deviation_text(report);
  }
  return {};
}

DeviationReport parse_deviation_report(std::string_view structured) {
  json doc;
  try {
    doc = json::parse(structured.begin(), structured.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    DeviationReport r;
    r.spec_id = doc.at("spec_id").get<std::string>();
    r.n = doc.at("n").get<std::size_t>();
    r.trials = doc.at("trials").get<std::size_t>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.statistic = parse_statistic(doc.at("statistic").get<std::string>());
    r.delta_mc = doc.at("delta_mc").get<double>();
    r.stationary = doc.at("stationary").get<bool>();
    r.G = doc.at("G").get<double>();
    r.theta = doc.at("theta").get<double>();
    r.correction = doc.at("correction").get<double>();
    for (const auto& row : doc.at("rows")) {
      DeviationRow d;
      d.epsilon = row.at("epsilon").get<double>();
      d.threshold = row.at("threshold").get<double>();
      d.exceedances = row.at("exceedances").get<std::uint64_t>();
      d.empirical_frequency = row.at("empirical_frequency").get<double>();
      d.mc_halfwidth = row.at("mc_halfwidth").get<double>();
      d.bound = row.at("bound").get<double>();
      d.bound_raw = row.at("bound_raw").get<double>();
      d.satisfied = row.at("satisfied").get<bool>();
      r.rows.push_back(d);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed report: ") + e.what());
  }
}

std::vector<DeviationRow> parse_deviation_csv(std::string_view csv) {
  std::istringstream in{std::string(csv)};
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kDeviationCsvHeader, ErrorCode::Parse,
          "CSV header does not match the deviation report layout");
  std::vector<DeviationRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    require(cells.size() == 8, ErrorCode::Parse, "CSV line " + std::to_string(lineno) + " has " +
                                                     std::to_string(cells.size()) + " columns, expected 8");
    DeviationRow d;
    d.epsilon = std::strtod(cells[0].c_str(), nullptr);
    d.threshold = std::strtod(cells[1].c_str(), nullptr);
    d.exceedances = std::strtoull(cells[2].c_str(), nullptr, 10);
    d.empirical_frequency = std::strtod(cells[3].c_str(), nullptr);
    d.mc_halfwidth = std::strtod(cells[4].c_str(), nullptr);
    d.bound = std::strtod(cells[5].c_str(), nullptr);
    d.bound_raw = std::strtod(cells[6].c_str(), nullptr);
    d.satisfied = cells[7] == "1";
    rows.push_back(d);
  }
  return rows;
}

std::string format_lemma_report(const LemmaReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::Structured: {
      json checks = json::array();
      for (const auto& c : report.checks)
        checks.push_back({{"name", c.name},
                          {"kind", c.equality ? "equality" : "inequality"},
                          {"tolerance", c.tolerance},
                          {"checks", c.checks},
                          {"worst_gap", c.worst_gap},
                          {"passed", c.passed()},
                          {"failing_seeds", c.failing_seeds}});
      json doc{{"seed", report.seed},
               {"instances", report.instances},
               {"max_states", report.max_states},
               {"max_length", report.max_length},
               {"eta_kappa_comparisons", report.eta_kappa_comparisons},
               {"eta_kappa_equalities", report.eta_kappa_equalities},
               {"all_passed", report.all_passed()},
               {"checks", std::move(checks)}};
      return doc.dump(2) + "\n";
    }
    case OutputFormat::Csv: {
      std::string out = "name,kind,tolerance,checks,worst_gap,passed,failing_seeds\n";
      for (const auto& c : report.checks) {
        std::string seeds;
        for (auto s : c.failing_seeds) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
        out += c.name + "," + (c.equality ? "equality" : "inequality") + "," + exact(c.tolerance) + "," +
               std::to_string(c.checks) + "," + exact(c.worst_gap) + "," + (c.passed() ? "1" : "0") + "," + seeds +
               "\n";
      }
      return out;
    }
    case OutputFormat::Text: {
      std::ostringstream out;
      out << "exact lemma suite: " << report.instances << " instances, seed " << report.seed << ", k <= "
          << report.max_states << ", n <= " << report.max_length << "\n";
      for (const auto& c : report.checks) {
        char line[160];
        std::snprintf(line, sizeof line, "  %-4s %-24s %8zu checks  worst gap %+.3e (tol %.0e)\n",
                      c.passed() ? "PASS" : "FAIL", c.name.c_str(), c.checks, c.worst_gap, c.tolerance);
        out << line;
        if (!c.passed()) {
          out << "       failing instance seeds:";
          for (auto s : c.failing_seeds) out << " " << s;
          out << "\n";
        }
      }
      out << "  eta_bar(Markov) == kappa(A^(j-i)) in " << report.eta_kappa_equalities << " of "
          << report.eta_kappa_comparisons << " comparisons\n";
      out << (report.all_passed() ? "all lemmas hold\n" : "LEMMA VIOLATIONS FOUND\n");
      return out.str();
    }
  }
  return {};
}

}  // namespace mixconc
