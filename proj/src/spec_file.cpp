#include "mixconc/spec_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "mixconc/error.hpp"

namespace mixconc {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::size_t positive_count(const json& doc, const char* key) {
  require(doc.contains(key), ErrorCode::InvalidArgument, std::string("missing field '") + key + "'");
  const json& v = doc.at(key);
  require(v.is_number_integer() && v.get<long long>() > 0, ErrorCode::InvalidArgument,
          std::string("field '") + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

std::vector<double> read_distribution(const json& v, std::size_t expected, const std::string& what) {
  require(v.is_array(), ErrorCode::InvalidArgument, what + " must be an array");
  require(v.size() == expected, ErrorCode::DimensionMismatch,
          what + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(expected));
  std::vector<double> out;
  out.reserve(expected);
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(v[i].is_number(), ErrorCode::InvalidArgument,
            what + " entry " + std::to_string(i) + " is not a number");
    const double x = v[i].get<double>();
    require(std::isfinite(x) && x >= 0.0, ErrorCode::InvalidArgument,
            what + " entry " + std::to_string(i) + " is negative or not finite (" + num(x) + ")");
    sum += x;
    out.push_back(x);
  }
  require(std::abs(sum - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
          what + " sums to " + num(sum) + " (deviation " + num(sum - 1.0) + ")");
  return out;
}

std::vector<std::vector<double>> read_rows(const json& v, std::size_t rows, std::size_t width,
                                           const std::string& field) {
  require(v.is_array(), ErrorCode::InvalidArgument, "field '" + field + "' must be an array of rows");
  require(v.size() == rows, ErrorCode::DimensionMismatch,
          "field '" + field + "' has " + std::to_string(v.size()) + " rows, expected " + std::to_string(rows));
  std::vector<std::vector<double>> out;
  for (std::size_t x = 0; x < rows; ++x)
    out.push_back(read_distribution(v[x], width, field + " row " + std::to_string(x)));
  return out;
}

}  // namespace

ChainSpec parse_chain_spec(std::string_view text, std::string default_name) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("chain spec is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), ErrorCode::Parse, "chain spec must be a JSON object");
  for (const auto& [key, _] : doc.items())
    require(key == "name" || key == "states" || key == "initial" || key == "transition" || key == "emission" ||
                key == "symbols",
            ErrorCode::InvalidArgument, "unknown field '" + key + "'");

  const std::size_t k = positive_count(doc, "states");
  require(doc.contains("transition"), ErrorCode::InvalidArgument, "missing field 'transition'");
  StochasticMatrix transition = StochasticMatrix::from_source_rows(read_rows(doc["transition"], k, k, "transition"));

  std::optional<StochasticMatrix> emission;
  if (doc.contains("emission")) {
    const std::size_t m = positive_count(doc, "symbols");
    emission = StochasticMatrix::from_source_rows(read_rows(doc["emission"], k, m, "emission"));
  } else {
    require(!doc.contains("symbols"), ErrorCode::InvalidArgument, "field 'symbols' given without 'emission'");
  }

  std::string name = std::move(default_name);
  if (doc.contains("name")) {
    require(doc["name"].is_string(), ErrorCode::InvalidArgument, "field 'name' must be a string");
    name = doc["name"].get<std::string>();
  }

  StochasticVector initial = doc.contains("initial")
                                 ? StochasticVector(read_distribution(doc["initial"], k, "initial"))
                             : check_ergodic(transition) ? stationary_distribution(transition)
                                                         : StochasticVector::uniform(k);
  return ChainSpec(std::move(initial), std::move(transition), std::move(emission), std::move(name));
}

ChainSpec load_chain_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open spec file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_chain_spec(buf.str(), path.stem().string());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string chain_spec_to_json(const ChainSpec& spec) {
  auto rows = [](const StochasticMatrix& m) {
    json out = json::array();
    for (std::size_t x = 0; x < m.cols(); ++x) {
      const auto col = m.column(x);
      out.push_back(std::vector<double>(col.begin(), col.end()));
    }
    return out;
  };
  json doc;
  if (!spec.name().empty()) doc["name"] = spec.name();
  doc["states"] = spec.state_count();
  doc["initial"] = std::vector<double>(spec.initial().probs().begin(), spec.initial().probs().end());
  doc["transition"] = rows(spec.transition());
  if (spec.emission()) {
    doc["symbols"] = spec.symbol_count();
    doc["emission"] = rows(*spec.emission());
  }
  return doc.dump(2);
}

}  // namespace mixconc
