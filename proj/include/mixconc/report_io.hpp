#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mixconc/empirics.hpp"

namespace mixconc {

enum class OutputFormat { Text, Csv, Structured };

OutputFormat parse_output_format(std::string_view name);

// CSV column order. Frozen; append new columns at the end only.
inline constexpr std::string_view kDeviationCsvHeader =
    "epsilon,threshold,exceedances,empirical_frequency,mc_halfwidth,bound,bound_raw,satisfied";

/// Structured output is JSON; doubles are written in shortest round-trip
/// form, so parse_deviation_report reproduces every value bit for bit.
std::string format_deviation_report(const DeviationReport& report, OutputFormat format);
DeviationReport parse_deviation_report(std::string_view structured);
/// Reads the rows back from CSV output.
std::vector<DeviationRow> parse_deviation_csv(std::string_view csv);

std::string format_lemma_report(const LemmaReport& report, OutputFormat format);

}  // namespace mixconc
