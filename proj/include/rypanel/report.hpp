#pragma once

#include <string>

#include <json.hpp>

#include "rypanel/estimators.hpp"
#include "rypanel/rybczynski.hpp"
#include "rypanel/synthetic.hpp"

namespace rypanel {

enum class OutputFormat { Text, Csv, Json };

/// Locale-independent number formatting: text views round to 3 decimals like
/// the reference tables, csv/json keep full double precision.
std::string format_fixed3(double v);
std::string format_full(double v);

std::string render_estimation(const EstimationResult& result, OutputFormat format);
std::string render_study(const StudyResult& result, OutputFormat format);
std::string render_mc(const McSummary& summary, OutputFormat format);
std::string render_balance(const BalanceReport& report, OutputFormat format);

nlohmann::json estimation_to_json(const EstimationResult& result);
EstimationResult estimation_from_json(const nlohmann::json& j);

nlohmann::json study_to_json(const StudyResult& result);
StudyResult study_from_json(const nlohmann::json& j);

} // namespace rypanel
