#pragma once

#include <string>
#include <string_view>

#include "neuralrank/ranker.hpp"

namespace neuralrank {

std::string to_json(const ScoreReport& report);
std::string to_csv(const ScoreReport& report);
ScoreReport score_report_from_json(std::string_view text);

std::string to_json(const SweepReport& report);
std::string to_csv(const SweepReport& report);

std::string to_json(const SensitivityReport& report);
std::string to_csv(const SensitivityReport& report);

std::string to_json(const AgreementReport& report);
std::string to_csv(const AgreementReport& report);

/// Shortest decimal text that round-trips the double.
std::string format_double(double value);

}  // namespace neuralrank
