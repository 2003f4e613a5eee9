#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "batpay/sim/scenario.hpp"

namespace batpay::sim {

class ReportFormatError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// "json": one summary document. "jsonl": one record per line, each tagged
// with a "type" field. Both carry "schema": "batpay-report/1". Unknown
// format names throw ReportFormatError.
std::string emitReport(const ScenarioReport& report, std::string_view format);
ScenarioReport parseReport(std::string_view text, std::string_view format);

// SHA-256 of the canonical JSON form, in hex.
std::string reportDigest(const ScenarioReport& report);

}  // namespace batpay::sim
