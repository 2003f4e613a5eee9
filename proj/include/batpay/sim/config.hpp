#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "batpay/cost_model.hpp"
#include "batpay/params.hpp"

namespace batpay::sim {

// Fractions are parts-per-million so every scenario stays integer-only.
using Ppm = std::uint32_t;
inline constexpr Ppm kPpmOne = 1'000'000;

struct Range {
    std::uint64_t min = 0;
    std::uint64_t max = 0;
    bool operator==(const Range&) const = default;
};

enum class CheatStyle {
    InflatedList,  // respond with a pro-rata inflated list, then fail the proof
    Silent,        // never answer a challenge
    BadProof,      // answer, then prove with another payment's payData
};

std::string_view cheatStyleName(CheatStyle s);

struct ScenarioConfig {
    std::uint64_t seed = 1;
    BlockNumber blocks = 200;
    // Extra blocks allowed after `blocks` for open games to settle.
    BlockNumber drainLimit = 400;

    std::uint32_t buyers = 10;
    Amount buyerFunds = 1'000'000;
    Ppm paymentProbability = 300'000;
    Range perDestination{1, 5};
    Range payeesPerBatch{5, 40};
    Ppm lockedPaymentFraction = 0;

    std::uint32_t sellers = 100;
    Ppm bulkRegisteredFraction = 500'000;
    std::uint32_t accumulationThreshold = 5;
    Ppm sellerWithdrawProbability = 50'000;

    std::uint32_t delegates = 2;
    Amount delegateFunds = 1'000'000;
    Amount delegateFee = 1;
    Ppm instantFraction = 0;
    Ppm cheatingDelegateFraction = 0;
    Range delegateOverstatement{1, 3};
    CheatStyle cheatStyle = CheatStyle::InflatedList;

    std::uint32_t monitors = 2;
    Amount monitorFunds = 100'000;
    Ppm lazyMonitorFraction = 0;
    Ppm lazySampleRate = 200'000;

    std::uint32_t unlockers = 1;
    Ppm withholdingUnlockerFraction = 0;
    Range unlockerFee{0, 2};

    Params params;
    CostParams cost = defaultCostParams();
    std::uint64_t gasPriceGwei = 5;
    std::uint64_t ethUsd = 225;

    // Throws ConfigError (line 0) naming the first violated constraint.
    void validate() const;

    bool operator==(const ScenarioConfig&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Parses the key = value scenario format (see docs/FORMATS.md). Keys missing
// from the text keep their defaults. The result is validated.
ScenarioConfig parseScenarioConfig(std::string_view text);
ScenarioConfig loadScenarioConfig(const std::string& path);
std::string formatScenarioConfig(const ScenarioConfig& cfg);

// Number of actors out of `count` that carry a trait with frequency `f`
// (rounded half up); the lowest-indexed actors get it.
std::uint32_t actorsWithTrait(std::uint32_t count, Ppm f);

}  // namespace batpay::sim
