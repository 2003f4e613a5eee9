#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "batpay/chain_log.hpp"
#include "batpay/sim/config.hpp"

namespace batpay::sim {

// Seeded generator with platform-independent draws (the standard
// distributions are implementation-defined, so they are not used).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    // Uniform in [0, n); n > 0.
    std::uint64_t below(std::uint64_t n);
    // Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi);
    std::uint64_t in(const Range& r) { return between(r.min, r.max); }
    bool chance(Ppm p) { return below(kPpmOne) < p; }
    Bytes bytes(std::size_t n);

private:
    std::mt19937_64 engine_;
};

// Spreads `extra` over `entries` in proportion to their amounts using the
// largest-remainder rule (ties go to the earlier entry). Entries must sum to
// a positive total.
std::vector<ClaimEntry> inflateProRata(std::vector<ClaimEntry> entries, Amount extra);

enum class Role : std::uint8_t { Buyer, Seller, Delegate, Monitor, Unlocker };
std::string_view roleName(Role r);

struct ActorBalance {
    AccountId id = 0;
    std::string role;
    std::uint32_t index = 0;
    Amount balance = 0;
    PayIndex lastCollected = 0;
    bool operator==(const ActorBalance&) const = default;
};

struct OracleDiff {
    AccountId id = 0;
    std::string field;  // "balance" or "last_collected"
    std::uint64_t ledger = 0;
    std::uint64_t oracle = 0;
    bool operator==(const OracleDiff&) const = default;
};

struct GameStats {
    std::uint64_t opened = 0;
    std::uint64_t instant = 0;
    std::uint64_t challenged = 0;  // games with at least one challenge
    std::uint64_t wonByMonitor = 0;
    std::uint64_t wonByDelegate = 0;  // challenges that ended in challenge_failed
    std::uint64_t settledUnchallenged = 0;
    std::uint64_t overstated = 0;
    std::uint64_t overstatedCaught = 0;
    std::uint64_t overstatedSettled = 0;  // escaped every monitor
    std::uint64_t falseWins = 0;          // monitor won against a correct collect
    Amount instantLoss = 0;               // fronted funds delegates never recovered
    std::uint64_t stillOpen = 0;          // slots left when the run stopped
    bool operator==(const GameStats&) const = default;
};

struct CostSummary {
    // Gas figures come from a calibrated linear surrogate, not EVM metering.
    std::string model = "calibrated-linear-surrogate";
    CostParams calibration;
    std::uint64_t transactions = 0;
    Gas totalGas = 0;
    Gas relevantGas = 0;
    std::uint64_t paymentsCount = 0;
    Gas amortizedPerPayment = 0;
    double usdPerPayment = 0;
    std::map<std::string, Gas> gasByOp;
    std::map<std::string, std::uint64_t> txByOp;
    bool operator==(const CostSummary&) const = default;
};

struct ScenarioReport {
    static constexpr int kSchemaVersion = 1;

    std::uint64_t seed = 0;
    BlockNumber blocks = 0;
    BlockNumber finalBlock = 0;
    bool drained = true;
    std::map<std::string, std::uint32_t> actors;  // count per role

    std::vector<ActorBalance> balances;
    bool conservationOk = true;
    GameStats games;
    std::uint64_t payments = 0;
    std::uint64_t lockedPayments = 0;
    std::uint64_t unlocks = 0;
    std::uint64_t refunds = 0;
    std::uint64_t withdrawals = 0;
    std::uint64_t unclaimedBulkIds = 0;
    std::map<std::string, std::uint64_t> rejections;  // error code -> count
    CostSummary cost;
    std::vector<OracleDiff> oracleDiffs;
    std::map<std::string, std::uint64_t> eventCounts;
    std::int64_t monitorNet = 0;
    bool soundnessOk = true;
    std::string stateDigest;

    bool operator==(const ScenarioReport&) const = default;
};

// Runs one seeded scenario. Throws ConfigError for an invalid config and
// ProtocolError(InvariantViolation) naming the violated invariant if a block
// boundary check fails.
ScenarioReport runScenario(const ScenarioConfig& config);

struct ScenarioRun {
    ScenarioReport report;
    ChainLog log;
};
ScenarioRun runScenarioWithLog(const ScenarioConfig& config);

}  // namespace batpay::sim
