#pragma once

#include <memory>
#include <optional>

#include "batpay/chain_log.hpp"
#include "batpay/ledger.hpp"

namespace batpay {

struct ReplayResult {
    std::unique_ptr<Ledger> ledger;
    Digest finalDigest;
    // Set when the log carried an expected digest.
    std::optional<bool> digestMatches;
};

// Re-executes a chain log through a fresh Ledger. The first record must be
// Instantiate. Signatures are trusted (AuthMode::TrustLog); every other rule
// is re-checked, and a rejected record aborts with the ProtocolError.
ReplayResult replayChainLog(const ChainLog& log, const std::optional<Digest>& expected = std::nullopt);

}  // namespace batpay
