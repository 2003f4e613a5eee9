// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "batpay/cost_model.hpp"
#include "batpay/entitlement.hpp"
#include "batpay/error.hpp"
#include "batpay/ledger.hpp"
#include "batpay/merkle.hpp"
#include "batpay/paydata.hpp"
#include "batpay/sim/config.hpp"
#include "batpay/sim/monitor.hpp"
#include "batpay/sim/oracle.hpp"
#include "batpay/sim/report.hpp"
#include "batpay/sim/scenario.hpp"

using namespace batpay;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budgetSeconds;
    std::function<Outcome()> run;
};

std::string str(const std::ostringstream& s) { return s.str(); }

// ---------------------------------------------------------------- 1 and 2

struct CostLines {
    Gas reg = 0, col = 0, amortized = 0;
    std::string usd;
};

#ifdef BATPAY_CLI
std::optional<CostLines> costViaCli(std::uint64_t n) {
    std::string cmd = std::string(BATPAY_CLI) + " cost --n " + std::to_string(n) + " --gwei 5 --ethusd 225";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return std::nullopt;
    std::string out;
    char buf[512];
    while (std::fgets(buf, sizeof buf, p)) out += buf;
    int status = pclose(p);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return std::nullopt;
    CostLines c;
    std::istringstream in(out);
    std::string key, value;
    while (in >> key >> value) {
        if (key == "register_gas") c.reg = std::stoull(value);
        if (key == "collect_gas") c.col = std::stoull(value);
        if (key == "amortized_gas") c.amortized = std::stoull(value);
        if (key == "usd_per_payment") c.usd = value;
    }
    return c;
}
#endif

Outcome costReproduction() {
    const auto cp = defaultCostParams();
    CostLines c;
    c.reg = registerPaymentGas(1000, cp);
    c.col = collectGas(cp);
    c.amortized = amortizedPerPayment(c.reg, c.col, 1000);
    c.usd = formatUsd(usdCost(c.amortized, 5, 225));
    std::string source = "library";
#ifdef BATPAY_CLI
    auto cli = costViaCli(1000);
    if (!cli) return {false, "cli cost command failed"};
    c = *cli;
    source = "cli";
#endif
    const double usd = std::strtod(c.usd.c_str(), nullptr);
    std::ostringstream d;
    d << source << ": register=" << c.reg << " collect=" << c.col << " amortized=" << c.amortized << " usd=" << c.usd
      << " (exact " << usdCost(397, 5, 225) << ")";
    bool ok = c.reg == 228255 && c.col == 167440 && c.amortized == 397 && std::fabs(usd - 0.00045) <= 0.00001 + 1e-12;
    return {ok, str(d)};
}

Outcome abstractRange() {
    const auto cp = defaultCostParams();
    bool ok = true;
    std::ostringstream d;
    for (std::uint32_t n : {300u, 1000u, 3000u, 10000u}) {
        Gas a = amortizedPerPayment(registerPaymentGas(n, cp), collectGas(cp), n);
        bool in = a >= 300 && a <= 1000;
        if (n == 1000) in = in && a == 397;
        ok = ok && in;
        d << "n=" << n << ":" << a << (in ? "" : "(out)") << " ";
    }
    d << "band=[300,1000]";
    return {ok, str(d)};
}

// ---------------------------------------------------------------- 3

Outcome codecProperties() {
    std::mt19937_64 rng(0xC0DEC);
    std::size_t clamped = 0, mutationsRejected = 0, mutationsCanonical = 0, elements = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t size = rng() % 5001;
        std::uint64_t first = rng() % 1'000'000;
        // Gaps are uniform in [0, 1e6] unless the list would leave the ID space.
        std::uint64_t maxGap = 1'000'000;
        if (size > 1) {
            const std::uint64_t room = (std::uint64_t{0xFFFFFFFE} - first) / (size - 1);
            if (room < maxGap) {
                maxGap = room;
                ++clamped;
            }
        }
        std::vector<AccountId> ids(size);
        std::uint64_t cur = first;
        for (std::size_t i = 0; i < size; ++i) {
            if (i > 0) cur += rng() % (maxGap + 1);
            ids[i] = static_cast<AccountId>(cur);
        }
        elements += size;
        const auto wire = encodePayData(ids);
        if (decodePayData(wire) != ids) return {false, "round trip failed at trial " + std::to_string(t)};
        if (encodePayData(decodePayData(wire)) != wire)
            return {false, "re-encoding differs at trial " + std::to_string(t)};
        // A flipped bit is either rejected or yields another canonical encoding.
        auto bent = wire;
        bent[rng() % bent.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
        try {
            auto other = decodePayData(bent);
            if (encodePayData(other) != bent) return {false, "non-canonical wire accepted at trial " + std::to_string(t)};
            ++mutationsCanonical;
        } catch (const ProtocolError&) {
            ++mutationsRejected;
        }
    }
    for (int t = 0; t < 1000; ++t) {
        std::vector<AccountId> ids(1000);
        const AccountId start = static_cast<AccountId>(rng() % (std::uint64_t{0xFFFFFFFE} - 1000));
        for (AccountId i = 0; i < 1000; ++i) ids[i] = start + i;
        auto size = encodePayData(ids).size();
        if (size != 1007) return {false, "consecutive list encoded to " + std::to_string(size) + " bytes"};
    }
    std::ostringstream d;
    d << "10000 round trips (" << elements << " ids, " << clamped << " with gaps capped by the 32-bit ID space), "
      << "bit flips rejected=" << mutationsRejected << " re-canonical=" << mutationsCanonical
      << ", 1000 consecutive lists of 1000 -> 1007 bytes";
    return {true, str(d)};
}

// ---------------------------------------------------------------- 4

Outcome merkleSuite() {
    std::mt19937_64 rng(0x3E4C1E);
    auto randomAddress = [&] {
        Address a;
        for (auto& b : a.bytes) b = static_cast<std::uint8_t>(rng());
        return a;
    };
    std::size_t proofs = 0;
    std::vector<std::vector<Address>> lists;
    for (std::size_t n = 1; n <= 32; ++n) {
        std::vector<Address> leaves(n);
        for (auto& a : leaves) a = randomAddress();
        const auto root = merkleRoot(leaves);
        for (std::size_t i = 0; i < n; ++i) {
            auto proof = MerkleProof::parse(merkleProve(leaves, i).serialize());
            if (!verifyMerkleProof(root, leaves[i], proof, n))
                return {false, "valid proof rejected: n=" + std::to_string(n) + " i=" + std::to_string(i)};
            ++proofs;
        }
        lists.push_back(std::move(leaves));
    }
    std::size_t rejected = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto& leaves = lists[rng() % lists.size()];
        const std::size_t n = leaves.size();
        const std::size_t i = rng() % n;
        auto root = merkleRoot(leaves);
        auto leaf = leaves[i];
        auto proof = merkleProve(leaves, i);
        // Pick one bit among leaf, root, index and siblings.
        const std::size_t leafBits = leaf.bytes.size() * 8, rootBits = 256, indexBits = 32;
        const std::size_t total = leafBits + rootBits + indexBits + proof.siblings.size() * 256;
        std::size_t bit = rng() % total;
        std::string where;
        if (bit < leafBits) {
            leaf.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            where = "leaf";
        } else if ((bit -= leafBits) < rootBits) {
            root.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            where = "root";
        } else if ((bit -= rootBits) < indexBits) {
            proof.leafIndex ^= 1u << bit;
            where = "index";
        } else {
            bit -= indexBits;
            proof.siblings[bit / 256].bytes[(bit % 256) / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            where = "sibling";
        }
        if (verifyMerkleProof(root, leaf, proof, n))
            return {false, "mutated " + where + " accepted: n=" + std::to_string(n) + " i=" + std::to_string(i)};
        ++rejected;
    }
    return {true, std::to_string(proofs) + " proofs verified over sizes 1..32, " + std::to_string(rejected) +
                      "/1000 single-bit mutations rejected"};
}

// ---------------------------------------------------------------- 5

// One payment of the desk-scale log, seen from the recipient's side.
struct PayClass {
    Amount perDest = 1;
    std::uint32_t occurrences = 0;  // copies of the recipient among the <= 4 payees
    PaymentStatus status = PaymentStatus::Committed;
};

struct GameBase {
    Ledger ledger;
    Identity buyer = Identity::fromLabel("game/buyer"), recipient = Identity::fromLabel("game/recipient"),
             delegate = Identity::fromLabel("game/delegate"), monitor = Identity::fromLabel("game/monitor"),
             filler = Identity::fromLabel("game/filler"), unlocker = Identity::fromLabel("game/unlocker");
    AccountId buyerId = 0, recipientId = 0, delegateId = 0, monitorId = 0, fillerId = 0, unlockerId = 0;
    std::vector<Bytes> payData;
    sim::BalanceOracle oracle;

    static Params params() {
        Params p;
        p.unlockPeriod = 2;
        p.challengePeriod = 3;
        p.responsePeriod = 2;
        p.collectStake = 10;
        p.challengeStake = 7;
        return p;
    }

    explicit GameBase(const std::vector<PayClass>& classes)
        : ledger(params(), TokenAdapter(Identity::fromLabel("game/token").address())) {
        auto fund = [&](const Identity& who, Amount amount) {
            ledger.enroll(who);
            ledger.mintExternal(who.address(), amount);
            return ledger.deposit(kNewAccount, amount, who.address());
        };
        auto reg = [&](const Identity& who) {
            ledger.enroll(who);
            return ledger.registerAccount(who.address());
        };
        buyerId = fund(buyer, 1'000'000);
        recipientId = reg(recipient);
        delegateId = fund(delegate, 1'000'000);
        monitorId = fund(monitor, 1'000'000);
        fillerId = reg(filler);
        unlockerId = reg(unlocker);
        const Bytes key{0x6b, 0x65, 0x79};
        for (const auto& c : classes) {
            std::vector<AccountId> payees(c.occurrences, recipientId);
            payees.resize(4, fillerId);
            std::optional<Digest> lock;
            if (c.status != PaymentStatus::Committed) lock = lockingKeyHash(unlockerId, key);
            ledger.registerPayment(buyer.address(), buyerId, c.perDest, payees, lock, lock ? 1 : 0);
            payData.push_back(encodePayData(payees));
        }
        ledger.advanceBlock(ledger.params().unlockPeriod);
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (classes[i].status == PaymentStatus::Refunded) ledger.refundLockedPayment(i + 1);
        oracle.sync(ledger.chainLog());
    }
};

enum class Liar { ProRata, OnFirst, OnLast, OnZeroPayment, Silent };
constexpr Liar kLiars[] = {Liar::ProRata, Liar::OnFirst, Liar::OnLast, Liar::OnZeroPayment, Liar::Silent};

struct GameTally {
    std::uint64_t logs = 0, games = 0;
    std::uint64_t overstated = 0, monitorWins = 0, acceptedForgedProofs = 0;
    std::uint64_t correct = 0, falseWins = 0, honestSettled = 0, forcedChallenges = 0;
    std::string firstFailure;

    void fail(const std::string& what) {
        if (firstFailure.empty()) firstFailure = what;
    }
};

std::string describe(const std::vector<PayClass>& classes) {
    std::ostringstream s;
    s << "[";
    for (const auto& c : classes)
        s << "(" << c.perDest << "x" << c.occurrences << (c.status == PaymentStatus::Committed ? "" : "L") << ")";
    s << "]";
    return s.str();
}

// Plays one overstated collect against the canonical monitor. Returns true
// when the monitor wins via challenge_success.
bool playOverstated(const GameBase& base, Amount extra, Liar liar, GameTally& tally) {
    Ledger l = base.ledger;
    sim::BalanceOracle oracle = base.oracle;
    const PayIndex n = l.paymentCount();
    const Amount entitled = oracle.entitlement(base.recipientId, 0, n);
    auto list = oracle.breakdown(base.recipientId, 0, n);
    switch (liar) {
        case Liar::ProRata:
            list = list.empty() ? std::vector<ClaimEntry>{{n, extra}} : sim::inflateProRata(list, extra);
            break;
        case Liar::OnFirst:
            if (list.empty()) list.push_back({1, 0});
            list.front().amount += extra;
            break;
        case Liar::OnLast:
            if (list.empty()) list.push_back({n, 0});
            list.back().amount += extra;
            break;
        case Liar::OnZeroPayment: {
            PayIndex free = 0;
            for (PayIndex i = 1; i <= n && !free; ++i)
                if (std::none_of(list.begin(), list.end(), [&](const ClaimEntry& e) { return e.payIndex == i; }))
                    free = i;
            if (!free) return true;  // no such payment in this log; nothing to play
            list.push_back({free, extra});
            std::sort(list.begin(), list.end(), [](auto& a, auto& b) { return a.payIndex < b.payIndex; });
            break;
        }
        case Liar::Silent:
            break;
    }
    ++tally.games;
    ++tally.overstated;

    CollectRequest req{base.delegateId, 1, base.recipientId, n, entitled + extra, 0, std::nullopt};
    l.collect(base.delegate.address(), req, base.recipient.sign(collectAuthorizationMessage(l.instanceAddress(), req)));
    bool triedProofs = false, monitorWon = false;
    for (int step = 0; step < 64; ++step) {
        oracle.sync(l.chainLog());
        const auto* slot = l.slot(base.delegateId, 1);
        if (!slot) break;
        if (auto mv = sim::nextMonitorMove(oracle, *slot, base.monitorId, l.currentBlock())) {
            switch (mv->step) {
                case sim::MonitorStep::Challenge:
                    l.challenge(base.monitor.address(), base.delegateId, 1, base.monitorId);
                    break;
                case sim::MonitorStep::SelectPayment:
                    l.selectPayment(base.monitor.address(), base.delegateId, 1, *mv->entry);
                    break;
                case sim::MonitorStep::ClaimSuccess:
                    l.challengeSuccess(base.delegateId, 1);
                    monitorWon = true;
                    break;
            }
            continue;
        }
        const bool expired = l.currentBlock() >= slot->deadlineBlock;
        if (slot->state == GameState::ChallengeStarted && !expired && liar != Liar::Silent) {
            l.respondWithPaymentList(base.delegate.address(), base.delegateId, 1, list);
            continue;
        }
        if (slot->state == GameState::WaitingProof && !expired && !triedProofs) {
            // Strongest delegate: try every payData in the log plus one forged list.
            triedProofs = true;
            std::vector<Bytes> attempts = base.payData;
            attempts.push_back(encodePayData(std::vector<AccountId>(4, base.recipientId)));
            for (const auto& wire : attempts) {
                try {
                    l.provePaymentInclusion(base.delegate.address(), base.delegateId, 1, wire);
                    ++tally.acceptedForgedProofs;
                    tally.fail("forged proof accepted for " + std::to_string(slot->challengedEntry->payIndex));
                    break;
                } catch (const ProtocolError&) {
                }
            }
            continue;
        }
        if (slot->state == GameState::ProofAccepted ||
            (slot->state == GameState::WaitingPaymentSelection && expired)) {
            l.challengeFailed(base.delegateId, 1);
            continue;
        }
        if (slot->state == GameState::WaitingChallenge && expired) {
            l.freeSlot(base.delegateId, 1);
            continue;
        }
        l.advanceBlock(1);
    }
    if (l.slot(base.delegateId, 1)) tally.fail("game did not terminate");
    if (auto v = l.findInvariantViolation()) tally.fail("invariant: " + *v);
    if (monitorWon) ++tally.monitorWins;
    return monitorWon;
}

// Correct collect. selection < 0: the canonical monitor decides; otherwise a
// forced challenger picks entry `selection` (or lets selection time out when
// it equals the list size). Returns true when the delegate is paid in full.
bool playCorrect(const GameBase& base, int selection, GameTally& tally) {
    Ledger l = base.ledger;
    sim::BalanceOracle oracle = base.oracle;
    const PayIndex n = l.paymentCount();
    const Amount entitled = oracle.entitlement(base.recipientId, 0, n);
    const auto list = oracle.breakdown(base.recipientId, 0, n);
    if (entitled != paymentEntitlement(l.chainLog(), base.recipientId, 0, n)) {
        tally.fail("oracle and ledger entitlement disagree");
        return false;
    }
    ++tally.games;
    ++tally.correct;
    const Amount fee = std::min<Amount>(1, entitled);
    CollectRequest req{base.delegateId, 1, base.recipientId, n, entitled, fee, std::nullopt};
    l.collect(base.delegate.address(), req, base.recipient.sign(collectAuthorizationMessage(l.instanceAddress(), req)));
    const Amount r0 = l.account(base.recipientId).balance;
    oracle.sync(l.chainLog());
    if (selection < 0) {
        if (sim::monitorStrategyCanonical(oracle, *l.slot(base.delegateId, 1))) {
            ++tally.falseWins;
            tally.fail("canonical monitor challenged a correct collect");
            return false;
        }
    } else {
        ++tally.forcedChallenges;
        l.challenge(base.monitor.address(), base.delegateId, 1, base.monitorId);
        l.respondWithPaymentList(base.delegate.address(), base.delegateId, 1, list);
        if (static_cast<std::size_t>(selection) < list.size()) {
            const auto entry = list[selection];
            l.selectPayment(base.monitor.address(), base.delegateId, 1, entry);
            try {
                l.provePaymentInclusion(base.delegate.address(), base.delegateId, 1, base.payData[entry.payIndex - 1]);
            } catch (const ProtocolError& e) {
                ++tally.falseWins;
                tally.fail(std::string("honest proof rejected: ") + e.what());
                return false;
            }
        } else {
            l.advanceBlock(l.params().responsePeriod);
        }
        l.challengeFailed(base.delegateId, 1);
    }
    l.advanceBlock(l.slot(base.delegateId, 1)->deadlineBlock - l.currentBlock());
    l.freeSlot(base.delegateId, 1);
    if (l.account(base.recipientId).balance != r0 + entitled - fee) {
        tally.fail("honest settlement paid the wrong amount");
        return false;
    }
    if (auto v = l.findInvariantViolation()) tally.fail("invariant: " + *v);
    ++tally.honestSettled;
    return true;
}

void playLog(const std::vector<PayClass>& classes, GameTally& tally) {
    GameBase base(classes);
    ++tally.logs;
    const auto list = base.oracle.breakdown(base.recipientId, 0, classes.size());
    const std::string before = tally.firstFailure;
    for (int sel = -1; sel <= static_cast<int>(list.size()); ++sel) playCorrect(base, sel, tally);
    for (Amount extra = 1; extra <= 3; ++extra)
        for (Liar liar : kLiars)
            if (!playOverstated(base, extra, liar, tally))
                tally.fail("delegate escaped with +" + std::to_string(extra) + " on " + describe(classes));
    if (before.empty() && !tally.firstFailure.empty()) tally.firstFailure += " on " + describe(classes);
}

Outcome gameSoundness() {
    GameTally tally;
    // Every (perDest, occurrences, status) combination, in every order, for n <= 2.
    std::vector<PayClass> full;
    for (Amount p = 1; p <= 3; ++p)
        for (std::uint32_t k = 0; k <= 4; ++k)
            for (auto st : {PaymentStatus::Committed, PaymentStatus::Refunded, PaymentStatus::Locked})
                full.push_back({p, k, st});
    for (const auto& a : full) {
        playLog({a}, tally);
        for (const auto& b : full) playLog({a, b}, tally);
    }
    // Owed-value classes: one representative per value the recipient can be
    // owed (perDest * occurrences), plus a non-committed payment naming them.
    const std::vector<PayClass> reduced{
        {1, 0, PaymentStatus::Committed}, {1, 1, PaymentStatus::Committed}, {2, 1, PaymentStatus::Committed},
        {3, 1, PaymentStatus::Committed}, {2, 2, PaymentStatus::Committed}, {3, 2, PaymentStatus::Committed},
        {2, 4, PaymentStatus::Committed}, {3, 3, PaymentStatus::Committed}, {3, 4, PaymentStatus::Committed},
        {2, 2, PaymentStatus::Refunded},
    };
    const std::size_t k = reduced.size();
    // Every ordered log of length 3 ...
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t c = 0; c < k; ++c) playLog({reduced[a], reduced[b], reduced[c]}, tally);
    // ... and every multiset of length 4..8 (non-decreasing class sequences).
    for (std::size_t len = 4; len <= 8; ++len) {
        std::vector<std::size_t> idx(len, 0);
        while (true) {
            std::vector<PayClass> classes;
            for (auto i : idx) classes.push_back(reduced[i]);
            playLog(classes, tally);
            std::size_t pos = len;
            while (pos > 0 && idx[pos - 1] == k - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < len; ++j) idx[j] = idx[pos - 1];
        }
    }
    std::ostringstream d;
    d << tally.logs << " logs, " << tally.games << " games: overstated=" << tally.overstated
      << " monitor_wins=" << tally.monitorWins << " forged_proofs_accepted=" << tally.acceptedForgedProofs
      << "; correct=" << tally.correct << " (forced challenges " << tally.forcedChallenges
      << ") settled_for_delegate=" << tally.honestSettled << " false_wins=" << tally.falseWins;
    if (!tally.firstFailure.empty()) d << "; first failure: " << tally.firstFailure;
    bool ok = tally.firstFailure.empty() && tally.monitorWins == tally.overstated && tally.falseWins == 0 &&
              tally.honestSettled == tally.correct;
    return {ok, str(d)};
}

// ---------------------------------------------------------------- 6

class Fuzzer {
public:
    explicit Fuzzer(std::uint64_t seed) : rng_(seed), ledger_(paramsFor(seed), TokenAdapter(token())) {
        for (int i = 0; i < 8; ++i) {
            people_.push_back(Identity::fromLabel("fuzz/" + std::to_string(i)));
            ledger_.enroll(people_.back());
        }
    }

    // Returns the violated invariant, if any.
    std::optional<std::string> step() {
        const auto before = ledger_.canonicalBytes();
        const auto logSize = ledger_.chainLog().size();
        bool accepted = true;
        std::string op;
        try {
            op = randomOp();
        } catch (const ProtocolError&) {
            accepted = false;
        }
        if (!accepted && (ledger_.canonicalBytes() != before || ledger_.chainLog().size() != logSize))
            return "rejected operation changed state";
        if (accepted) {
            ++accepted_;
            ++byOp_[op];
        }
        if (auto v = ledger_.findInvariantViolation()) return *v;
        return std::nullopt;
    }

    std::uint64_t accepted() const { return accepted_; }
    const std::map<std::string, std::uint64_t>& acceptedByOp() const { return byOp_; }
    const Ledger& ledger() const { return ledger_; }

private:
    static Address token() { return Identity::fromLabel("fuzz/token").address(); }
    static Params paramsFor(std::uint64_t seed) {
        Params p;
        p.unlockPeriod = 1 + seed % 4;
        p.challengePeriod = 2 + seed % 3;
        p.responsePeriod = 1 + seed % 2;
        p.collectStake = 5 + seed % 7;
        p.challengeStake = 3 + seed % 5;
        p.maxAccountCount = 64;
        p.maxPaymentsPerBatch = 12;
        return p;
    }

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : rng_() % n; }
    bool coin(int percent) { return below(100) < static_cast<std::uint64_t>(percent); }
    const Identity& person() { return people_[below(people_.size())]; }
    AccountId anyId() { return static_cast<AccountId>(below(ledger_.accountCount() + 2)); }
    // Address that owns `id`, or a random one.
    Address senderFor(AccountId id) {
        if (coin(90) && id < ledger_.accountCount() && ledger_.account(id).address) return *ledger_.account(id).address;
        return person().address();
    }
    const Identity* identityOf(AccountId id) {
        if (id >= ledger_.accountCount() || !ledger_.account(id).address) return nullptr;
        for (const auto& p : people_)
            if (p.address() == *ledger_.account(id).address) return &p;
        return nullptr;
    }
    std::pair<AccountId, SlotId> anySlot() {
        if (!ledger_.slots().empty() && coin(90)) {
            auto it = ledger_.slots().begin();
            std::advance(it, below(ledger_.slots().size()));
            return {it->first.delegateId, it->first.slotId};
        }
        return {anyId(), static_cast<SlotId>(below(4))};
    }
    Amount owed(PayIndex i, AccountId id) const {
        if (i == 0 || i > payees_.size() || ledger_.payment(i).status != PaymentStatus::Committed) return 0;
        return ledger_.payment(i).perDestinationAmount * countOccurrences(payees_[i - 1], id);
    }

    // Half the time an open game gets the move its state calls for, so deep
    // game states are reached often; otherwise any operation is drawn.
    std::uint64_t pickOp() {
        if (ledger_.slots().empty() || coin(50)) return below(16);
        auto it = ledger_.slots().begin();
        std::advance(it, below(ledger_.slots().size()));
        switch (it->second.state) {
            case GameState::WaitingChallenge: return coin(70) ? 9 : 13;
            case GameState::ChallengeStarted: return coin(80) ? 10 : 13;
            case GameState::WaitingPaymentSelection: return coin(80) ? 11 : 13;
            case GameState::WaitingProof: return coin(80) ? 12 : 13;
            default: return 13;
        }
    }

    AccountId richest() const {
        AccountId best = 0;
        for (const auto& a : ledger_.accounts())
            if (a.address && a.balance > ledger_.account(best).balance) best = a.id;
        return best;
    }

    std::string randomOp() {
        switch (pickOp()) {
            case 0: {
                const auto& who = person();
                Amount amount = 1 + below(500);
                if (coin(40)) {
                    ledger_.mintExternal(who.address(), amount);
                    return "mint";
                }
                AccountId target = coin(40) ? kNewAccount : anyId();
                ledger_.deposit(target, amount, who.address());
                return "deposit";
            }
            case 1: {
                AccountId id = anyId();
                ledger_.withdraw(senderFor(id), id, 1 + below(300), person().address());
                return "withdraw";
            }
            case 2:
                ledger_.registerAccount(person().address());
                return "register";
            case 3: {
                std::vector<Address> leaves;
                for (std::size_t i = 0, n = 1 + below(4); i < n; ++i) leaves.push_back(person().address());
                auto bulk = ledger_.bulkRegister(static_cast<std::uint32_t>(leaves.size()), merkleRoot(leaves));
                bulks_.push_back({bulk, leaves});
                return "bulk-register";
            }
            case 4: {
                if (bulks_.empty()) fail(Errc::UnknownBulk, "none");
                const auto& [bulk, leaves] = bulks_[below(bulks_.size())];
                std::size_t i = below(leaves.size());
                AccountId first = ledger_.bulkRegistration(bulk).firstReservedId;
                ledger_.claimBulkRegistrationId(bulk, first + static_cast<AccountId>(coin(90) ? i : below(leaves.size())),
                                                leaves[i], merkleProve(leaves, i));
                return "claim";
            }
            case 5: {
                AccountId from = anyId();
                std::vector<AccountId> payees(below(8));
                for (auto& p : payees) p = anyId();
                std::sort(payees.begin(), payees.end());
                if (coin(5)) std::reverse(payees.begin(), payees.end());
                std::optional<Digest> lock;
                Amount fee = 0;
                AccountId unlocker = anyId();
                Bytes key{static_cast<std::uint8_t>(below(256))};
                if (coin(30)) {
                    lock = lockingKeyHash(unlocker, key);
                    fee = below(4);
                }
                ledger_.registerPayment(senderFor(from), from, below(6), payees, lock, fee);
                payees_.push_back(payees);
                keys_.push_back({unlocker, key});
                return "pay";
            }
            case 6: {
                PayIndex i = 1 + below(payees_.size() + 1);
                if (i > keys_.size()) fail(Errc::UnknownPayment, "none");
                auto [unlocker, key] = keys_[i - 1];
                if (coin(10)) key.push_back(1);
                ledger_.unlock(senderFor(unlocker), i, unlocker, key);
                return "unlock";
            }
            case 7:
                ledger_.refundLockedPayment(1 + below(payees_.size() + 1));
                return "refund";
            case 8: {
                AccountId delegate = anyId(), recipient = anyId();
                const Identity* signer = identityOf(recipient);
                if (!signer || coin(5)) signer = &person();
                PayIndex start = recipient < ledger_.accountCount() ? ledger_.account(recipient).lastCollectedPayIndex : 0;
                PayIndex last = start + 1 + below(3);
                Amount entitled = paymentEntitlement(ledger_.chainLog(), recipient, start, last);
                Amount amount = coin(60) ? entitled : entitled + below(4);
                if (coin(10) && amount > 0) --amount;
                Amount fee = below(std::min<Amount>(amount, 3) + 1);
                static constexpr SlotId kSlots[] = {1, 2, 3, 32768, 32769, 40000};
                CollectRequest req{delegate, kSlots[below(6)], recipient, last, amount, fee, std::nullopt};
                if (coin(10)) req.destination = person().address();
                ledger_.collect(senderFor(delegate), req, signer->sign(collectAuthorizationMessage(ledger_.instanceAddress(), req)));
                return "collect";
            }
            case 9: {
                auto [d, s] = anySlot();
                AccountId challenger = coin(70) && ledger_.accountCount() ? richest() : anyId();
                ledger_.challenge(senderFor(challenger), d, s, challenger);
                return "challenge";
            }
            case 10: {
                auto [d, s] = anySlot();
                const auto* slot = ledger_.slot(d, s);
                std::vector<ClaimEntry> list;
                if (slot) {
                    for (PayIndex i = slot->startPayIndex + 1; i <= slot->endPayIndex; ++i)
                        if (Amount o = owed(i, slot->recipientId)) list.push_back({i, o});
                    Amount sum = 0;
                    for (const auto& e : list) sum += e.amount;
                    if (sum > 0 && slot->amount > sum) list = sim::inflateProRata(list, slot->amount - sum);
                    if (list.empty()) list.push_back({slot->endPayIndex, slot->amount});
                    if (coin(10)) list.back().amount += 1;
                }
                ledger_.respondWithPaymentList(senderFor(d), d, s, list);
                return "respond";
            }
            case 11: {
                auto [d, s] = anySlot();
                const auto* slot = ledger_.slot(d, s);
                ClaimEntry e{1, 1};
                if (slot && slot->challengeList && !slot->challengeList->empty())
                    e = (*slot->challengeList)[below(slot->challengeList->size())];
                AccountId challenger = slot && slot->challengerId ? *slot->challengerId : anyId();
                ledger_.selectPayment(senderFor(challenger), d, s, e);
                return "select";
            }
            case 12: {
                auto [d, s] = anySlot();
                const auto* slot = ledger_.slot(d, s);
                Bytes wire{0, 0, 0, 0};
                if (slot && slot->challengedEntry && slot->challengedEntry->payIndex <= payees_.size()) {
                    PayIndex i = coin(85) ? slot->challengedEntry->payIndex : 1 + below(payees_.size());
                    wire = encodePayData(payees_[i - 1]);
                }
                ledger_.provePaymentInclusion(senderFor(d), d, s, wire);
                return "prove";
            }
            case 13: {
                auto [d, s] = anySlot();
                switch (below(3)) {
                    case 0: ledger_.freeSlot(d, s); return "free-slot";
                    case 1: ledger_.challengeSuccess(d, s); return "challenge-success";
                    default: ledger_.challengeFailed(d, s); return "challenge-failed";
                }
            }
            default:
                ledger_.advanceBlock(1 + below(3));
                return "advance";
        }
    }

    std::mt19937_64 rng_;
    Ledger ledger_;
    std::vector<Identity> people_;
    std::vector<std::pair<std::uint64_t, std::vector<Address>>> bulks_;
    std::vector<std::vector<AccountId>> payees_;
    std::vector<std::pair<AccountId, Bytes>> keys_;
    std::uint64_t accepted_ = 0;
    std::map<std::string, std::uint64_t> byOp_;
};

Outcome conservationFuzz() {
    std::uint64_t ops = 0, accepted = 0, settled = 0;
    std::map<std::string, std::uint64_t> byOp;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Fuzzer f(seed);
        for (int i = 0; i < 2000; ++i) {
            ++ops;
            if (auto v = f.step())
                return {false, "seed " + std::to_string(seed) + " op " + std::to_string(i) + ": invariant violated: " + *v};
        }
        accepted += f.accepted();
        for (const auto& [op, n] : f.acceptedByOp()) byOp[op] += n;
        for (const auto& r : f.ledger().chainLog().records())
            if (std::holds_alternative<record::FreeSlot>(r) || std::holds_alternative<record::ChallengeSuccess>(r))
                ++settled;
    }
    std::ostringstream d;
    d << ops << " operations over 50 seeds (" << accepted << " accepted, " << settled
      << " settled games), no invariant violated; accepted by op:";
    for (const auto& [op, n] : byOp) d << " " << op << "=" << n;
    return {byOp.size() == 18, str(d)};  // 16 protocol operations, faucet mints and block advances
}

// ---------------------------------------------------------------- 7

Outcome honestOracle() {
    std::mt19937_64 rng(0x0AC1E);
    auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };
    std::uint64_t accounts = 0, games = 0;
    for (int t = 0; t < 1000; ++t) {
        sim::ScenarioConfig c;
        c.seed = rng();
        c.blocks = pick(15, 45);
        c.buyers = static_cast<std::uint32_t>(pick(1, 4));
        c.sellers = static_cast<std::uint32_t>(pick(1, 12));
        c.delegates = static_cast<std::uint32_t>(pick(1, 3));
        c.monitors = static_cast<std::uint32_t>(pick(1, 2));
        c.unlockers = 1;
        c.paymentProbability = static_cast<sim::Ppm>(pick(100'000, 700'000));
        c.payeesPerBatch = {1, pick(1, 10)};
        c.perDestination = {1, pick(1, 5)};
        c.lockedPaymentFraction = static_cast<sim::Ppm>(pick(0, 400'000));
        c.withholdingUnlockerFraction = static_cast<sim::Ppm>(pick(0, 1) * 500'000);
        c.bulkRegisteredFraction = static_cast<sim::Ppm>(pick(0, 1'000'000));
        c.accumulationThreshold = static_cast<std::uint32_t>(pick(1, 4));
        c.instantFraction = static_cast<sim::Ppm>(pick(0, 600'000));
        c.sellerWithdrawProbability = static_cast<sim::Ppm>(pick(0, 200'000));
        c.params.unlockPeriod = pick(1, 5);
        c.params.challengePeriod = pick(1, 6);
        c.params.responsePeriod = pick(1, 3);
        auto run = sim::runScenarioWithLog(c);
        const auto& r = run.report;
        if (!r.oracleDiffs.empty())
            return {false, "scenario " + std::to_string(t) + " seed " + std::to_string(c.seed) + ": " +
                               std::to_string(r.oracleDiffs.size()) + " oracle diffs"};
        if (r.games.challenged != 0) return {false, "scenario " + std::to_string(t) + ": honest world saw a challenge"};
        for (const auto& b : r.balances) {
            auto v = sim::oracleBalance(run.log, b.id, r.finalBlock);
            if (v.settled != b.balance || v.lastCollected != b.lastCollected)
                return {false, "scenario " + std::to_string(t) + " account " + std::to_string(b.id) +
                                   ": ledger " + std::to_string(b.balance) + " oracle " + std::to_string(v.settled)};
            ++accounts;
        }
        games += r.games.opened;
    }
    return {true, "1000 scenarios, " + std::to_string(accounts) + " account balances equal, " + std::to_string(games) +
                      " games, 0 challenges"};
}

// ---------------------------------------------------------------- 8

Outcome lockedLifecycle() {
    std::mt19937_64 rng(0x10C4);
    std::uint64_t unlocked = 0, refunded = 0, proofsRejected = 0;
    for (int t = 0; t < 2000; ++t) {
        Params p;
        p.unlockPeriod = 1 + rng() % 5;
        p.challengePeriod = 3;
        p.responsePeriod = 2;
        p.collectStake = 10;
        p.challengeStake = 5;
        Ledger l(p, TokenAdapter(Identity::fromLabel("life/token").address()));
        auto person = [&](const std::string& label, Amount funds) {
            auto id = Identity::fromLabel("life/" + label);
            l.enroll(id);
            if (funds == 0) return std::pair{id, l.registerAccount(id.address())};
            l.mintExternal(id.address(), funds);
            return std::pair{id, l.deposit(kNewAccount, funds, id.address())};
        };
        auto [buyer, buyerId] = person("buyer", 10'000);
        auto [unlocker, unlockerId] = person("unlocker", 0);
        auto [delegate, delegateId] = person("delegate", 1'000);
        auto [monitor, monitorId] = person("monitor", 1'000);
        std::vector<std::pair<Identity, AccountId>> sellers;
        for (int i = 0; i < 3; ++i) sellers.push_back(person("seller" + std::to_string(i), 0));

        std::vector<AccountId> payees(1 + rng() % 6);
        for (auto& x : payees) x = sellers[rng() % sellers.size()].second;
        std::sort(payees.begin(), payees.end());
        const Amount perDest = 1 + rng() % 9, fee = rng() % 4;
        Bytes key(1 + rng() % 16);
        for (auto& b : key) b = static_cast<std::uint8_t>(rng());
        l.advanceBlock(1 + rng() % 3);
        const Amount buyerBefore = l.account(buyerId).balance;
        const PayIndex idx = l.registerPayment(buyer.address(), buyerId, perDest, payees, lockingKeyHash(unlockerId, key), fee);
        const auto& pay = l.payment(idx);
        const auto collectableFrom = pay.collectableFromBlock;
        auto entitlementsZero = [&] {
            sim::BalanceOracle o;
            o.sync(l.chainLog());
            for (const auto& s : sellers)
                if (paymentEntitlement(l.chainLog(), s.second, 0, idx) != 0 || o.entitlement(s.second, 0, idx) != 0)
                    return false;
            return true;
        };
        if (!entitlementsZero()) return {false, "locked payment counted in an entitlement"};

        if (rng() % 2 == 0) {
            // Anywhere from the registration block up to and including the boundary.
            if (BlockNumber wait = rng() % (p.unlockPeriod + 1)) l.advanceBlock(wait);
            if (l.currentBlock() >= collectableFrom) {
                try {
                    l.unlock(unlocker.address(), idx, unlockerId, key);
                    return {false, "unlock accepted at the window boundary"};
                } catch (const ProtocolError& e) {
                    if (e.code() != Errc::WindowExpired) return {false, "wrong error at boundary"};
                }
                continue;
            }
            auto wrong = key;
            wrong[0] ^= 1;
            try {
                l.unlock(unlocker.address(), idx, unlockerId, wrong);
                return {false, "wrong key accepted"};
            } catch (const ProtocolError&) {
            }
            if (l.latestCollectablePayIndex() >= idx) return {false, "payment collectable inside its window"};
            l.unlock(unlocker.address(), idx, unlockerId, key);
            if (l.account(unlockerId).balance != fee) return {false, "unlocker fee not credited"};
            if (l.account(buyerId).balance != buyerBefore - perDest * payees.size() - fee)
                return {false, "buyer debit wrong"};
            l.advanceBlock(collectableFrom - l.currentBlock());
            if (l.latestCollectablePayIndex() < idx) return {false, "unlocked payment not collectable"};
            sim::BalanceOracle o;
            o.sync(l.chainLog());
            for (const auto& s : sellers) {
                Amount expect = perDest * countOccurrences(payees, s.second);
                if (paymentEntitlement(l.chainLog(), s.second, 0, idx) != expect || o.entitlement(s.second, 0, idx) != expect)
                    return {false, "unlocked entitlement wrong"};
            }
            ++unlocked;
        } else {
            try {
                l.refundLockedPayment(idx);
                return {false, "refund inside the window"};
            } catch (const ProtocolError& e) {
                if (e.code() != Errc::WindowOpen) return {false, "wrong error for early refund"};
            }
            l.advanceBlock(collectableFrom - l.currentBlock() + rng() % 3);
            try {
                l.unlock(unlocker.address(), idx, unlockerId, key);
                return {false, "late unlock accepted"};
            } catch (const ProtocolError&) {
            }
            const bool refund = rng() % 4 != 0;  // otherwise it stays locked past the window
            if (refund) {
                l.refundLockedPayment(idx);
                if (l.account(buyerId).balance != buyerBefore) return {false, "refund did not make the buyer whole"};
                if (l.escrowOutstanding() != 0) return {false, "escrow left after refund"};
                ++refunded;
            }
            if (!entitlementsZero()) return {false, "refunded or expired payment counted in an entitlement"};
            // A delegate claiming it still cannot prove it.
            const auto& [seller, sellerId] = sellers[0];
            Amount claim = perDest * std::max<std::size_t>(1, countOccurrences(payees, sellerId));
            CollectRequest req{delegateId, 1, sellerId, idx, claim, 0, std::nullopt};
            l.collect(delegate.address(), req, seller.sign(collectAuthorizationMessage(l.instanceAddress(), req)));
            l.challenge(monitor.address(), delegateId, 1, monitorId);
            l.respondWithPaymentList(delegate.address(), delegateId, 1, std::vector<ClaimEntry>{{idx, claim}});
            l.selectPayment(monitor.address(), delegateId, 1, {idx, claim});
            try {
                l.provePaymentInclusion(delegate.address(), delegateId, 1, encodePayData(payees));
                return {false, "proof over a non-committed payment accepted"};
            } catch (const ProtocolError& e) {
                if (e.code() != Errc::NotCommitted) return {false, std::string("unexpected proof error ") + e.what()};
                ++proofsRejected;
            }
        }
        if (auto v = l.findInvariantViolation()) return {false, "invariant: " + *v};
    }
    return {true, std::to_string(unlocked) + " unlocked in window, " + std::to_string(refunded) +
                      " refunded exactly, " + std::to_string(proofsRejected) + " proofs over non-committed payments rejected"};
}

// ---------------------------------------------------------------- 9

Outcome determinism() {
    auto cfg = sim::loadScenarioConfig(BATPAY_REFERENCE_CONFIG);
    std::set<std::string> digests;
    std::string digest;
    for (int i = 0; i < 5; ++i) {
        digest = sim::reportDigest(sim::runScenario(cfg));
        digests.insert(digest);
    }
    if (digests.size() != 1) return {false, std::to_string(digests.size()) + " distinct digests over 5 runs"};
    std::ifstream in(BATPAY_GOLDEN_DIGEST);
    std::string golden;
    in >> golden;
    if (golden.empty()) return {false, "golden file missing; current digest " + digest};
    if (golden != digest) return {false, "digest " + digest + " differs from golden " + golden};
    return {true, "5 runs, report digest " + digest + " matches golden"};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    const std::vector<Criterion> criteria{
        {1, "cost reproduction", 1, costReproduction},
        {2, "abstract per-payment range", 1, abstractRange},
        {3, "codec properties", 10, codecProperties},
        {4, "merkle suite", 10, merkleSuite},
        {5, "game soundness and completeness", 300, gameSoundness},
        {6, "conservation fuzz", 120, conservationFuzz},
        {7, "honest-world oracle equivalence", 120, honestOracle},
        {8, "locked-payment lifecycle", 10, lockedLifecycle},
        {9, "determinism", 10, determinism},
    };

    int failed = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.budgetSeconds) {
            o.pass = false;
            o.detail += "; over the time budget";
        }
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.2fs of %gs", secs, c.budgetSeconds);
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing << "): " << o.detail
                  << std::endl;
        if (!o.pass) ++failed;
    }
    std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
