#include "batpay/sim/scenario.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <set>

#include "batpay/cost_model.hpp"
#include "batpay/error.hpp"
#include "batpay/identity.hpp"
#include "batpay/ledger.hpp"
#include "batpay/merkle.hpp"
#include "batpay/paydata.hpp"
#include "batpay/sim/monitor.hpp"
#include "batpay/sim/oracle.hpp"

namespace batpay::sim {

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
}

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::between: empty range");
    if (lo == 0 && hi == std::numeric_limits<std::uint64_t>::max()) return engine_();
    return lo + below(hi - lo + 1);
}

Bytes Rng::bytes(std::size_t n) {
    Bytes out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(engine_() >> 56);
    return out;
}

std::vector<ClaimEntry> inflateProRata(std::vector<ClaimEntry> entries, Amount extra) {
    Amount total = 0;
    for (const auto& e : entries) total = checkedAdd(total, e.amount);
    if (total == 0) fail(Errc::InvalidArgument, "cannot spread an overstatement over an empty list");
    struct Share {
        std::size_t index;
        unsigned __int128 remainder;
    };
    std::vector<Share> shares;
    Amount given = 0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        auto num = static_cast<unsigned __int128>(extra) * entries[i].amount;
        auto part = static_cast<Amount>(num / total);
        entries[i].amount = checkedAdd(entries[i].amount, part);
        given += part;
        shares.push_back({i, num % total});
    }
    std::stable_sort(shares.begin(), shares.end(), [](const Share& a, const Share& b) { return a.remainder > b.remainder; });
    for (std::size_t k = 0; given < extra; ++k, ++given) entries[shares[k].index].amount += 1;
    return entries;
}

std::string_view roleName(Role r) {
    switch (r) {
        case Role::Buyer: return "buyer";
        case Role::Seller: return "seller";
        case Role::Delegate: return "delegate";
        case Role::Monitor: return "monitor";
        case Role::Unlocker: return "unlocker";
    }
    return "unknown";
}

namespace {

struct Actor {
    Role role;
    std::uint32_t index;
    Identity identity;
    AccountId id = 0;
    // Role traits.
    bool byzantine = false;  // cheating delegate, lazy monitor, withholding unlocker
    bool bulk = false;       // seller reserved through a bulk registration
    bool claimed = true;
};

struct PendingKey {
    PayIndex payIndex;
    Bytes key;
};

struct GameTrack {
    bool overstated = false;
    bool instant = false;
    bool challenged = false;
    Amount advanced = 0;
};

class Simulation {
public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg), rng_(cfg.seed),
          ledger_(cfg.params, TokenAdapter(Identity::fromLabel("batpay/token").address())) {}

    ScenarioRun run();

private:
    template <class F>
    bool attempt(F&& op) {
        try {
            op();
            return true;
        } catch (const ProtocolError& e) {
            ++report_.rejections[std::string(errcName(e.code()))];
            return false;
        }
    }

    std::vector<Actor*> actorsOf(Role r) {
        std::vector<Actor*> out;
        for (auto& a : actors_)
            if (a.role == r) out.push_back(&a);
        return out;
    }

    void setup();
    void buyersTurn(bool draining);
    void unlockersTurn();
    void delegatesTurn();
    void monitorsTurn();
    void sellersTurn(bool draining);
    void endBlock();

    void openCollect(Actor& delegate, Actor& seller);
    void playDelegateSlot(Actor& delegate, const CollectSlot& slot);
    SlotId freeSlotId(AccountId delegateId, bool instant) const;
    bool workPending() const;
    void finish();

    const ScenarioConfig& cfg_;
    Rng rng_;
    Ledger ledger_;
    BalanceOracle oracle_;
    std::deque<Actor> actors_;
    ScenarioReport report_;

    std::vector<Address> bulkLeaves_;
    std::uint64_t bulkId_ = 0;
    std::map<AccountId, std::vector<PendingKey>> keysForUnlocker_;
    std::map<AccountId, std::vector<PayIndex>> lockedByBuyer_;
    std::map<AccountId, std::deque<AccountId>> requestsForDelegate_;  // delegate -> seller ids
    std::set<AccountId> sellersWaiting_;
    std::map<std::tuple<AccountId, SlotId, AccountId, PayIndex>, bool> lazySample_;
    std::map<SlotKey, GameTrack> tracks_;
    std::map<AccountId, Actor*> byId_;
};

void Simulation::setup() {
    auto add = [&](Role role, std::uint32_t count, Ppm trait) {
        auto flagged = actorsWithTrait(count, trait);
        for (std::uint32_t i = 0; i < count; ++i) {
            auto label = std::string(roleName(role)) + "/" + std::to_string(i);
            Actor a{role, i, Identity::fromLabel(label)};
            a.byzantine = role != Role::Seller && i < flagged;
            a.bulk = role == Role::Seller && i < flagged;
            a.claimed = !a.bulk;
            actors_.push_back(std::move(a));
            ledger_.enroll(actors_.back().identity);
        }
    };
    add(Role::Buyer, cfg_.buyers, 0);
    add(Role::Delegate, cfg_.delegates, cfg_.cheatingDelegateFraction);
    add(Role::Monitor, cfg_.monitors, cfg_.lazyMonitorFraction);
    add(Role::Unlocker, cfg_.unlockers, cfg_.withholdingUnlockerFraction);
    add(Role::Seller, cfg_.sellers, cfg_.bulkRegisteredFraction);

    for (auto& a : actors_) {
        Amount funds = a.role == Role::Buyer      ? cfg_.buyerFunds
                       : a.role == Role::Delegate ? cfg_.delegateFunds
                       : a.role == Role::Monitor  ? cfg_.monitorFunds
                                                  : 0;
        if (funds > 0) {
            ledger_.mintExternal(a.identity.address(), funds);
            a.id = ledger_.deposit(kNewAccount, funds, a.identity.address());
        } else if (!a.bulk) {
            a.id = ledger_.registerAccount(a.identity.address());
        }
    }
    for (auto& a : actors_)
        if (a.bulk) bulkLeaves_.push_back(a.identity.address());
    if (!bulkLeaves_.empty()) {
        bulkId_ = ledger_.bulkRegister(static_cast<std::uint32_t>(bulkLeaves_.size()), merkleRoot(bulkLeaves_));
        AccountId next = ledger_.bulkRegistration(bulkId_).firstReservedId;
        for (auto& a : actors_)
            if (a.bulk) a.id = next++;
    }
    for (auto& a : actors_) byId_[a.id] = &a;
    for (const auto& [role, name] : {std::pair{Role::Buyer, "buyer"}, std::pair{Role::Seller, "seller"},
                                     std::pair{Role::Delegate, "delegate"}, std::pair{Role::Monitor, "monitor"},
                                     std::pair{Role::Unlocker, "unlocker"}})
        report_.actors[name] = static_cast<std::uint32_t>(actorsOf(role).size());
}

void Simulation::buyersTurn(bool draining) {
    auto sellers = actorsOf(Role::Seller);
    auto unlockers = actorsOf(Role::Unlocker);
    for (auto* b : actorsOf(Role::Buyer)) {
        auto& locked = lockedByBuyer_[b->id];
        for (auto it = locked.begin(); it != locked.end();) {
            const auto& p = ledger_.payment(*it);
            if (p.status != PaymentStatus::Locked) {
                it = locked.erase(it);
            } else if (ledger_.currentBlock() >= p.collectableFromBlock) {
                if (attempt([&] { ledger_.refundLockedPayment(*it); })) ++report_.refunds;
                it = locked.erase(it);
            } else {
                ++it;
            }
        }
        if (draining || sellers.empty() || !rng_.chance(cfg_.paymentProbability)) continue;

        auto count = rng_.in(cfg_.payeesPerBatch);
        Amount perDest = rng_.in(cfg_.perDestination);
        std::vector<AccountId> payees;
        payees.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) payees.push_back(sellers[rng_.below(sellers.size())]->id);
        std::sort(payees.begin(), payees.end());

        std::optional<Digest> lockHash;
        Amount fee = 0;
        Actor* unlocker = nullptr;
        Bytes key;
        if (!unlockers.empty() && rng_.chance(cfg_.lockedPaymentFraction)) {
            unlocker = unlockers[rng_.below(unlockers.size())];
            key = rng_.bytes(16);
            lockHash = lockingKeyHash(unlocker->id, key);
            fee = rng_.in(cfg_.unlockerFee);
        }
        Amount escrow = perDest * count + fee;
        if (ledger_.account(b->id).balance < escrow) continue;
        PayIndex idx = 0;
        if (!attempt([&] { idx = ledger_.registerPayment(b->identity.address(), b->id, perDest, payees, lockHash, fee); }))
            continue;
        ++report_.payments;
        if (unlocker) {
            ++report_.lockedPayments;
            locked.push_back(idx);
            keysForUnlocker_[unlocker->id].push_back({idx, std::move(key)});
        }
    }
}

void Simulation::unlockersTurn() {
    for (auto* u : actorsOf(Role::Unlocker)) {
        auto& keys = keysForUnlocker_[u->id];
        if (u->byzantine) {
            keys.clear();
            continue;
        }
        for (const auto& k : keys)
            if (attempt([&] { ledger_.unlock(u->identity.address(), k.payIndex, u->id, k.key); })) ++report_.unlocks;
        keys.clear();
    }
}

SlotId Simulation::freeSlotId(AccountId delegateId, bool instant) const {
    std::uint32_t s = instant ? cfg_.params.instantSlotThreshold + 1u : 0u;
    const std::uint32_t end = instant ? 65536u : cfg_.params.instantSlotThreshold + 1u;
    for (; s < end; ++s)
        if (!ledger_.slot(delegateId, static_cast<SlotId>(s))) return static_cast<SlotId>(s);
    fail(Errc::SlotOccupied, "delegate " + std::to_string(delegateId) + " has no free slot");
}

void Simulation::openCollect(Actor& delegate, Actor& seller) {
    const auto& rcp = ledger_.account(seller.id);
    const PayIndex start = rcp.lastCollectedPayIndex;
    const PayIndex last = oracle_.latestCollectable();
    if (last <= start) return;
    const Amount entitled = oracle_.entitlement(seller.id, start, last);
    if (entitled == 0) return;

    CollectRequest req;
    req.delegateId = delegate.id;
    req.recipientId = seller.id;
    req.lastPaymentIndex = last;
    req.amount = entitled;
    if (delegate.byzantine) req.amount = checkedAdd(req.amount, rng_.in(cfg_.delegateOverstatement));
    req.fee = std::min(cfg_.delegateFee, req.amount);
    const Amount net = req.amount - req.fee;
    const Amount balance = ledger_.account(delegate.id).balance;
    bool instant = rng_.chance(cfg_.instantFraction) && balance >= cfg_.params.collectStake + net;
    if (balance < cfg_.params.collectStake) return;
    req.slotId = freeSlotId(delegate.id, instant);

    auto sig = seller.identity.sign(collectAuthorizationMessage(ledger_.instanceAddress(), req));
    if (!attempt([&] { ledger_.collect(delegate.identity.address(), req, sig); })) return;
    const auto* s = ledger_.slot(delegate.id, req.slotId);
    ++report_.games.opened;
    if (instant) ++report_.games.instant;
    bool overstated = req.amount > entitled;
    if (overstated) ++report_.games.overstated;
    tracks_[SlotKey{delegate.id, req.slotId}] = GameTrack{overstated, instant, false, s->advanced};
}

void Simulation::playDelegateSlot(Actor& d, const CollectSlot& s) {
    const auto block = ledger_.currentBlock();
    const bool open = block < s.deadlineBlock;
    const auto& addr = d.identity.address();
    const bool cheat = d.byzantine;
    switch (s.state) {
        case GameState::WaitingChallenge:
            if (!open && attempt([&] { ledger_.freeSlot(d.id, s.slotId); })) {
                auto t = tracks_[SlotKey{d.id, s.slotId}];
                if (!t.challenged) ++report_.games.settledUnchallenged;
                if (t.overstated) ++report_.games.overstatedSettled;
                tracks_.erase(SlotKey{d.id, s.slotId});
            }
            break;
        case GameState::ChallengeStarted: {
            if (!open || (cheat && cfg_.cheatStyle == CheatStyle::Silent)) break;
            auto list = oracle_.breakdown(s.recipientId, s.startPayIndex, s.endPayIndex);
            Amount total = 0;
            for (const auto& e : list) total += e.amount;
            if (s.amount > total && total > 0) list = inflateProRata(std::move(list), s.amount - total);
            attempt([&] { ledger_.respondWithPaymentList(addr, d.id, s.slotId, list); });
            break;
        }
        case GameState::WaitingPaymentSelection:
            if (!open && attempt([&] { ledger_.challengeFailed(d.id, s.slotId); })) ++report_.games.wonByDelegate;
            break;
        case GameState::WaitingProof: {
            if (!open) break;
            const auto& entry = *s.challengedEntry;
            bool provable = oracle_.owed(entry.payIndex, s.recipientId) == entry.amount;
            if (!provable && !(cheat && cfg_.cheatStyle == CheatStyle::BadProof)) break;
            if (const auto* data = oracle_.payData(entry.payIndex))
                attempt([&] { ledger_.provePaymentInclusion(addr, d.id, s.slotId, *data); });
            break;
        }
        case GameState::ProofAccepted:
            if (attempt([&] { ledger_.challengeFailed(d.id, s.slotId); })) ++report_.games.wonByDelegate;
            break;
        case GameState::Empty:
            break;
    }
}

void Simulation::delegatesTurn() {
    for (auto* d : actorsOf(Role::Delegate)) {
        oracle_.sync(ledger_.chainLog());
        std::vector<SlotKey> mine;
        for (const auto& [k, _] : ledger_.slots())
            if (k.delegateId == d->id) mine.push_back(k);
        for (const auto& k : mine)
            if (const auto* s = ledger_.slot(k.delegateId, k.slotId)) {
                const auto copy = *s;
                playDelegateSlot(*d, copy);
            }
        oracle_.sync(ledger_.chainLog());
        auto& queue = requestsForDelegate_[d->id];
        while (!queue.empty()) {
            auto sellerId = queue.front();
            queue.pop_front();
            sellersWaiting_.erase(sellerId);
            openCollect(*d, *byId_.at(sellerId));
        }
    }
}

void Simulation::monitorsTurn() {
    for (auto* m : actorsOf(Role::Monitor)) {
        oracle_.sync(ledger_.chainLog());
        std::vector<CollectSlot> snapshot;
        for (const auto& [_, s] : ledger_.slots()) snapshot.push_back(s);
        for (const auto& s : snapshot) {
            if (m->byzantine && s.state == GameState::WaitingChallenge) {
                auto key = std::tuple{s.delegateId, s.slotId, s.recipientId, s.endPayIndex};
                auto it = lazySample_.find(key);
                if (it == lazySample_.end()) it = lazySample_.emplace(key, rng_.chance(cfg_.lazySampleRate)).first;
                if (!it->second) continue;
            }
            auto move = nextMonitorMove(oracle_, s, m->id, ledger_.currentBlock());
            if (!move) continue;
            const auto& addr = m->identity.address();
            const SlotKey key{s.delegateId, s.slotId};
            switch (move->step) {
                case MonitorStep::Challenge:
                    if (ledger_.account(m->id).balance < cfg_.params.challengeStake) break;
                    if (attempt([&] { ledger_.challenge(addr, s.delegateId, s.slotId, m->id); })) {
                        auto& t = tracks_[key];
                        if (!t.challenged) ++report_.games.challenged;
                        t.challenged = true;
                    }
                    oracle_.sync(ledger_.chainLog());
                    break;
                case MonitorStep::SelectPayment:
                    attempt([&] { ledger_.selectPayment(addr, s.delegateId, s.slotId, *move->entry); });
                    break;
                case MonitorStep::ClaimSuccess:
                    if (attempt([&] { ledger_.challengeSuccess(s.delegateId, s.slotId); })) {
                        auto t = tracks_[key];
                        ++report_.games.wonByMonitor;
                        if (t.overstated) ++report_.games.overstatedCaught;
                        else ++report_.games.falseWins;
                        if (t.instant) report_.games.instantLoss += t.advanced;
                        tracks_.erase(key);
                    }
                    break;
            }
        }
    }
}

void Simulation::sellersTurn(bool draining) {
    auto delegates = actorsOf(Role::Delegate);
    oracle_.sync(ledger_.chainLog());
    const PayIndex collectable = oracle_.latestCollectable();
    for (auto* s : actorsOf(Role::Seller)) {
        const auto& acc = ledger_.account(s->id);
        if (!draining && !delegates.empty() && !sellersWaiting_.count(s->id)) {
            bool busy = false;
            for (const auto& [_, slot] : ledger_.slots()) busy = busy || slot.recipientId == s->id;
            auto owed = oracle_.breakdown(s->id, acc.lastCollectedPayIndex, collectable);
            if (!busy && owed.size() >= cfg_.accumulationThreshold) {
                if (!s->claimed) {
                    auto offset = s->id - ledger_.bulkRegistration(bulkId_).firstReservedId;
                    auto proof = merkleProve(bulkLeaves_, offset);
                    s->claimed = attempt([&] {
                        ledger_.claimBulkRegistrationId(bulkId_, s->id, s->identity.address(), proof);
                    });
                }
                if (s->claimed) {
                    requestsForDelegate_[delegates[s->index % delegates.size()]->id].push_back(s->id);
                    sellersWaiting_.insert(s->id);
                }
            }
        }
        if (s->claimed && acc.balance > 0 && rng_.chance(cfg_.sellerWithdrawProbability)) {
            const Amount amount = acc.balance;
            if (attempt([&] { ledger_.withdraw(s->identity.address(), s->id, amount, s->identity.address()); }))
                ++report_.withdrawals;
        }
    }
}

void Simulation::endBlock() {
    if (auto violation = ledger_.findInvariantViolation())
        fail(Errc::InvariantViolation, "block " + std::to_string(ledger_.currentBlock()) + ": " + *violation);
    ledger_.advanceBlock(1);
}

bool Simulation::workPending() const {
    if (!ledger_.slots().empty() || !sellersWaiting_.empty()) return true;
    for (const auto& [_, locked] : lockedByBuyer_)
        if (!locked.empty()) return true;
    return false;
}

void Simulation::finish() {
    oracle_.sync(ledger_.chainLog());
    report_.finalBlock = ledger_.currentBlock();
    report_.conservationOk = !ledger_.findInvariantViolation().has_value();
    report_.games.stillOpen = ledger_.slots().size();

    for (const auto& a : actors_) {
        const auto& acc = ledger_.account(a.id);
        report_.balances.push_back({a.id, std::string(roleName(a.role)), a.index, acc.balance, acc.lastCollectedPayIndex});
        if (a.bulk && !acc.address) ++report_.unclaimedBulkIds;
        if (a.role == Role::Monitor)
            report_.monitorNet += static_cast<std::int64_t>(acc.balance) - static_cast<std::int64_t>(cfg_.monitorFunds);
    }
    for (AccountId id = 0; id < ledger_.accountCount(); ++id) {
        const auto& acc = ledger_.account(id);
        auto v = oracle_.view(id);
        if (v.settled != acc.balance) report_.oracleDiffs.push_back({id, "balance", acc.balance, v.settled});
        if (v.lastCollected != acc.lastCollectedPayIndex)
            report_.oracleDiffs.push_back({id, "last_collected", acc.lastCollectedPayIndex, v.lastCollected});
    }
    if (oracle_.accountCount() != ledger_.accountCount())
        report_.oracleDiffs.push_back({kNewAccount, "account_count", ledger_.accountCount(), oracle_.accountCount()});
    if (oracle_.reserve() != ledger_.token().reserve())
        report_.oracleDiffs.push_back({kNewAccount, "reserve", ledger_.token().reserve(), oracle_.reserve()});

    CostReport cost;
    for (const auto& r : ledger_.chainLog().records()) {
        ++report_.eventCounts[std::string(recordTypeName(recordType(r)))];
        auto tx = recordCost(r, cfg_.cost);
        if (!tx) continue;
        std::uint64_t payees = 0;
        if (const auto* p = std::get_if<record::Payment>(&r)) payees = decodePayData(p->payData).size();
        cost.add(*tx, payees);
        auto name = std::string(opKindName(tx->kind));
        report_.cost.gasByOp[name] += tx->gas;
        ++report_.cost.txByOp[name];
    }
    cost.finalize(static_cast<double>(cfg_.gasPriceGwei), static_cast<double>(cfg_.ethUsd));
    report_.cost.calibration = cfg_.cost;
    report_.cost.transactions = cost.transactions.size();
    report_.cost.totalGas = cost.totalGas;
    report_.cost.relevantGas = cost.relevantGas;
    report_.cost.paymentsCount = cost.paymentsCount;
    report_.cost.amortizedPerPayment = cost.amortizedPerPayment;
    report_.cost.usdPerPayment = cost.usdPerPayment;

    bool honestMonitor = false;
    for (const auto& a : actors_) honestMonitor = honestMonitor || (a.role == Role::Monitor && !a.byzantine);
    report_.soundnessOk = !honestMonitor || report_.games.overstatedCaught == report_.games.overstated;
    report_.stateDigest = ledger_.stateDigest().hex();
}

ScenarioRun Simulation::run() {
    report_.seed = cfg_.seed;
    report_.blocks = cfg_.blocks;
    setup();
    for (BlockNumber b = 0; b < cfg_.blocks; ++b) {
        buyersTurn(false);
        unlockersTurn();
        delegatesTurn();
        monitorsTurn();
        sellersTurn(false);
        endBlock();
    }
    BlockNumber extra = 0;
    while (workPending() && extra < cfg_.drainLimit) {
        buyersTurn(true);
        unlockersTurn();
        delegatesTurn();
        monitorsTurn();
        sellersTurn(true);
        endBlock();
        ++extra;
    }
    report_.drained = !workPending();
    finish();
    return {std::move(report_), ledger_.chainLog()};
}

}  // namespace

ScenarioRun runScenarioWithLog(const ScenarioConfig& config) {
    config.validate();
    Simulation sim(config);
    return sim.run();
}

ScenarioReport runScenario(const ScenarioConfig& config) { return runScenarioWithLog(config).report; }

}  // namespace batpay::sim
