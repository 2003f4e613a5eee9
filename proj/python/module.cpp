#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "batpay/cost_model.hpp"
#include "batpay/error.hpp"
#include "batpay/identity.hpp"
#include "batpay/ledger.hpp"
#include "batpay/merkle.hpp"
#include "batpay/paydata.hpp"
#include "batpay/replay.hpp"
#include "batpay/sim/config.hpp"
#include "batpay/sim/report.hpp"
#include "batpay/sim/scenario.hpp"

namespace py = pybind11;
using namespace batpay;

namespace {

Bytes toBytes(const py::bytes& b) {
    std::string s = b;
    return Bytes(s.begin(), s.end());
}

py::bytes fromBytes(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

template <class T>
T fixed(const py::bytes& b) {
    return T::fromView(toBytes(b));
}

std::optional<Address> optAddress(const std::optional<py::bytes>& b) {
    if (!b) return std::nullopt;
    return fixed<Address>(*b);
}

CollectRequest request(AccountId delegateId, SlotId slotId, AccountId recipientId, PayIndex last, Amount amount,
                       Amount fee, const std::optional<py::bytes>& destination) {
    return CollectRequest{delegateId, slotId, recipientId, last, amount, fee, optAddress(destination)};
}

py::dict accountDict(const Account& a) {
    py::dict d;
    d["id"] = a.id;
    d["address"] = a.address ? py::object(fromBytes(a.address->view())) : py::none();
    d["balance"] = a.balance;
    d["last_collected_pay_index"] = a.lastCollectedPayIndex;
    return d;
}

py::object slotDict(const CollectSlot* s) {
    if (!s) return py::none();
    py::dict d;
    d["delegate_id"] = s->delegateId;
    d["slot_id"] = s->slotId;
    d["recipient_id"] = s->recipientId;
    d["start_pay_index"] = s->startPayIndex;
    d["end_pay_index"] = s->endPayIndex;
    d["amount"] = s->amount;
    d["fee"] = s->fee;
    d["state"] = std::string(gameStateName(s->state));
    d["deadline_block"] = s->deadlineBlock;
    d["instant"] = s->instant;
    d["challenger_id"] = s->challengerId ? py::object(py::int_(*s->challengerId)) : py::none();
    return d;
}

}  // namespace

PYBIND11_MODULE(_batpay, m) {
    m.doc() = "Batched payments protocol core";

    static py::exception<ProtocolError> protocolError(m, "ProtocolError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ProtocolError& e) {
            py::set_error(protocolError, e.what());
        } catch (const sim::ConfigError& e) {
            py::set_error(PyExc_ValueError, e.what());
        }
    });

    py::class_<Params>(m, "Params")
        .def(py::init<>())
        .def_readwrite("max_account_count", &Params::maxAccountCount)
        .def_readwrite("unlock_period", &Params::unlockPeriod)
        .def_readwrite("challenge_period", &Params::challengePeriod)
        .def_readwrite("response_period", &Params::responsePeriod)
        .def_readwrite("collect_stake", &Params::collectStake)
        .def_readwrite("challenge_stake", &Params::challengeStake)
        .def_readwrite("max_payments_per_batch", &Params::maxPaymentsPerBatch)
        .def("validate", &Params::validate);

    py::class_<Identity>(m, "Identity")
        .def_static("from_label", &Identity::fromLabel)
        .def_property_readonly("address", [](const Identity& i) { return fromBytes(i.address().view()); })
        .def("sign", [](const Identity& i, const py::bytes& msg) { return fromBytes(i.sign(toBytes(msg)).view()); });

    py::class_<Ledger>(m, "Ledger")
        .def(py::init([](const Params& p) {
                 return Ledger(p, TokenAdapter(Identity::fromLabel("batpay/token").address()));
             }),
             py::arg("params") = Params{})
        .def_property_readonly("current_block", &Ledger::currentBlock)
        .def_property_readonly("instance_address", [](const Ledger& l) { return fromBytes(l.instanceAddress().view()); })
        .def_property_readonly("account_count", &Ledger::accountCount)
        .def_property_readonly("payment_count", &Ledger::paymentCount)
        .def_property_readonly("escrow_outstanding", &Ledger::escrowOutstanding)
        .def_property_readonly("reserve", [](const Ledger& l) { return l.token().reserve(); })
        .def("enroll", &Ledger::enroll)
        .def("mint_external",
             [](Ledger& l, const py::bytes& to, Amount amount) { l.mintExternal(fixed<Address>(to), amount); })
        .def("external_balance", [](const Ledger& l, const py::bytes& a) { return l.token().balanceOf(fixed<Address>(a)); })
        .def(
            "deposit",
            [](Ledger& l, std::optional<AccountId> target, Amount amount, const py::bytes& from) {
                return l.deposit(target.value_or(kNewAccount), amount, fixed<Address>(from));
            },
            py::arg("target"), py::arg("amount"), py::arg("sender"))
        .def("withdraw",
             [](Ledger& l, const py::bytes& sender, AccountId id, Amount amount, const py::bytes& to) {
                 return l.withdraw(fixed<Address>(sender), id, amount, fixed<Address>(to));
             })
        .def("advance_block", &Ledger::advanceBlock, py::arg("n") = 1)
        .def("register_account", [](Ledger& l, const py::bytes& a) { return l.registerAccount(fixed<Address>(a)); })
        .def("bulk_register",
             [](Ledger& l, std::uint32_t count, const py::bytes& root) { return l.bulkRegister(count, fixed<Digest>(root)); })
        .def("claim_bulk_registration_id",
             [](Ledger& l, std::uint64_t bulkId, AccountId id, const py::bytes& address, const py::bytes& proof) {
                 l.claimBulkRegistrationId(bulkId, id, fixed<Address>(address), MerkleProof::parse(toBytes(proof)));
             })
        .def("account", [](const Ledger& l, AccountId id) { return accountDict(l.account(id)); })
        .def("balance", [](const Ledger& l, AccountId id) { return l.account(id).balance; })
        .def(
            "register_payment",
            [](Ledger& l, const py::bytes& sender, AccountId fromId, Amount perDest, const std::vector<AccountId>& payees,
               const std::optional<py::bytes>& lockHash, Amount fee) {
                std::optional<Digest> lock;
                if (lockHash) lock = fixed<Digest>(*lockHash);
                return l.registerPayment(fixed<Address>(sender), fromId, perDest, payees, lock, fee);
            },
            py::arg("sender"), py::arg("from_id"), py::arg("per_destination"), py::arg("payees"),
            py::arg("lock_hash") = py::none(), py::arg("unlocker_fee") = 0)
        .def("unlock",
             [](Ledger& l, const py::bytes& sender, PayIndex idx, AccountId unlocker, const py::bytes& key) {
                 l.unlock(fixed<Address>(sender), idx, unlocker, toBytes(key));
             })
        .def("refund_locked_payment", &Ledger::refundLockedPayment)
        .def("payment_status",
             [](const Ledger& l, PayIndex idx) {
                 switch (l.payment(idx).status) {
                     case PaymentStatus::Committed: return "committed";
                     case PaymentStatus::Locked: return "locked";
                     case PaymentStatus::Refunded: return "refunded";
                 }
                 return "unknown";
             })
        .def("latest_collectable_pay_index", &Ledger::latestCollectablePayIndex)
        .def(
            "collect_message",
            [](const Ledger& l, AccountId d, SlotId s, AccountId r, PayIndex last, Amount amount, Amount fee,
               const std::optional<py::bytes>& destination) {
                return fromBytes(collectAuthorizationMessage(l.instanceAddress(), request(d, s, r, last, amount, fee, destination)));
            },
            py::arg("delegate_id"), py::arg("slot_id"), py::arg("recipient_id"), py::arg("last_payment_index"),
            py::arg("amount"), py::arg("fee"), py::arg("destination") = py::none())
        .def(
            "collect",
            [](Ledger& l, const py::bytes& sender, AccountId d, SlotId s, AccountId r, PayIndex last, Amount amount,
               Amount fee, const py::bytes& signature, const std::optional<py::bytes>& destination) {
                l.collect(fixed<Address>(sender), request(d, s, r, last, amount, fee, destination), fixed<Signature>(signature));
            },
            py::arg("sender"), py::arg("delegate_id"), py::arg("slot_id"), py::arg("recipient_id"),
            py::arg("last_payment_index"), py::arg("amount"), py::arg("fee"), py::arg("signature"),
            py::arg("destination") = py::none())
        .def("free_slot", &Ledger::freeSlot)
        .def("challenge",
             [](Ledger& l, const py::bytes& sender, AccountId d, SlotId s, AccountId c) {
                 l.challenge(fixed<Address>(sender), d, s, c);
             })
        .def("respond_with_payment_list",
             [](Ledger& l, const py::bytes& sender, AccountId d, SlotId s,
                const std::vector<std::pair<PayIndex, Amount>>& entries) {
                 std::vector<ClaimEntry> list;
                 for (auto [i, a] : entries) list.push_back({i, a});
                 l.respondWithPaymentList(fixed<Address>(sender), d, s, list);
             })
        .def("select_payment",
             [](Ledger& l, const py::bytes& sender, AccountId d, SlotId s, PayIndex idx, Amount amount) {
                 l.selectPayment(fixed<Address>(sender), d, s, ClaimEntry{idx, amount});
             })
        .def("prove_payment_inclusion",
             [](Ledger& l, const py::bytes& sender, AccountId d, SlotId s, const py::bytes& payData) {
                 l.provePaymentInclusion(fixed<Address>(sender), d, s, toBytes(payData));
             })
        .def("challenge_success", &Ledger::challengeSuccess)
        .def("challenge_failed", &Ledger::challengeFailed)
        .def("slot", [](const Ledger& l, AccountId d, SlotId s) { return slotDict(l.slot(d, s)); })
        .def("state_digest", [](const Ledger& l) { return l.stateDigest().hex(); })
        .def("invariant_violation", &Ledger::findInvariantViolation)
        .def("chain_log", [](const Ledger& l) { return fromBytes(l.chainLog().serialize(l.stateDigest())); });

    m.def("locking_key_hash", [](AccountId unlocker, const py::bytes& key) {
        return fromBytes(lockingKeyHash(unlocker, toBytes(key)).view());
    });
    m.def("encode_pay_data", [](const std::vector<AccountId>& ids) { return fromBytes(encodePayData(ids)); });
    m.def("decode_pay_data", [](const py::bytes& wire) { return decodePayData(toBytes(wire)); });

    m.def("merkle_root", [](const std::vector<py::bytes>& leaves) {
        std::vector<Address> a;
        for (const auto& l : leaves) a.push_back(fixed<Address>(l));
        return fromBytes(merkleRoot(a).view());
    });
    m.def("merkle_prove", [](const std::vector<py::bytes>& leaves, std::size_t index) {
        std::vector<Address> a;
        for (const auto& l : leaves) a.push_back(fixed<Address>(l));
        return fromBytes(merkleProve(a, index).serialize());
    });
    m.def("verify_merkle_proof", [](const py::bytes& root, const py::bytes& leaf, const py::bytes& proof, std::size_t count) {
        return verifyMerkleProof(fixed<Digest>(root), fixed<Address>(leaf), MerkleProof::parse(toBytes(proof)), count);
    });

    m.def("register_payment_gas", [](std::uint32_t n) { return registerPaymentGas(n, defaultCostParams()); });
    m.def("collect_gas", [] { return collectGas(defaultCostParams()); });
    m.def("amortized_per_payment", &amortizedPerPayment);
    m.def("usd_cost", &usdCost);
    m.def("format_usd", &formatUsd);

    m.def("parse_scenario_config", [](const std::string& text) { return sim::formatScenarioConfig(sim::parseScenarioConfig(text)); },
          "Parse and validate a scenario config; returns its normalized text.");
    m.def(
        "_run_scenario",
        [](const std::string& text, std::optional<std::uint64_t> seed, const std::string& format) {
            auto cfg = sim::parseScenarioConfig(text);
            if (seed) cfg.seed = *seed;
            sim::ScenarioReport report;
            {
                py::gil_scoped_release release;
                report = sim::runScenario(cfg);
            }
            return sim::emitReport(report, format);
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("format") = "json");
    m.def("replay_chain_log", [](const py::bytes& file) {
        auto parsed = ChainLog::parse(toBytes(file));
        auto result = replayChainLog(parsed.log, parsed.finalDigest);
        py::dict d;
        d["records"] = parsed.log.size();
        d["block"] = result.ledger->currentBlock();
        d["digest"] = result.finalDigest.hex();
        d["digest_matches"] = result.digestMatches ? py::object(py::bool_(*result.digestMatches)) : py::none();
        return d;
    });
}
