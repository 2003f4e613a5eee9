#include "batpay/sim/report.hpp"

#include <json.hpp>
#include <sstream>

#include "batpay/hash.hpp"

namespace batpay::sim {

namespace {

using json = nlohmann::ordered_json;
constexpr const char* kSchema = "batpay-report/1";

json gamesJson(const GameStats& g) {
    return json{{"opened", g.opened},
                {"instant", g.instant},
                {"challenged", g.challenged},
                {"won_by_monitor", g.wonByMonitor},
                {"won_by_delegate", g.wonByDelegate},
                {"settled_unchallenged", g.settledUnchallenged},
                {"overstated", g.overstated},
                {"overstated_caught", g.overstatedCaught},
                {"overstated_settled", g.overstatedSettled},
                {"false_wins", g.falseWins},
                {"instant_loss", g.instantLoss},
                {"still_open", g.stillOpen}};
}

GameStats gamesFrom(const json& j) {
    GameStats g;
    j.at("opened").get_to(g.opened);
    j.at("instant").get_to(g.instant);
    j.at("challenged").get_to(g.challenged);
    j.at("won_by_monitor").get_to(g.wonByMonitor);
    j.at("won_by_delegate").get_to(g.wonByDelegate);
    j.at("settled_unchallenged").get_to(g.settledUnchallenged);
    j.at("overstated").get_to(g.overstated);
    j.at("overstated_caught").get_to(g.overstatedCaught);
    j.at("overstated_settled").get_to(g.overstatedSettled);
    j.at("false_wins").get_to(g.falseWins);
    j.at("instant_loss").get_to(g.instantLoss);
    j.at("still_open").get_to(g.stillOpen);
    return g;
}

json calibrationJson(const CostParams& cp) {
    json fixed = json::object();
    for (const auto& [k, g] : cp.perOpFixed) fixed[std::string(opKindName(k))] = g;
    return json{{"base_tx_cost", cp.baseTxCost},
                {"per_zero_byte", cp.perZeroByte},
                {"per_nonzero_byte", cp.perNonzeroByte},
                {"per_storage_write", cp.perStorageWrite},
                {"per_op_fixed", fixed}};
}

CostParams calibrationFrom(const json& j) {
    CostParams cp;
    j.at("base_tx_cost").get_to(cp.baseTxCost);
    j.at("per_zero_byte").get_to(cp.perZeroByte);
    j.at("per_nonzero_byte").get_to(cp.perNonzeroByte);
    j.at("per_storage_write").get_to(cp.perStorageWrite);
    for (const auto& [name, g] : j.at("per_op_fixed").items()) {
        auto k = opKindFromName(name);
        if (!k) throw ReportFormatError("unknown operation '" + name + "' in calibration");
        cp.perOpFixed[*k] = g.get<Gas>();
    }
    return cp;
}

json costJson(const CostSummary& c) {
    return json{{"model", c.model},
                {"calibration", calibrationJson(c.calibration)},
                {"transactions", c.transactions},
                {"total_gas", c.totalGas},
                {"relevant_gas", c.relevantGas},
                {"payments_count", c.paymentsCount},
                {"amortized_per_payment", c.amortizedPerPayment},
                {"usd_per_payment", c.usdPerPayment},
                {"gas_by_op", c.gasByOp},
                {"tx_by_op", c.txByOp}};
}

CostSummary costFrom(const json& j) {
    CostSummary c;
    j.at("model").get_to(c.model);
    c.calibration = calibrationFrom(j.at("calibration"));
    j.at("transactions").get_to(c.transactions);
    j.at("total_gas").get_to(c.totalGas);
    j.at("relevant_gas").get_to(c.relevantGas);
    j.at("payments_count").get_to(c.paymentsCount);
    j.at("amortized_per_payment").get_to(c.amortizedPerPayment);
    j.at("usd_per_payment").get_to(c.usdPerPayment);
    j.at("gas_by_op").get_to(c.gasByOp);
    j.at("tx_by_op").get_to(c.txByOp);
    return c;
}

json balanceJson(const ActorBalance& b) {
    return json{{"id", b.id}, {"role", b.role}, {"index", b.index}, {"balance", b.balance},
                {"last_collected", b.lastCollected}};
}

ActorBalance balanceFrom(const json& j) {
    ActorBalance b;
    j.at("id").get_to(b.id);
    j.at("role").get_to(b.role);
    j.at("index").get_to(b.index);
    j.at("balance").get_to(b.balance);
    j.at("last_collected").get_to(b.lastCollected);
    return b;
}

json diffJson(const OracleDiff& d) {
    return json{{"id", d.id}, {"field", d.field}, {"ledger", d.ledger}, {"oracle", d.oracle}};
}

OracleDiff diffFrom(const json& j) {
    OracleDiff d;
    j.at("id").get_to(d.id);
    j.at("field").get_to(d.field);
    j.at("ledger").get_to(d.ledger);
    j.at("oracle").get_to(d.oracle);
    return d;
}

// Scalar fields shared by the json document and the jsonl summary line.
json summaryJson(const ScenarioReport& r) {
    return json{{"schema", kSchema},
                {"seed", r.seed},
                {"blocks", r.blocks},
                {"final_block", r.finalBlock},
                {"drained", r.drained},
                {"actors", r.actors},
                {"conservation_ok", r.conservationOk},
                {"soundness_ok", r.soundnessOk},
                {"games", gamesJson(r.games)},
                {"payments", r.payments},
                {"locked_payments", r.lockedPayments},
                {"unlocks", r.unlocks},
                {"refunds", r.refunds},
                {"withdrawals", r.withdrawals},
                {"unclaimed_bulk_ids", r.unclaimedBulkIds},
                {"rejections", r.rejections},
                {"cost", costJson(r.cost)},
                {"event_counts", r.eventCounts},
                {"monitor_net", r.monitorNet},
                {"state_digest", r.stateDigest}};
}

void checkSchema(const json& j) {
    if (!j.contains("schema") || j.at("schema") != kSchema)
        throw ReportFormatError("report schema is not " + std::string(kSchema));
}

void summaryFrom(const json& j, ScenarioReport& r) {
    checkSchema(j);
    j.at("seed").get_to(r.seed);
    j.at("blocks").get_to(r.blocks);
    j.at("final_block").get_to(r.finalBlock);
    j.at("drained").get_to(r.drained);
    j.at("actors").get_to(r.actors);
    j.at("conservation_ok").get_to(r.conservationOk);
    j.at("soundness_ok").get_to(r.soundnessOk);
    r.games = gamesFrom(j.at("games"));
    j.at("payments").get_to(r.payments);
    j.at("locked_payments").get_to(r.lockedPayments);
    j.at("unlocks").get_to(r.unlocks);
    j.at("refunds").get_to(r.refunds);
    j.at("withdrawals").get_to(r.withdrawals);
    j.at("unclaimed_bulk_ids").get_to(r.unclaimedBulkIds);
    j.at("rejections").get_to(r.rejections);
    r.cost = costFrom(j.at("cost"));
    j.at("event_counts").get_to(r.eventCounts);
    j.at("monitor_net").get_to(r.monitorNet);
    j.at("state_digest").get_to(r.stateDigest);
}

}  // namespace

std::string emitReport(const ScenarioReport& report, std::string_view format) {
    if (format == "json") {
        auto doc = summaryJson(report);
        doc["balances"] = json::array();
        for (const auto& b : report.balances) doc["balances"].push_back(balanceJson(b));
        doc["oracle_diffs"] = json::array();
        for (const auto& d : report.oracleDiffs) doc["oracle_diffs"].push_back(diffJson(d));
        return doc.dump(2) + "\n";
    }
    if (format == "jsonl") {
        std::string out;
        auto line = [&](const char* type, json j) {
            json tagged{{"type", type}};
            tagged.update(j);
            out += tagged.dump() + "\n";
        };
        line("summary", summaryJson(report));
        for (const auto& b : report.balances) line("balance", balanceJson(b));
        for (const auto& d : report.oracleDiffs) line("oracle_diff", diffJson(d));
        line("end", json{{"balances", report.balances.size()}, {"oracle_diffs", report.oracleDiffs.size()}});
        return out;
    }
    throw ReportFormatError("unknown report format '" + std::string(format) + "' (expected json or jsonl)");
}

ScenarioReport parseReport(std::string_view text, std::string_view format) {
    ScenarioReport r;
    try {
        if (format == "json") {
            auto doc = json::parse(text);
            summaryFrom(doc, r);
            for (const auto& b : doc.at("balances")) r.balances.push_back(balanceFrom(b));
            for (const auto& d : doc.at("oracle_diffs")) r.oracleDiffs.push_back(diffFrom(d));
            return r;
        }
        if (format == "jsonl") {
            std::istringstream in{std::string(text)};
            std::string line;
            bool summary = false, end = false;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                if (end) throw ReportFormatError("records after the end line");
                auto j = json::parse(line);
                const auto type = j.at("type").get<std::string>();
                if (type == "summary") {
                    if (summary) throw ReportFormatError("duplicate summary line");
                    summaryFrom(j, r);
                    summary = true;
                } else if (!summary) {
                    throw ReportFormatError("first line must be the summary");
                } else if (type == "balance") {
                    r.balances.push_back(balanceFrom(j));
                } else if (type == "oracle_diff") {
                    r.oracleDiffs.push_back(diffFrom(j));
                } else if (type == "end") {
                    if (j.at("balances") != r.balances.size() || j.at("oracle_diffs") != r.oracleDiffs.size())
                        throw ReportFormatError("end line counts do not match the records");
                    end = true;
                } else {
                    throw ReportFormatError("unknown record type '" + type + "'");
                }
            }
            if (!end) throw ReportFormatError("missing end line");
            return r;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ReportFormatError(std::string("malformed report: ") + e.what());
    }
    throw ReportFormatError("unknown report format '" + std::string(format) + "' (expected json or jsonl)");
}

std::string reportDigest(const ScenarioReport& report) {
    auto text = emitReport(report, "json");
    return sha256(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size())).hex();
}

}  // namespace batpay::sim
