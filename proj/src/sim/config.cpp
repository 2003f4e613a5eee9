#include "batpay/sim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

namespace batpay::sim {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::uint64_t parseUint(std::string_view v) {
    v = trim(v);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

// Exact decimal in [0, 1] with at most six fractional digits.
Ppm parsePpm(std::string_view v) {
    v = trim(v);
    auto dot = v.find('.');
    std::string_view whole = v.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : v.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("empty fraction");
    if (frac.size() > 6) throw std::invalid_argument("fraction has more than 6 decimals");
    std::uint64_t w = whole.empty() ? 0 : parseUint(whole);
    std::uint64_t f = 0;
    if (!frac.empty()) {
        f = parseUint(frac);
        for (auto i = frac.size(); i < 6; ++i) f *= 10;
    }
    auto ppm = w * kPpmOne + f;
    if (ppm > kPpmOne) throw std::invalid_argument("fraction must lie in [0, 1]");
    return static_cast<Ppm>(ppm);
}

Range parseRange(std::string_view v) {
    v = trim(v);
    auto sep = v.find("..");
    if (sep == std::string_view::npos) {
        auto x = parseUint(v);
        return {x, x};
    }
    return {parseUint(v.substr(0, sep)), parseUint(v.substr(sep + 2))};
}

std::string formatPpm(Ppm p) {
    std::string frac = std::to_string(p % kPpmOne);
    frac.insert(0, 6 - frac.size(), '0');
    while (frac.size() > 1 && frac.back() == '0') frac.pop_back();
    return std::to_string(p / kPpmOne) + "." + frac;
}

std::string formatRange(const Range& r) { return std::to_string(r.min) + ".." + std::to_string(r.max); }

template <class T>
T narrow(std::uint64_t v) {
    if (v > std::numeric_limits<T>::max()) throw std::invalid_argument("value too large");
    return static_cast<T>(v);
}

struct Field {
    std::string section;
    std::string key;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

template <class T>
Field uintField(std::string section, std::string key, T ScenarioConfig::*member) {
    return {std::move(section), std::move(key),
            [member](ScenarioConfig& c, std::string_view v) { c.*member = narrow<T>(parseUint(v)); },
            [member](const ScenarioConfig& c) { return std::to_string(c.*member); }};
}

template <class T>
Field paramField(std::string key, T Params::*member) {
    return {"params", std::move(key),
            [member](ScenarioConfig& c, std::string_view v) { c.params.*member = narrow<T>(parseUint(v)); },
            [member](const ScenarioConfig& c) { return std::to_string(c.params.*member); }};
}

Field costField(std::string key, Gas CostParams::*member) {
    return {"cost", std::move(key), [member](ScenarioConfig& c, std::string_view v) { c.cost.*member = parseUint(v); },
            [member](const ScenarioConfig& c) { return std::to_string(c.cost.*member); }};
}

Field ppmField(std::string section, std::string key, Ppm ScenarioConfig::*member) {
    return {std::move(section), std::move(key),
            [member](ScenarioConfig& c, std::string_view v) { c.*member = parsePpm(v); },
            [member](const ScenarioConfig& c) { return formatPpm(c.*member); }};
}

Field rangeField(std::string section, std::string key, Range ScenarioConfig::*member) {
    return {std::move(section), std::move(key),
            [member](ScenarioConfig& c, std::string_view v) { c.*member = parseRange(v); },
            [member](const ScenarioConfig& c) { return formatRange(c.*member); }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> kFields = [] {
        std::vector<Field> f;
        f.push_back(uintField("scenario", "seed", &ScenarioConfig::seed));
        f.push_back(uintField("scenario", "blocks", &ScenarioConfig::blocks));
        f.push_back(uintField("scenario", "drain_limit", &ScenarioConfig::drainLimit));

        f.push_back(uintField("buyers", "count", &ScenarioConfig::buyers));
        f.push_back(uintField("buyers", "funds", &ScenarioConfig::buyerFunds));
        f.push_back(ppmField("buyers", "payment_probability", &ScenarioConfig::paymentProbability));
        f.push_back(rangeField("buyers", "per_destination", &ScenarioConfig::perDestination));
        f.push_back(rangeField("buyers", "payees_per_batch", &ScenarioConfig::payeesPerBatch));
        f.push_back(ppmField("buyers", "locked_fraction", &ScenarioConfig::lockedPaymentFraction));

        f.push_back(uintField("sellers", "count", &ScenarioConfig::sellers));
        f.push_back(ppmField("sellers", "bulk_registered_fraction", &ScenarioConfig::bulkRegisteredFraction));
        f.push_back(uintField("sellers", "accumulation_threshold", &ScenarioConfig::accumulationThreshold));
        f.push_back(ppmField("sellers", "withdraw_probability", &ScenarioConfig::sellerWithdrawProbability));

        f.push_back(uintField("delegates", "count", &ScenarioConfig::delegates));
        f.push_back(uintField("delegates", "funds", &ScenarioConfig::delegateFunds));
        f.push_back(uintField("delegates", "fee", &ScenarioConfig::delegateFee));
        f.push_back(ppmField("delegates", "instant_fraction", &ScenarioConfig::instantFraction));
        f.push_back(ppmField("delegates", "cheating_fraction", &ScenarioConfig::cheatingDelegateFraction));
        f.push_back(rangeField("delegates", "overstatement", &ScenarioConfig::delegateOverstatement));
        f.push_back({"delegates", "cheat_style",
                     [](ScenarioConfig& c, std::string_view v) {
                         v = trim(v);
                         if (v == "inflated-list") c.cheatStyle = CheatStyle::InflatedList;
                         else if (v == "silent") c.cheatStyle = CheatStyle::Silent;
                         else if (v == "bad-proof") c.cheatStyle = CheatStyle::BadProof;
                         else throw std::invalid_argument("cheat_style must be inflated-list, silent or bad-proof");
                     },
                     [](const ScenarioConfig& c) { return std::string(cheatStyleName(c.cheatStyle)); }});

        f.push_back(uintField("monitors", "count", &ScenarioConfig::monitors));
        f.push_back(uintField("monitors", "funds", &ScenarioConfig::monitorFunds));
        f.push_back(ppmField("monitors", "lazy_fraction", &ScenarioConfig::lazyMonitorFraction));
        f.push_back(ppmField("monitors", "lazy_sample_rate", &ScenarioConfig::lazySampleRate));

        f.push_back(uintField("unlockers", "count", &ScenarioConfig::unlockers));
        f.push_back(ppmField("unlockers", "withholding_fraction", &ScenarioConfig::withholdingUnlockerFraction));
        f.push_back(rangeField("unlockers", "fee", &ScenarioConfig::unlockerFee));

        f.push_back(paramField("max_account_count", &Params::maxAccountCount));
        f.push_back(paramField("unlock_period", &Params::unlockPeriod));
        f.push_back(paramField("challenge_period", &Params::challengePeriod));
        f.push_back(paramField("response_period", &Params::responsePeriod));
        f.push_back(paramField("collect_stake", &Params::collectStake));
        f.push_back(paramField("challenge_stake", &Params::challengeStake));
        f.push_back(paramField("max_payments_per_batch", &Params::maxPaymentsPerBatch));

        f.push_back(costField("base_tx_cost", &CostParams::baseTxCost));
        f.push_back(costField("per_zero_byte", &CostParams::perZeroByte));
        f.push_back(costField("per_nonzero_byte", &CostParams::perNonzeroByte));
        f.push_back(costField("per_storage_write", &CostParams::perStorageWrite));
        f.push_back(uintField("cost", "gas_price_gwei", &ScenarioConfig::gasPriceGwei));
        f.push_back(uintField("cost", "eth_usd", &ScenarioConfig::ethUsd));
        return f;
    }();
    return kFields;
}

const Field* findField(std::string_view section, std::string_view key) {
    for (const auto& f : fields())
        if (f.section == section && f.key == key) return &f;
    return nullptr;
}

}  // namespace

std::string_view cheatStyleName(CheatStyle s) {
    switch (s) {
        case CheatStyle::InflatedList: return "inflated-list";
        case CheatStyle::Silent: return "silent";
        case CheatStyle::BadProof: return "bad-proof";
    }
    return "unknown";
}

std::uint32_t actorsWithTrait(std::uint32_t count, Ppm f) {
    return static_cast<std::uint32_t>((std::uint64_t{count} * f + kPpmOne / 2) / kPpmOne);
}

void ScenarioConfig::validate() const {
    auto range = [](const Range& r, const char* name, bool positive) {
        if (r.min > r.max) throw ConfigError(0, std::string(name) + ": empty range");
        if (positive && r.min == 0) throw ConfigError(0, std::string(name) + ": must be positive");
    };
    if (blocks == 0) throw ConfigError(0, "scenario.blocks must be positive");
    range(perDestination, "buyers.per_destination", true);
    range(payeesPerBatch, "buyers.payees_per_batch", true);
    range(delegateOverstatement, "delegates.overstatement", true);
    range(unlockerFee, "unlockers.fee", false);
    if (payeesPerBatch.max > params.maxPaymentsPerBatch)
        throw ConfigError(0, "buyers.payees_per_batch exceeds params.max_payments_per_batch");
    if (accumulationThreshold == 0) throw ConfigError(0, "sellers.accumulation_threshold must be positive");
    if (buyers > 0 && sellers == 0) throw ConfigError(0, "buyers need at least one seller to pay");
    if (lockedPaymentFraction > 0 && unlockers == 0)
        throw ConfigError(0, "buyers.locked_fraction needs at least one unlocker");
    if (gasPriceGwei == 0 || ethUsd == 0) throw ConfigError(0, "cost.gas_price_gwei and cost.eth_usd must be positive");
    std::uint64_t actors = std::uint64_t{buyers} + sellers + delegates + monitors + unlockers;
    if (actors > params.maxAccountCount) throw ConfigError(0, "more actors than params.max_account_count");
    try {
        params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    for (auto k : kAllOpKinds)
        if (!cost.perOpFixed.count(k)) throw ConfigError(0, "cost: no fixed cost for " + std::string(opKindName(k)));
}

ScenarioConfig parseScenarioConfig(std::string_view text) {
    ScenarioConfig cfg;
    std::string section;
    std::set<std::string> seen;
    bool calibrate = true;
    std::vector<std::pair<OpKind, Gas>> fixedOverrides;
    std::size_t lineNo = 0;

    while (!text.empty()) {
        ++lineNo;
        auto nl = text.find('\n');
        auto line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(lineNo, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> kSections = {"scenario", "buyers",  "sellers", "delegates",
                                                            "monitors", "unlockers", "params", "cost"};
            if (!kSections.count(section)) throw ConfigError(lineNo, "unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(lineNo, "expected key = value");
        auto key = std::string(trim(line.substr(0, eq)));
        auto value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(lineNo, "key '" + key + "' outside any section");
        if (!seen.insert(section + "." + key).second) throw ConfigError(lineNo, "duplicate key " + section + "." + key);
        try {
            if (section == "cost" && key == "calibrate") {
                if (value == "true") calibrate = true;
                else if (value == "false") calibrate = false;
                else throw std::invalid_argument("calibrate must be true or false");
            } else if (section == "cost" && key.rfind("fixed.", 0) == 0) {
                auto op = opKindFromName(std::string_view(key).substr(6));
                if (!op) throw std::invalid_argument("unknown operation '" + key.substr(6) + "'");
                fixedOverrides.emplace_back(*op, parseUint(value));
            } else if (const auto* f = findField(section, key)) {
                f->set(cfg, value);
            } else {
                throw std::invalid_argument("unknown key " + section + "." + key);
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(lineNo, e.what());
        }
    }
    if (calibrate) {
        try {
            calibrateAnchors(cfg.cost);
        } catch (const std::exception& e) {
            throw ConfigError(0, std::string("cost calibration: ") + e.what());
        }
    }
    for (auto [op, gas] : fixedOverrides) cfg.cost.perOpFixed[op] = gas;
    cfg.validate();
    return cfg;
}

ScenarioConfig loadScenarioConfig(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parseScenarioConfig(ss.str());
}

std::string formatScenarioConfig(const ScenarioConfig& cfg) {
    std::string out;
    std::string section;
    for (const auto& f : fields()) {
        if (f.section != section) {
            if (!section.empty()) out += "\n";
            section = f.section;
            out += "[" + section + "]\n";
        }
        out += f.key + " = " + f.get(cfg) + "\n";
    }
    out += "calibrate = false\n";
    for (const auto& [op, gas] : cfg.cost.perOpFixed)
        out += "fixed." + std::string(opKindName(op)) + " = " + std::to_string(gas) + "\n";
    return out;
}

}  // namespace batpay::sim
