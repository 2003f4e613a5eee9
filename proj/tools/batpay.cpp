#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <thread>

#include "batpay/cost_model.hpp"
#include "batpay/error.hpp"
#include "batpay/merkle.hpp"
#include "batpay/paydata.hpp"
#include "batpay/replay.hpp"
#include "batpay/sim/config.hpp"
#include "batpay/sim/report.hpp"
#include "batpay/sim/scenario.hpp"

namespace {

using namespace batpay;

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kParse = 3, kInvariant = 4 };

// Input that does not parse; maps to exit status 3.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Bytes readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void writeFile(const std::string& path, ByteView data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void writeText(const std::string& path, const std::string& text) {
    writeFile(path, ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::string> lines(const Bytes& data) {
    std::vector<std::string> out;
    std::string cur;
    for (auto b : data) {
        if (b == '\n') {
            out.push_back(cur);
            cur.clear();
        } else if (b != '\r') {
            cur.push_back(static_cast<char>(b));
        }
    }
    if (!cur.empty()) out.push_back(cur);
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::vector<Address> readLeaves(const std::string& path) {
    std::vector<Address> leaves;
    std::size_t n = 0;
    for (const auto& l : lines(readFile(path))) {
        ++n;
        try {
            leaves.push_back(Address::fromHexString(l));
        } catch (const std::exception& e) {
            throw InputError(path + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    if (leaves.empty()) throw InputError(path + ": no leaves");
    return leaves;
}

std::string withSeed(const std::string& path, std::uint64_t seed) {
    auto dot = path.find_last_of('.');
    auto slash = path.find_last_of('/');
    std::string tag = ".seed-" + std::to_string(seed);
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag;
    return path.substr(0, dot) + tag + path.substr(dot);
}

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";
    std::string log;
    unsigned jobs = 1;
    unsigned runs = 1;
};

int cmdRun(const RunOptions& o) {
    sim::ScenarioConfig base;
    try {
        base = sim::loadScenarioConfig(o.config);
    } catch (const sim::ConfigError& e) {
        std::cerr << o.config << ": " << e.what() << "\n";
        return kParse;
    }
    if (o.format != "json" && o.format != "jsonl") {
        std::cerr << "unknown report format '" << o.format << "'\n";
        return kUsage;
    }
    if (o.seed) base.seed = *o.seed;

    struct Outcome {
        std::optional<sim::ScenarioRun> run;
        std::string error;
        int status = kOk;
    };
    std::vector<Outcome> outcomes(o.runs);
    std::mutex mu;
    unsigned next = 0;
    auto worker = [&] {
        for (;;) {
            unsigned i;
            {
                std::lock_guard lock(mu);
                if (next == o.runs) return;
                i = next++;
            }
            auto cfg = base;
            cfg.seed = base.seed + i;
            try {
                outcomes[i].run = sim::runScenarioWithLog(cfg);
            } catch (const ProtocolError& e) {
                outcomes[i].error = e.what();
                outcomes[i].status = kInvariant;
            } catch (const sim::ConfigError& e) {
                outcomes[i].error = e.what();
                outcomes[i].status = kParse;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::max(1u, std::min(o.jobs, o.runs)); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    int status = kOk;
    for (unsigned i = 0; i < o.runs; ++i) {
        const auto seed = base.seed + i;
        auto& oc = outcomes[i];
        if (!oc.run) {
            std::cerr << "seed " << seed << ": " << oc.error << "\n";
            status = std::max(status, oc.status);
            continue;
        }
        const auto& r = oc.run->report;
        if (!o.out.empty()) writeText(o.runs == 1 ? o.out : withSeed(o.out, seed), sim::emitReport(r, o.format));
        if (!o.log.empty()) {
            writeFile(o.runs == 1 ? o.log : withSeed(o.log, seed),
                      oc.run->log.serialize(Digest::fromHexString(r.stateDigest)));
        }
        std::cout << "seed=" << seed << " blocks=" << r.finalBlock << " games=" << r.games.opened
                  << " challenged=" << r.games.challenged << " won_by_monitor=" << r.games.wonByMonitor
                  << " won_by_delegate=" << r.games.wonByDelegate << " amortized_gas=" << r.cost.amortizedPerPayment
                  << " oracle_diffs=" << r.oracleDiffs.size()
                  << " conservation=" << (r.conservationOk ? "OK" : "VIOLATED")
                  << " soundness=" << (r.soundnessOk ? "OK" : "VIOLATED") << " digest=" << r.stateDigest << "\n";
        if (!r.conservationOk || !r.soundnessOk) status = std::max(status, int{kInvariant});
    }
    return status;
}

int cmdCost(std::uint64_t n, double gwei, double ethUsd) {
    if (n == 0 || n > std::numeric_limits<std::uint32_t>::max()) {
        std::cerr << "--n must be between 1 and 2^32-1\n";
        return kUsage;
    }
    if (!(gwei > 0) || !(ethUsd > 0)) {
        std::cerr << "--gwei and --ethusd must be positive\n";
        return kUsage;
    }
    const auto cp = defaultCostParams();
    const auto reg = registerPaymentGas(static_cast<std::uint32_t>(n), cp);
    const auto col = collectGas(cp);
    const auto amortized = amortizedPerPayment(reg, col, n);
    std::cout << "payees           " << n << "\n"
              << "register_gas     " << reg << "\n"
              << "collect_gas      " << col << "\n"
              << "amortized_gas    " << amortized << "\n"
              << "usd_per_payment  " << formatUsd(usdCost(amortized, gwei, ethUsd)) << "\n";
    return kOk;
}

int cmdEncode(const std::string& in, const std::string& out) {
    std::vector<AccountId> ids;
    std::size_t n = 0;
    for (const auto& l : lines(readFile(in))) {
        ++n;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(l.data(), l.data() + l.size(), v);
        if (l.empty() || ec != std::errc() || p != l.data() + l.size() || v >= kNewAccount)
            throw InputError(in + ":" + std::to_string(n) + ": not an account id: '" + l + "'");
        ids.push_back(static_cast<AccountId>(v));
    }
    Bytes wire;
    try {
        wire = encodePayData(ids);
    } catch (const ProtocolError& e) {
        throw InputError(in + ": " + e.what());
    }
    writeFile(out, wire);
    return kOk;
}

int cmdDecode(const std::string& in, const std::string& out) {
    std::vector<AccountId> ids;
    try {
        ids = decodePayData(readFile(in));
    } catch (const ProtocolError& e) {
        throw InputError(in + ": " + e.what());
    }
    std::string text;
    for (auto id : ids) text += std::to_string(id) + "\n";
    writeText(out, text);
    return kOk;
}

int cmdReplay(const std::string& path) {
    ChainLog::Parsed parsed;
    try {
        parsed = ChainLog::parse(readFile(path));
    } catch (const ProtocolError& e) {
        throw InputError(path + ": " + e.what());
    }
    ReplayResult result;
    try {
        result = replayChainLog(parsed.log, parsed.finalDigest);
    } catch (const ProtocolError& e) {
        std::cerr << "replay diverged: " << e.what() << "\n";
        return kInvariant;
    }
    std::cout << "records  " << parsed.log.size() << "\n"
              << "block    " << result.ledger->currentBlock() << "\n"
              << "digest   " << result.finalDigest.hex() << "\n";
    if (result.digestMatches) {
        std::cout << "expected " << parsed.finalDigest->hex() << "\n"
                  << "result   " << (*result.digestMatches ? "match" : "MISMATCH") << "\n";
        if (!*result.digestMatches) return kInvariant;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"batpay: batched payments protocol simulator and tools"};
    app.require_subcommand(1);

    RunOptions run;
    auto* runCmd = app.add_subcommand("run", "Run a scenario and write its report");
    runCmd->add_option("--config", run.config, "Scenario config file")->required();
    runCmd->add_option("--seed", run.seed, "Override the config seed");
    runCmd->add_option("--out", run.out, "Report output path");
    runCmd->add_option("--format", run.format, "Report format: json or jsonl");
    runCmd->add_option("--log", run.log, "Write the chain log (with final digest) here");
    runCmd->add_option("--jobs", run.jobs, "Parallel workers")->check(CLI::Range(1u, 256u));
    runCmd->add_option("--runs", run.runs, "Consecutive seeds to run")->check(CLI::Range(1u, 100000u));

    std::uint64_t n = 0;
    double gwei = 0, ethUsd = 0;
    auto* costCmd = app.add_subcommand("cost", "Print the gas cost table");
    costCmd->add_option("--n", n, "Payments per batch")->required();
    costCmd->add_option("--gwei", gwei, "Gas price in gwei")->required();
    costCmd->add_option("--ethusd", ethUsd, "ETH price in USD")->required();

    std::string in, out;
    auto* codecCmd = app.add_subcommand("codec", "Encode or decode payData");
    codecCmd->require_subcommand(1);
    auto* encodeCmd = codecCmd->add_subcommand("encode", "Newline-separated sorted IDs to wire bytes");
    auto* decodeCmd = codecCmd->add_subcommand("decode", "Wire bytes to newline-separated IDs");
    for (auto* c : {encodeCmd, decodeCmd}) {
        c->add_option("--in", in, "Input file")->required();
        c->add_option("--out", out, "Output file")->required();
    }

    std::string leavesPath, rootHex, leafHex, proofPath;
    std::size_t index = 0, count = 0;
    auto* merkleCmd = app.add_subcommand("merkle", "Merkle root, proof generation and verification");
    merkleCmd->require_subcommand(1);
    auto* rootCmd = merkleCmd->add_subcommand("root", "Print the root of a leaf list");
    rootCmd->add_option("--leaves", leavesPath, "File with one hex address per line")->required();
    auto* proveCmd = merkleCmd->add_subcommand("prove", "Write the proof for one leaf");
    proveCmd->add_option("--leaves", leavesPath, "File with one hex address per line")->required();
    proveCmd->add_option("--index", index, "Leaf index")->required();
    proveCmd->add_option("--out", out, "Proof output file")->required();
    auto* verifyCmd = merkleCmd->add_subcommand("verify", "Check a proof against a root");
    verifyCmd->add_option("--root", rootHex, "Root digest (hex)")->required();
    verifyCmd->add_option("--leaf", leafHex, "Leaf address (hex)")->required();
    verifyCmd->add_option("--proof", proofPath, "Proof file")->required();
    verifyCmd->add_option("--count", count, "Number of leaves in the committed list")->required();

    std::string logPath;
    auto* replayCmd = app.add_subcommand("replay", "Re-execute a chain log and compare digests");
    replayCmd->add_option("--log", logPath, "Chain log file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*runCmd) return cmdRun(run);
        if (*costCmd) return cmdCost(n, gwei, ethUsd);
        if (*encodeCmd) return cmdEncode(in, out);
        if (*decodeCmd) return cmdDecode(in, out);
        if (*rootCmd) {
            std::cout << merkleRoot(readLeaves(leavesPath)).hex() << "\n";
            return kOk;
        }
        if (*proveCmd) {
            auto leaves = readLeaves(leavesPath);
            if (index >= leaves.size()) {
                std::cerr << "--index " << index << " out of range for " << leaves.size() << " leaves\n";
                return kUsage;
            }
            writeFile(out, merkleProve(leaves, index).serialize());
            return kOk;
        }
        if (*verifyCmd) {
            Digest root;
            Address leaf;
            MerkleProof proof;
            try {
                root = Digest::fromHexString(rootHex);
                leaf = Address::fromHexString(leafHex);
                proof = MerkleProof::parse(readFile(proofPath));
            } catch (const ProtocolError& e) {
                throw InputError(e.what());
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
            bool ok = verifyMerkleProof(root, leaf, proof, count);
            std::cout << (ok ? "valid" : "invalid") << "\n";
            return ok ? kOk : kFailed;
        }
        if (*replayCmd) return cmdReplay(logPath);
    } catch (const InputError& e) {
        std::cerr << e.what() << "\n";
        return kParse;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kUsage;
}
