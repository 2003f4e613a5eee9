#include "batpay/merkle.hpp"

#include "batpay/bytes.hpp"
#include "batpay/error.hpp"
#include "batpay/hash.hpp"

namespace batpay {

namespace {
constexpr std::uint8_t kLeafPrefix = 0x00;
constexpr std::uint8_t kNodePrefix = 0x01;

std::vector<Digest> nextLevel(const std::vector<Digest>& level) {
    std::vector<Digest> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i < level.size(); i += 2) {
        const auto& left = level[i];
        const auto& right = i + 1 < level.size() ? level[i + 1] : level[i];
        up.push_back(merkleNodeHash(left, right));
    }
    return up;
}

std::vector<Digest> hashLeaves(std::span<const Address> leaves) {
    std::vector<Digest> level;
    level.reserve(leaves.size());
    for (const auto& a : leaves) level.push_back(merkleLeafHash(a));
    return level;
}
}  // namespace

Digest merkleLeafHash(const Address& leaf) {
    const std::uint8_t prefix[] = {kLeafPrefix};
    return Sha256().update(prefix).update(leaf.view()).finish();
}

Digest merkleNodeHash(const Digest& left, const Digest& right) {
    const std::uint8_t prefix[] = {kNodePrefix};
    return Sha256().update(prefix).update(left.view()).update(right.view()).finish();
}

std::size_t merkleDepth(std::size_t leafCount) {
    std::size_t depth = 0;
    for (std::size_t width = 1; width < leafCount; width <<= 1) ++depth;
    return depth;
}

Digest merkleRoot(std::span<const Address> leaves) {
    if (leaves.empty()) fail(Errc::InvalidArgument, "merkle tree needs at least one leaf");
    auto level = hashLeaves(leaves);
    while (level.size() > 1) level = nextLevel(level);
    return level.front();
}

MerkleProof merkleProve(std::span<const Address> leaves, std::size_t leafIndex) {
    if (leafIndex >= leaves.size())
        fail(Errc::OutOfRange, "leaf index " + std::to_string(leafIndex) + " of " + std::to_string(leaves.size()));
    MerkleProof proof;
    proof.leafIndex = static_cast<std::uint32_t>(leafIndex);
    auto level = hashLeaves(leaves);
    std::size_t idx = leafIndex;
    while (level.size() > 1) {
        std::size_t sib = idx ^ 1;
        proof.siblings.push_back(sib < level.size() ? level[sib] : level[idx]);
        level = nextLevel(level);
        idx >>= 1;
    }
    return proof;
}

bool verifyMerkleProof(const Digest& root, const Address& leaf, const MerkleProof& proof, std::size_t leafCount) {
    if (leafCount == 0 || proof.leafIndex >= leafCount) return false;
    if (proof.siblings.size() != merkleDepth(leafCount)) return false;
    Digest acc = merkleLeafHash(leaf);
    std::uint64_t idx = proof.leafIndex;
    for (const auto& sib : proof.siblings) {
        acc = (idx & 1) ? merkleNodeHash(sib, acc) : merkleNodeHash(acc, sib);
        idx >>= 1;
    }
    return acc == root;
}

Bytes MerkleProof::serialize() const {
    if (siblings.size() > 0xffff) fail(Errc::InvalidArgument, "too many siblings");
    ByteWriter w;
    w.u32(leafIndex);
    w.u16(static_cast<std::uint16_t>(siblings.size()));
    for (const auto& s : siblings) w.fixed(s);
    return std::move(w).take();
}

MerkleProof MerkleProof::parse(ByteView wire) {
    ByteReader r(wire);
    MerkleProof p;
    p.leafIndex = r.u32();
    auto n = r.u16();
    p.siblings.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) p.siblings.push_back(r.fixed<Digest>());
    r.expectEnd();
    return p;
}

}  // namespace batpay
