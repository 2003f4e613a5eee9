#pragma once

#include <cstdint>
#include <vector>

#include "batpay/types.hpp"

namespace batpay {

// Binary SHA-256 tree over addresses. Leaves are hashed as H(0x00 || addr),
// interior nodes as H(0x01 || left || right); a level with an odd number of
// nodes duplicates its last node.
struct MerkleProof {
    std::uint32_t leafIndex = 0;
    std::vector<Digest> siblings;  // leaf-to-root order

    // Wire form: leafIndex u32 LE, sibling count u16 LE, then 32-byte digests.
    [[nodiscard]] Bytes serialize() const;
    static MerkleProof parse(ByteView wire);

    bool operator==(const MerkleProof&) const = default;
};

Digest merkleLeafHash(const Address& leaf);
Digest merkleNodeHash(const Digest& left, const Digest& right);

// Number of siblings in a proof for a tree with `leafCount` leaves.
std::size_t merkleDepth(std::size_t leafCount);

// Throws ProtocolError(InvalidArgument) on an empty list.
Digest merkleRoot(std::span<const Address> leaves);
// Throws ProtocolError(OutOfRange) when leafIndex >= leaves.size().
MerkleProof merkleProve(std::span<const Address> leaves, std::size_t leafIndex);

// `leafCount` is the size of the committed list. Indices at or past it are
// rejected; without that bound the duplicate-last-node padding would let a
// proof for the final leaf verify at a phantom index.
bool verifyMerkleProof(const Digest& root, const Address& leaf, const MerkleProof& proof,
                       std::size_t leafCount);

}  // namespace batpay
