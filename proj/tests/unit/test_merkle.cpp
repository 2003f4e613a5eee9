#include <gtest/gtest.h>

#include <random>

#include "batpay/error.hpp"
#include "batpay/hash.hpp"
#include "batpay/identity.hpp"
#include "batpay/merkle.hpp"

using namespace batpay;

namespace {

std::vector<Address> leaves(std::size_t n) {
    std::vector<Address> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(Identity::fromLabel("m" + std::to_string(i)).address());
    return out;
}

// Independent reference: recursive definition over the padded list.
Digest referenceRoot(std::vector<Digest> level) {
    while (level.size() > 1) {
        if (level.size() % 2) level.push_back(level.back());
        std::vector<Digest> next;
        for (std::size_t i = 0; i < level.size(); i += 2) {
            Bytes buf{0x01};
            buf.insert(buf.end(), level[i].bytes.begin(), level[i].bytes.end());
            buf.insert(buf.end(), level[i + 1].bytes.begin(), level[i + 1].bytes.end());
            next.push_back(sha256(buf));
        }
        level = std::move(next);
    }
    return level.front();
}

Digest referenceLeaf(const Address& a) {
    Bytes buf{0x00};
    buf.insert(buf.end(), a.bytes.begin(), a.bytes.end());
    return sha256(buf);
}

}  // namespace

TEST(Merkle, SingleLeafRootIsLeafHash) {
    auto l = leaves(1);
    EXPECT_EQ(merkleRoot(l), merkleLeafHash(l[0]));
    EXPECT_EQ(merkleLeafHash(l[0]), referenceLeaf(l[0]));
    EXPECT_TRUE(merkleProve(l, 0).siblings.empty());
    EXPECT_TRUE(verifyMerkleProof(merkleRoot(l), l[0], merkleProve(l, 0), 1));
}

TEST(Merkle, EmptyAndOutOfRange) {
    std::vector<Address> none;
    EXPECT_THROW(merkleRoot(none), ProtocolError);
    auto l = leaves(3);
    EXPECT_THROW(merkleProve(l, 3), ProtocolError);
}

TEST(Merkle, MatchesReferenceConstruction) {
    for (std::size_t n = 1; n <= 33; ++n) {
        auto l = leaves(n);
        std::vector<Digest> hashed;
        for (const auto& a : l) hashed.push_back(referenceLeaf(a));
        EXPECT_EQ(merkleRoot(l), referenceRoot(hashed)) << n;
    }
}

TEST(Merkle, Deterministic) { EXPECT_EQ(merkleRoot(leaves(9)), merkleRoot(leaves(9))); }

TEST(Merkle, DepthIsCeilLog2) {
    EXPECT_EQ(merkleDepth(1), 0u);
    EXPECT_EQ(merkleDepth(2), 1u);
    EXPECT_EQ(merkleDepth(3), 2u);
    EXPECT_EQ(merkleDepth(4), 2u);
    EXPECT_EQ(merkleDepth(5), 3u);
    EXPECT_EQ(merkleDepth(32), 5u);
    EXPECT_EQ(merkleDepth(33), 6u);
}

TEST(Merkle, AnyLeafMutationChangesRoot) {
    for (std::size_t n = 1; n <= 16; ++n) {
        auto l = leaves(n);
        auto root = merkleRoot(l);
        for (std::size_t i = 0; i < n; ++i) {
            auto m = l;
            m[i].bytes[0] ^= 1;
            EXPECT_NE(merkleRoot(m), root) << n << "/" << i;
        }
    }
}

TEST(Merkle, ProofForOneIndexRejectedAtAnother) {
    for (std::size_t n = 2; n <= 8; ++n) {
        auto l = leaves(n);
        auto root = merkleRoot(l);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                EXPECT_FALSE(verifyMerkleProof(root, l[j], merkleProve(l, i), n)) << n << ":" << i << "->" << j;
            }
    }
}

TEST(Merkle, WrongLeafCountRejected) {
    auto l = leaves(5);
    auto root = merkleRoot(l);
    auto proof = merkleProve(l, 1);
    EXPECT_TRUE(verifyMerkleProof(root, l[1], proof, 5));
    EXPECT_FALSE(verifyMerkleProof(root, l[1], proof, 3));  // depth 2 expected
    auto extra = proof;
    extra.siblings.push_back(Digest{});
    EXPECT_FALSE(verifyMerkleProof(root, l[1], extra, 5));
}

TEST(MerkleProof, SerializationLayout) {
    auto l = leaves(5);
    auto proof = merkleProve(l, 4);
    auto wire = proof.serialize();
    ASSERT_EQ(wire.size(), 4 + 2 + 32 * proof.siblings.size());
    EXPECT_EQ(wire[0], 4);
    EXPECT_EQ(wire[4], proof.siblings.size());
    EXPECT_EQ(MerkleProof::parse(wire), proof);
    wire.pop_back();
    EXPECT_THROW(MerkleProof::parse(wire), ProtocolError);
}
