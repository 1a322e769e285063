#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zkeval/bytes.hpp"
#include "zkeval/hash.hpp"

namespace zkeval {

// Leaf-hash domain tags shared by every commitment in the system.
enum class LeafTag : uint8_t {
  kGate = 0x01,
  kCell = 0x02,
  kWeight = 0x03,
  kTable = 0x04,
  kWeightChunk = 0x05,
};

// Hash placed in unused leaf slots and returned as the root of an empty tree.
const Digest& empty_leaf();
Digest hash_node(const Digest& left, const Digest& right);

// Binary Merkle tree over a power-of-two padded leaf layer.
class MerkleTree {
 public:
  MerkleTree() = default;
  explicit MerkleTree(std::vector<Digest> leaves);

  const Digest& root() const { return levels_.back().front(); }
  size_t depth() const { return levels_.size() - 1; }
  size_t leaf_count() const { return levels_.front().size(); }
  const Digest& leaf(size_t i) const { return levels_.front()[i]; }

  // Siblings needed to authenticate the sorted, deduplicated `indices`, in
  // the order verify_multiproof consumes them.
  std::vector<Digest> multiproof(std::span<const uint64_t> indices) const;

  void serialize(ByteWriter& w) const;
  static MerkleTree deserialize(ByteReader& r);

  size_t byte_size() const;

 private:
  std::vector<std::vector<Digest>> levels_;
};

// `leaves` must be sorted by index with no duplicates.
bool verify_multiproof(const Digest& root, size_t depth,
                       std::span<const std::pair<uint64_t, Digest>> leaves,
                       std::span<const Digest> siblings);

inline size_t ceil_log2(uint64_t n) {
  size_t k = 0;
  while ((uint64_t{1} << k) < n) ++k;
  return k;
}

}  // namespace zkeval
