#include "zkeval/merkle.hpp"

#include <algorithm>

#include "zkeval/kernels.hpp"

namespace zkeval {

const Digest& empty_leaf() {
  static const Digest kEmpty = sha256(std::string_view("zkeval.empty-leaf"));
  return kEmpty;
}

Digest hash_node(const Digest& left, const Digest& right) {
  uint8_t buf[65];
  buf[0] = 0x10;
  std::copy(left.begin(), left.end(), buf + 1);
  std::copy(right.begin(), right.end(), buf + 33);
  return sha256(std::span<const uint8_t>(buf, sizeof buf));
}

MerkleTree::MerkleTree(std::vector<Digest> leaves) {
  size_t width = size_t{1} << ceil_log2(std::max<size_t>(leaves.size(), 1));
  leaves.resize(width, empty_leaf());
  levels_.push_back(std::move(leaves));
  while (levels_.back().size() > 1) {
    levels_.push_back(kernels::hash_level(levels_.back()));
  }
}

std::vector<Digest> MerkleTree::multiproof(std::span<const uint64_t> indices) const {
  std::vector<Digest> out;
  std::vector<uint64_t> cur(indices.begin(), indices.end());
  for (size_t level = 0; level + 1 < levels_.size(); ++level) {
    std::vector<uint64_t> next;
    next.reserve(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) {
      uint64_t idx = cur[i];
      uint64_t sib = idx ^ 1;
      if ((idx & 1) == 0 && i + 1 < cur.size() && cur[i + 1] == sib) {
        ++i;  // both children known
      } else {
        out.push_back(levels_[level][sib]);
      }
      if (next.empty() || next.back() != (idx >> 1)) next.push_back(idx >> 1);
    }
    cur = std::move(next);
  }
  return out;
}

bool verify_multiproof(const Digest& root, size_t depth,
                       std::span<const std::pair<uint64_t, Digest>> leaves,
                       std::span<const Digest> siblings) {
  if (leaves.empty()) return siblings.empty();
  const uint64_t width = uint64_t{1} << depth;
  std::vector<std::pair<uint64_t, Digest>> cur(leaves.begin(), leaves.end());
  for (size_t i = 0; i < cur.size(); ++i) {
    if (cur[i].first >= width) return false;
    if (i > 0 && cur[i].first <= cur[i - 1].first) return false;
  }
  size_t used = 0;
  for (size_t level = 0; level < depth; ++level) {
    std::vector<std::pair<uint64_t, Digest>> next;
    next.reserve(cur.size());
    for (size_t i = 0; i < cur.size(); ++i) {
      uint64_t idx = cur[i].first;
      Digest left, right;
      if ((idx & 1) == 0 && i + 1 < cur.size() && cur[i + 1].first == (idx ^ 1)) {
        left = cur[i].second;
        right = cur[i + 1].second;
        ++i;
      } else {
        if (used >= siblings.size()) return false;
        const Digest& sib = siblings[used++];
        if (idx & 1) {
          left = sib;
          right = cur[i].second;
        } else {
          left = cur[i].second;
          right = sib;
        }
      }
      next.emplace_back(idx >> 1, hash_node(left, right));
    }
    cur = std::move(next);
  }
  return used == siblings.size() && cur.size() == 1 && cur[0].second == root;
}

void MerkleTree::serialize(ByteWriter& w) const {
  w.u64(levels_.size());
  for (const auto& level : levels_) {
    w.u64(level.size());
    for (const auto& d : level) w.raw(d);
  }
}

MerkleTree MerkleTree::deserialize(ByteReader& r) {
  MerkleTree t;
  size_t n = r.count(8);
  t.levels_.resize(n);
  for (auto& level : t.levels_) {
    size_t m = r.count(32);
    level.resize(m);
    for (auto& d : level) {
      auto s = r.raw(32);
      std::copy(s.begin(), s.end(), d.begin());
    }
  }
  if (t.levels_.empty() || t.levels_.back().size() != 1) throw FormatError("malformed merkle tree");
  return t;
}

size_t MerkleTree::byte_size() const {
  size_t n = 8;
  for (const auto& level : levels_) n += 8 + 32 * level.size();
  return n;
}

}  // namespace zkeval
