#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tiltcut {

/// Bit-mask encoding of a vertex subset, used by the exact (n <= 64) routines.
using Mask = std::uint64_t;

constexpr int kMaxMaskVertices = 64;

constexpr Mask full_mask(int n) {
  return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
}

constexpr Mask bit(int v) { return Mask{1} << v; }

inline int popcount(Mask m) { return std::popcount(m); }

/// A set S of vertices of a graph on {0..n-1}; i in S encodes x_i = +1.
///
/// Storage is a little-endian word array, so universes above 64 vertices are
/// supported; `mask()` is the single-word view and throws when the universe
/// does not fit a machine word.
class VertexSubset {
 public:
  VertexSubset() = default;
  explicit VertexSubset(int universe);

  static VertexSubset from_mask(int universe, Mask m);
  static VertexSubset from_members(int universe, std::span<const int> members);
  static VertexSubset full(int universe);

  int universe() const noexcept { return universe_; }
  bool contains(int v) const;
  void insert(int v);
  void erase(int v);
  int count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  std::vector<int> members() const;
  Mask mask() const;
  VertexSubset complement() const;
  bool is_subset_of(const VertexSubset& other) const;

  std::string to_string() const;

  friend bool operator==(const VertexSubset&, const VertexSubset&) = default;

 private:
  void check_index(int v) const;

  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace tiltcut
