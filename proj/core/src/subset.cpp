#include "tiltcut/subset.hpp"

#include <stdexcept>

#include "tiltcut/error.hpp"

namespace tiltcut {

namespace {
constexpr int kWordBits = 64;

int word_count(int universe) { return (universe + kWordBits - 1) / kWordBits; }
}  // namespace

VertexSubset::VertexSubset(int universe) : universe_(universe) {
  if (universe < 0) throw ValidationError("vertex subset: negative universe size");
  words_.assign(word_count(universe), 0);
}

VertexSubset VertexSubset::from_mask(int universe, Mask m) {
  VertexSubset s(universe);
  if (universe < 64 && (m >> universe) != 0) {
    throw std::out_of_range("vertex subset: mask has bits beyond universe " +
                            std::to_string(universe));
  }
  if (universe > 0) s.words_[0] = m;
  return s;
}

VertexSubset VertexSubset::from_members(int universe, std::span<const int> members) {
  VertexSubset s(universe);
  for (int v : members) s.insert(v);
  return s;
}

VertexSubset VertexSubset::full(int universe) {
  VertexSubset s(universe);
  for (int v = 0; v < universe; ++v) s.insert(v);
  return s;
}

void VertexSubset::check_index(int v) const {
  if (v < 0 || v >= universe_) {
    throw std::out_of_range("vertex " + std::to_string(v) + " outside {0.." +
                            std::to_string(universe_ - 1) + "}");
  }
}

bool VertexSubset::contains(int v) const {
  check_index(v);
  return (words_[v / kWordBits] >> (v % kWordBits)) & 1U;
}

void VertexSubset::insert(int v) {
  check_index(v);
  words_[v / kWordBits] |= std::uint64_t{1} << (v % kWordBits);
}

void VertexSubset::erase(int v) {
  check_index(v);
  words_[v / kWordBits] &= ~(std::uint64_t{1} << (v % kWordBits));
}

int VertexSubset::count() const noexcept {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

std::vector<int> VertexSubset::members() const {
  std::vector<int> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word) {
      out.push_back(static_cast<int>(w) * kWordBits + std::countr_zero(word));
      word &= word - 1;
    }
  }
  return out;
}

Mask VertexSubset::mask() const {
  if (universe_ > kMaxMaskVertices) {
    throw std::overflow_error("vertex subset over " + std::to_string(universe_) +
                              " vertices does not fit a single word");
  }
  return words_.empty() ? 0 : words_[0];
}

VertexSubset VertexSubset::complement() const {
  VertexSubset out(universe_);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] = ~words_[w];
  if (universe_ % kWordBits != 0 && !out.words_.empty()) {
    out.words_.back() &= (std::uint64_t{1} << (universe_ % kWordBits)) - 1;
  }
  return out;
}

bool VertexSubset::is_subset_of(const VertexSubset& other) const {
  if (other.universe_ != universe_) return false;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w] & ~other.words_[w]) return false;
  }
  return true;
}

std::string VertexSubset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (int v : members()) {
    if (!first) out += ",";
    out += std::to_string(v);
    first = false;
  }
  return out + "}";
}

}  // namespace tiltcut
