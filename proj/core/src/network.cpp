#include "tiltcut/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "tiltcut/error.hpp"

namespace tiltcut {

Network::Network(int n, std::vector<Edge> edges, std::vector<double> fields,
                 std::vector<Point> positions)
    : n_(n), edges_(std::move(edges)), fields_(std::move(fields)), positions_(std::move(positions)) {
  if (n_ < 0) throw ValidationError("network: negative vertex count");
  for (auto& e : edges_) {
    if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
      throw ValidationError("network: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                            ") out of range for n=" + std::to_string(n_));
    }
    if (e.u == e.v) throw ValidationError("network: self-loop at " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end()) {
    throw ValidationError("network: duplicate edge (" + std::to_string(dup->u) + "," +
                          std::to_string(dup->v) + ")");
  }
  if (fields_.empty()) fields_.assign(n_, 0.0);
  if (static_cast<int>(fields_.size()) != n_) {
    throw ValidationError("network: expected " + std::to_string(n_) + " fields, got " +
                          std::to_string(fields_.size()));
  }
  for (int i = 0; i < n_; ++i) {
    if (!std::isfinite(fields_[i]) || fields_[i] < 0.0) {
      throw ValidationError("network: field h_" + std::to_string(i) + " must be finite and >= 0");
    }
  }
  if (!positions_.empty()) {
    if (static_cast<int>(positions_.size()) != n_) {
      throw ValidationError("network: positions must cover every vertex");
    }
    for (const auto& p : positions_) {
      if (p.size() != positions_.front().size() || p.empty()) {
        throw ValidationError("network: positions must share one positive dimension");
      }
    }
  }

  std::vector<int> deg(n_, 0);
  for (const auto& e : edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  adj_offsets_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) adj_offsets_[i + 1] = adj_offsets_[i] + deg[i];
  adj_.assign(adj_offsets_[n_], 0);
  std::vector<int> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (const auto& e : edges_) {
    adj_[fill[e.u]++] = e.v;
    adj_[fill[e.v]++] = e.u;
  }
  for (int i = 0; i < n_; ++i) {
    std::sort(adj_.begin() + adj_offsets_[i], adj_.begin() + adj_offsets_[i + 1]);
  }
  if (n_ <= kMaxMaskVertices) {
    nbr_masks_.assign(n_, 0);
    for (const auto& e : edges_) {
      nbr_masks_[e.u] |= bit(e.v);
      nbr_masks_[e.v] |= bit(e.u);
    }
  }
}

std::span<const int> Network::neighbors(int v) const {
  return {adj_.data() + adj_offsets_.at(v), adj_.data() + adj_offsets_.at(v + 1)};
}

int Network::degree(int v) const { return adj_offsets_.at(v + 1) - adj_offsets_.at(v); }

int Network::max_degree() const noexcept {
  int best = 0;
  for (int i = 0; i < n_; ++i) best = std::max(best, adj_offsets_[i + 1] - adj_offsets_[i]);
  return best;
}

bool Network::has_edge(int u, int v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

double Network::field(int v) const { return fields_.at(v); }

double Network::max_field() const noexcept {
  return fields_.empty() ? 0.0 : *std::max_element(fields_.begin(), fields_.end());
}

double Network::min_field() const noexcept {
  return fields_.empty() ? 0.0 : *std::min_element(fields_.begin(), fields_.end());
}

int Network::dimension() const noexcept {
  return positions_.empty() ? 0 : static_cast<int>(positions_.front().size());
}

Mask Network::neighbor_mask(int v) const {
  if (n_ > kMaxMaskVertices) {
    throw std::overflow_error("neighbor masks need n <= 64, graph has " + std::to_string(n_));
  }
  return nbr_masks_.at(v);
}

Network Network::with_fields(std::vector<double> fields) const {
  return Network(n_, edges_, std::move(fields), positions_);
}

Network Network::with_uniform_field(double h) const {
  return with_fields(std::vector<double>(n_, h));
}

Network Network::with_positions(std::vector<Point> positions) const {
  return Network(n_, edges_, fields_, std::move(positions));
}

namespace {

void require_universe(const Network& g, const VertexSubset& s) {
  if (s.universe() != g.size()) {
    throw std::out_of_range("subset over " + std::to_string(s.universe()) +
                            " vertices used with a graph on " + std::to_string(g.size()));
  }
}

}  // namespace

int cut_value(const Network& g, const VertexSubset& s) {
  require_universe(g, s);
  int cut = 0;
  for (const auto& e : g.edges()) {
    if (s.contains(e.u) != s.contains(e.v)) ++cut;
  }
  return cut;
}

double weighted_size(const Network& g, const VertexSubset& s) {
  require_universe(g, s);
  double total = 0.0;
  for (int v : s.members()) total += g.field(v);
  return total;
}

double energy(const Network& g, const VertexSubset& s) {
  require_universe(g, s);
  double h = 0.0;
  for (const auto& e : g.edges()) h -= (s.contains(e.u) == s.contains(e.v)) ? 1.0 : -1.0;
  for (int i = 0; i < g.size(); ++i) h -= g.field(i) * (s.contains(i) ? 1.0 : -1.0);
  return h;
}

double risk_dominance_ratio(const PayoffMatrix& p) {
  if (!(p.a > p.d) || !(p.b > p.c)) {
    throw ValidationError("payoffs are not a coordination game (need a > d and b > c)");
  }
  if (!(p.a - p.b > p.d - p.c)) {
    throw ValidationError("+1 is not risk dominant (need a - b > d - c)");
  }
  return (p.a - p.d - p.b + p.c) / (p.a - p.d + p.b - p.c);
}

std::vector<double> fields_from_payoffs(const PayoffMatrix& p, const Network& g) {
  const double rho = risk_dominance_ratio(p);
  std::vector<double> h(g.size());
  for (int i = 0; i < g.size(); ++i) h[i] = rho * g.degree(i);
  return h;
}

std::vector<double> tilted_fields(const Network& g, const VertexSubset& f) {
  require_universe(g, f);
  std::vector<double> out;
  for (int i : f.members()) {
    int outside = 0;
    for (int j : g.neighbors(i)) {
      if (!f.contains(j)) ++outside;
    }
    out.push_back(g.field(i) + outside);
  }
  return out;
}

InducedSubgraph induced_subgraph(const Network& g, const VertexSubset& f) {
  require_universe(g, f);
  const auto members = f.members();
  if (members.empty()) throw ValidationError("induced subgraph of the empty set");
  std::vector<int> relabel(g.size(), -1);
  for (std::size_t k = 0; k < members.size(); ++k) relabel[members[k]] = static_cast<int>(k);
  std::vector<Edge> edges;
  for (const auto& e : g.edges()) {
    if (relabel[e.u] >= 0 && relabel[e.v] >= 0) edges.push_back({relabel[e.u], relabel[e.v]});
  }
  std::vector<Point> positions;
  if (g.has_positions()) {
    for (int v : members) positions.push_back(g.positions()[v]);
  }
  return {Network(static_cast<int>(members.size()), std::move(edges), tilted_fields(g, f),
                  std::move(positions)),
          members};
}

bool is_connected(const Network& g) {
  if (g.size() <= 1) return true;
  std::vector<char> seen(g.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.size();
}

std::uint64_t network_hash(const Network& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      h ^= (x >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(g.size()));
  for (const auto& e : g.edges()) {
    mix(static_cast<std::uint64_t>(e.u));
    mix(static_cast<std::uint64_t>(e.v));
  }
  for (double x : g.fields()) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    mix(bits);
  }
  return h;
}

}  // namespace tiltcut
