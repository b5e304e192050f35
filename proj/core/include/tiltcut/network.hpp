#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tiltcut/subset.hpp"

namespace tiltcut {

struct Edge {
  int u = 0;
  int v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using Point = std::vector<double>;

/// Undirected simple graph with a nonnegative field h_i on every vertex.
///
/// Edges are stored normalized (u < v) and sorted. The optional positions
/// place each vertex in R^d for the embeddable families. Networks are
/// immutable once built; the `with_*` helpers return modified copies.
class Network {
 public:
  Network() = default;
  Network(int n, std::vector<Edge> edges, std::vector<double> fields = {},
          std::vector<Point> positions = {});

  int size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

  std::span<const int> neighbors(int v) const;
  int degree(int v) const;
  int max_degree() const noexcept;
  bool has_edge(int u, int v) const;

  double field(int v) const;
  const std::vector<double>& fields() const noexcept { return fields_; }
  double max_field() const noexcept;
  double min_field() const noexcept;

  bool has_positions() const noexcept { return !positions_.empty(); }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  int dimension() const noexcept;

  /// Neighbor set of v as a word mask; only valid when size() <= 64.
  Mask neighbor_mask(int v) const;

  Network with_fields(std::vector<double> fields) const;
  Network with_uniform_field(double h) const;
  Network with_positions(std::vector<Point> positions) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> fields_;
  std::vector<Point> positions_;
  std::vector<int> adj_offsets_;
  std::vector<int> adj_;
  std::vector<Mask> nbr_masks_;
};

/// 2x2 coordination game payoffs: (+,+) -> a, (-,-) -> b, off-diagonal c, d.
struct PayoffMatrix {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// Number of edges with exactly one endpoint in S.
int cut_value(const Network& g, const VertexSubset& s);

/// |S|_h, summed in increasing vertex order.
double weighted_size(const Network& g, const VertexSubset& s);

/// Ising energy H(x) = -sum_{(i,j) in E} x_i x_j - sum_i h_i x_i with x_i = +1 iff i in S.
double energy(const Network& g, const VertexSubset& s);

/// rho = (a-d-b+c)/(a-d+b-c); throws unless a > d, b > c and a - b > d - c.
double risk_dominance_ratio(const PayoffMatrix& p);

/// Fields h_i = rho * deg(i) induced by the payoff matrix.
std::vector<double> fields_from_payoffs(const PayoffMatrix& p, const Network& g);

/// h^F_i = h_i + |{neighbors of i outside F}| for i in F, listed in increasing vertex order.
std::vector<double> tilted_fields(const Network& g, const VertexSubset& f);

struct InducedSubgraph {
  Network graph;
  /// original_vertex[k] is the vertex of the parent graph relabeled to k.
  std::vector<int> original_vertex;
};

/// Subgraph induced by F, carrying the tilted fields h^F. Throws on empty F.
InducedSubgraph induced_subgraph(const Network& g, const VertexSubset& f);

bool is_connected(const Network& g);

/// FNV-1a hash over (n, edges, fields); stable across runs and platforms.
std::uint64_t network_hash(const Network& g);

}  // namespace tiltcut
