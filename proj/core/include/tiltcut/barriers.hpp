#pragma once

#include <span>
#include <vector>

#include "tiltcut/network.hpp"

namespace tiltcut {

/// Tolerance for equality assertions between dual barrier quantities.
inline constexpr double kTieTolerance = 1e-9;

inline constexpr int kCutwidthCap = 20;
inline constexpr int kBarrierCap = 14;
inline constexpr int kGammaStarCap = 12;
inline constexpr int kMonotoneCheckCap = 10;

/// w(S) = cut(S, V \ S) - |S|_h, with |S|_h summed in increasing vertex order.
double tilted_weight(const Network& g, Mask s);

/// max over t = 1..n of w({order[0], ..., order[t-1]}); order must be a permutation.
double prefix_width(const Network& g, std::span<const int> order);

struct Ordering {
  double value = 0.0;
  std::vector<int> order;
};

/// Exact tilted cutwidth by the subset recursion
///   g(S) = max(w(S), min_{i in S} g(S \ {i})),  g({}) = -inf,
/// with the ordering recovered by backtracking (ties to the smallest vertex).
/// The prefix t = 0 is not part of the max, so the value may be negative.
/// Throws CapExceeded above `cap` vertices.
Ordering tilted_cutwidth(const Network& g, int cap = kCutwidthCap);

/// Greedy prefix growth: repeatedly append the vertex minimizing w of the new
/// prefix (ties to the smallest index). An upper bound on the tilted cutwidth;
/// no approximation guarantee.
Ordering heuristic_ordering(const Network& g);

struct GeneralBarrier {
  /// max_z [m(z) - H(z)] over z != V, where m(z) is the lowest energy level at
  /// which z connects to the all-(+1) state through single flips.
  double value = 0.0;
  Mask worst_start = 0;
  /// m(z) for every state z.
  std::vector<double> connect_level;
  std::vector<double> energies;
};

/// Energy barrier of the single-flip landscape by a sorted-energy union-find sweep.
GeneralBarrier general_barrier(const Network& g, int cap = kBarrierCap);

/// All 2^n energies H(S), indexed by mask.
std::vector<double> energy_table(const Network& g);

/// min over add-only paths from `start` to V of max_t H(S_t), minus H(start).
double monotone_barrier(const Network& g, Mask start, const std::vector<double>& energies);

struct MonotonePathCheck {
  bool equal = false;
  Mask start = 0;
  double monotone = 0.0;
  double unrestricted = 0.0;
};

/// Compares the best add-only path with the best unrestricted single-flip path
/// from the worst start (or from `start`, when given).
MonotonePathCheck monotone_path_optimality_check(const Network& g, int cap = kMonotoneCheckCap);
MonotonePathCheck monotone_path_optimality_check(const Network& g, Mask start,
                                                 const GeneralBarrier& barrier);

struct TiltedCut {
  double value = 0.0;
  /// Maximal members of the optimal monotone family, in increasing mask order.
  std::vector<Mask> antichain;
  int family_size = 0;
};

/// Tilted cut: the largest threshold c such that V stays outside the closure
/// of {} under removals and under additions whose pair value
/// max(w(S), w(S + i)) is below c. The closure at that threshold is the
/// witness monotone family. Throws CapExceeded above `cap` vertices.
TiltedCut tilted_cut(const Network& g, int cap = kBarrierCap);

struct SubgraphComparison {
  Mask subgraph = 0;
  double gamma = 0.0;
  double delta = 0.0;
};

struct GammaStarOptions {
  int cap = kGammaStarCap;
  /// Also compute the tilted cut of every induced subgraph.
  bool verify = false;
  /// Restrict the scan to connected induced subgraphs (experimental speedup).
  bool connected_only = false;
  /// Compute the general barrier of G (needs n <= kBarrierCap).
  bool with_general_barrier = true;
  unsigned workers = 1;
};

struct BarrierReport {
  int n = 0;
  double gamma = 0.0;
  std::vector<int> ordering;
  double delta = 0.0;
  std::vector<Mask> omega_witness;
  double gamma_star = 0.0;
  Mask f_star = 0;
  /// Ordering of the maximizing subgraph, in original vertex labels.
  std::vector<int> f_star_ordering;
  double general_barrier = 0.0;
  bool has_general_barrier = false;
  Mask worst_start = 0;
  bool verified = false;
  /// max_F Delta(F; h^F), when verified.
  double max_delta = 0.0;
  /// max_F Delta = max(Gamma_*, 0) within kTieTolerance and Delta(F) <= max(Gamma(F), 0) for all F.
  bool duality_holds = false;
  bool heuristic = false;
  std::vector<SubgraphComparison> per_subgraph;
};

/// Gamma_*(G; h) = max over nonempty induced F of Gamma(F; h^F).
BarrierReport gamma_star(const Network& g, const GammaStarOptions& options = {});

}  // namespace tiltcut
