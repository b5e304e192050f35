#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcut/network.hpp"
#include "tiltcut/rng.hpp"

namespace tiltcut {

enum class Family { grid, finite_range, small_world, random_regular, complete, cycle_power };

std::string to_string(Family f);
Family parse_family(const std::string& name);

/// Parameters of one of the supported graph families.
///
/// Only the fields relevant to `family` are read:
///   grid          n_side, d
///   small_world   n_side, d, k (long links per vertex), r (decay exponent)
///   random_regular n, k
///   complete      n
///   cycle_power   n, k
///   finite_range  n_side, d, K: sites of {0..n_side-1}^d scaled by 2^{1-1/d} (so the
///                 density rule holds), each kept independently with probability 1/2
/// Generated networks carry zero fields; attach fields afterwards.
struct FamilySpec {
  Family family = Family::grid;
  int n = 0;
  int n_side = 0;
  int d = 1;
  double K = 1.0;
  int k = 0;
  double r = 0.0;
  std::uint64_t seed = 0;
};

/// Upper bound on generated vertex counts.
inline constexpr long long kDefaultVertexCap = 1LL << 22;

Network generate(const FamilySpec& spec);

/// Nearest-neighbor grid {0..n_side-1}^d, non-periodic, with integer positions.
/// Vertex index = sum_k coord_k * n_side^k.
Network grid(int n_side, int d, long long vertex_cap = kDefaultVertexCap);

struct DensityViolation {
  Point lower_corner;
  double side = 0.0;
  int count = 0;
};

/// Checks that every axis-aligned closed cube of side >= 1 (volume v) holds at
/// most 2v points. Returns the first offending cube, if any.
std::optional<DensityViolation> find_density_violation(const std::vector<Point>& positions);

/// Range-K network: an edge between every pair at Euclidean distance <= K.
/// Throws ValidationError naming the offending cube if the density rule fails.
Network finite_range(const std::vector<Point>& positions, double K);

/// Long-range link law P_i(j) = C_i |x_i - x_j|^{-r} of vertex i on a grid.
/// Entry i is zero; the rest sum to one (C_i is the per-vertex normalization).
std::vector<double> small_world_link_law(int n_side, int d, double r, int i);

/// Samples an index from a probability vector by inverse-CDF lookup.
int sample_from_law(const std::vector<double>& cumulative, Rng& rng);

/// Grid plus k independent long-range draws per vertex; duplicates and draws
/// that coincide with grid edges collapse, so the result is simple.
Network small_world(int n_side, int d, int k, double r, std::uint64_t seed);

/// Pairing-model k-regular graph with full restart on loops/multi-edges.
Network random_regular(int n, int k, std::uint64_t seed, int max_retries = 1000);

Network complete_graph(int n);

/// Vertex i adjacent to i +- 1, ..., i +- k (mod n); requires n > 2k.
Network cycle_power(int n, int k);

enum class ExpansionMode { edge, vertex };

/// profile[s] for s = 1..size_cap is the minimum over |S| = s of
/// cut(S, V \ S)/|S| (edge mode) or |N(S) \ S|/|S| (vertex mode); profile[0] is unused.
/// Throws CapExceeded when the number of subsets exceeds `budget`.
std::vector<double> expansion_profile(const Network& g, ExpansionMode mode, int size_cap,
                                      std::uint64_t budget = 50'000'000);

}  // namespace tiltcut
