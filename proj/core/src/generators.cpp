#include "tiltcut/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "tiltcut/error.hpp"

namespace tiltcut {

std::string to_string(Family f) {
  switch (f) {
    case Family::grid: return "grid";
    case Family::finite_range: return "finite_range";
    case Family::small_world: return "small_world";
    case Family::random_regular: return "random_regular";
    case Family::complete: return "complete";
    case Family::cycle_power: return "cycle_power";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::grid, Family::finite_range, Family::small_world, Family::random_regular,
                   Family::complete, Family::cycle_power}) {
    if (to_string(f) == name) return f;
  }
  throw ValidationError("unknown graph family '" + name + "'");
}

namespace {

long long checked_power(int base, int exp, long long cap) {
  long long total = 1;
  for (int k = 0; k < exp; ++k) {
    total *= base;
    if (total > cap) {
      throw CapExceeded("grid with side " + std::to_string(base) + " in dimension " +
                        std::to_string(exp) + " exceeds the vertex cap " + std::to_string(cap));
    }
  }
  return total;
}

std::vector<int> grid_coords(int index, int n_side, int d) {
  std::vector<int> c(d);
  for (int k = 0; k < d; ++k) {
    c[k] = index % n_side;
    index /= n_side;
  }
  return c;
}

std::vector<Edge> grid_edges(int n_side, int d, int n) {
  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v) {
    int stride = 1;
    int rest = v;
    for (int k = 0; k < d; ++k) {
      if (rest % n_side < n_side - 1) edges.push_back({v, v + stride});
      rest /= n_side;
      stride *= n_side;
    }
  }
  return edges;
}

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

}  // namespace

Network grid(int n_side, int d, long long vertex_cap) {
  if (n_side < 2) throw ValidationError("grid: n_side must be >= 2");
  if (d < 1) throw ValidationError("grid: d must be >= 1");
  const int n = static_cast<int>(checked_power(n_side, d, vertex_cap));
  std::vector<Point> positions(n);
  for (int v = 0; v < n; ++v) {
    const auto c = grid_coords(v, n_side, d);
    positions[v].assign(c.begin(), c.end());
  }
  return Network(n, grid_edges(n_side, d, n), {}, std::move(positions));
}

std::optional<DensityViolation> find_density_violation(const std::vector<Point>& positions) {
  if (positions.empty()) return std::nullopt;
  const std::size_t d = positions.front().size();
  // A violating cube can be slid until each lower face touches a point and then
  // shrunk to the extent of its points (but not below side 1), so it suffices to
  // try corners built from point coordinates and sides equal to point extents.
  std::vector<std::vector<double>> axis(d);
  for (std::size_t k = 0; k < d; ++k) {
    for (const auto& p : positions) axis[k].push_back(p[k]);
    std::sort(axis[k].begin(), axis[k].end());
    axis[k].erase(std::unique(axis[k].begin(), axis[k].end()), axis[k].end());
  }
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> need;
  Point corner(d);
  while (true) {
    for (std::size_t k = 0; k < d; ++k) corner[k] = axis[k][idx[k]];
    need.clear();
    for (const auto& p : positions) {
      double extent = 0.0;
      bool inside = true;
      for (std::size_t k = 0; k < d && inside; ++k) {
        if (p[k] < corner[k]) inside = false;
        extent = std::max(extent, p[k] - corner[k]);
      }
      if (inside) need.push_back(extent);
    }
    std::sort(need.begin(), need.end());
    for (std::size_t j = 0; j < need.size(); ++j) {
      if (j + 1 < need.size() && need[j + 1] == need[j]) continue;
      const double side = std::max(1.0, need[j]);
      const int count = static_cast<int>(j + 1);
      // Relative slack absorbs round-off in lattice coordinates, where the
      // bound is met with equality.
      if (count > 2.0 * std::pow(side, static_cast<double>(d)) * (1.0 + 1e-9)) {
        return DensityViolation{corner, side, count};
      }
    }
    std::size_t k = 0;
    while (k < d && ++idx[k] == axis[k].size()) idx[k++] = 0;
    if (k == d) break;
  }
  return std::nullopt;
}

Network finite_range(const std::vector<Point>& positions, double K) {
  if (!(K > 0.0) || !std::isfinite(K)) throw ValidationError("finite_range: K must be positive");
  if (auto bad = find_density_violation(positions)) {
    std::string corner;
    for (double x : bad->lower_corner) corner += (corner.empty() ? "" : ",") + std::to_string(x);
    throw ValidationError("finite_range: cube at (" + corner + ") with side " +
                          std::to_string(bad->side) + " holds " + std::to_string(bad->count) +
                          " points, more than twice its volume");
  }
  const int n = static_cast<int>(positions.size());
  const double limit = K * K * (1.0 + 1e-12);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (squared_distance(positions[i], positions[j]) <= limit) edges.push_back({i, j});
    }
  }
  return Network(n, std::move(edges), {}, positions);
}

std::vector<double> small_world_link_law(int n_side, int d, double r, int i) {
  if (n_side < 2 || d < 1) throw ValidationError("small_world: need n_side >= 2 and d >= 1");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("small_world: r must be >= 0");
  const int n = static_cast<int>(checked_power(n_side, d, kDefaultVertexCap));
  if (i < 0 || i >= n) throw std::out_of_range("small_world_link_law: vertex out of range");
  const auto ci = grid_coords(i, n_side, d);
  std::vector<double> law(n, 0.0);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const auto cj = grid_coords(j, n_side, d);
    double d2 = 0.0;
    for (int k = 0; k < d; ++k) d2 += double(ci[k] - cj[k]) * double(ci[k] - cj[k]);
    law[j] = std::pow(d2, -0.5 * r);
    total += law[j];
  }
  for (double& p : law) p /= total;
  return law;
}

int sample_from_law(const std::vector<double>& cumulative, Rng& rng) {
  if (cumulative.empty() || !(cumulative.back() > 0.0)) {
    throw ValidationError("sample_from_law: empty or zero-mass law");
  }
  const double u = uniform01(rng) * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<int>(it - cumulative.begin());
}

Network small_world(int n_side, int d, int k, double r, std::uint64_t seed) {
  if (k < 0) throw ValidationError("small_world: k must be >= 0");
  Network base = grid(n_side, d);
  if (k == 0) return base;
  const int n = base.size();
  std::set<Edge> edges(base.edges().begin(), base.edges().end());
  Rng rng(derive_seed(seed, 0));
  std::vector<double> cumulative(n);
  for (int i = 0; i < n; ++i) {
    const auto law = small_world_link_law(n_side, d, r, i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) cumulative[j] = (acc += law[j]);
    for (int draw = 0; draw < k; ++draw) {
      const int j = sample_from_law(cumulative, rng);
      edges.insert({std::min(i, j), std::max(i, j)});
    }
  }
  return Network(n, {edges.begin(), edges.end()}, {}, base.positions());
}

Network random_regular(int n, int k, std::uint64_t seed, int max_retries) {
  if (n < 1 || k < 0 || k >= n) throw ValidationError("random_regular: need 0 <= k < n");
  if ((static_cast<long long>(n) * k) % 2 != 0) {
    throw ValidationError("random_regular: n*k must be even");
  }
  Rng rng(derive_seed(seed, 0));
  std::vector<int> stubs(static_cast<std::size_t>(n) * k);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    for (std::size_t s = 0; s < stubs.size(); ++s) stubs[s] = static_cast<int>(s) / k;
    for (std::size_t s = stubs.size(); s > 1; --s) {
      std::swap(stubs[s - 1], stubs[uniform_index(rng, s)]);
    }
    std::set<Edge> edges;
    bool ok = true;
    for (std::size_t s = 0; s < stubs.size() && ok; s += 2) {
      const int u = std::min(stubs[s], stubs[s + 1]);
      const int v = std::max(stubs[s], stubs[s + 1]);
      ok = u != v && edges.insert({u, v}).second;
    }
    if (ok) return Network(n, {edges.begin(), edges.end()});
  }
  throw GenerationError("random_regular: no simple pairing for n=" + std::to_string(n) +
                        ", k=" + std::to_string(k) + " after " + std::to_string(max_retries) +
                        " attempts");
}

Network complete_graph(int n) {
  if (n < 1) throw ValidationError("complete_graph: n must be >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  }
  return Network(n, std::move(edges));
}

Network cycle_power(int n, int k) {
  if (k < 1) throw ValidationError("cycle_power: k must be >= 1");
  if (n <= 2 * k) throw ValidationError("cycle_power: need n > 2k");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int s = 1; s <= k; ++s) {
      const int j = (i + s) % n;
      edges.push_back({std::min(i, j), std::max(i, j)});
    }
  }
  return Network(n, std::move(edges));
}

Network generate(const FamilySpec& spec) {
  switch (spec.family) {
    case Family::grid: return grid(spec.n_side, spec.d);
    case Family::small_world: return small_world(spec.n_side, spec.d, spec.k, spec.r, spec.seed);
    case Family::random_regular: return random_regular(spec.n, spec.k, spec.seed);
    case Family::complete: return complete_graph(spec.n);
    case Family::cycle_power: return cycle_power(spec.n, spec.k);
    case Family::finite_range: {
      const Network lattice = grid(spec.n_side, spec.d);
      const double spacing = std::pow(2.0, 1.0 - 1.0 / spec.d);
      Rng rng(derive_seed(spec.seed, 0));
      std::vector<Point> kept;
      for (const auto& p : lattice.positions()) {
        if (uniform01(rng) < 0.5) {
          Point q = p;
          for (double& x : q) x *= spacing;
          kept.push_back(std::move(q));
        }
      }
      return finite_range(kept, spec.K);
    }
  }
  throw ValidationError("generate: unknown family");
}

std::vector<double> expansion_profile(const Network& g, ExpansionMode mode, int size_cap,
                                      std::uint64_t budget) {
  const int n = g.size();
  if (n > kMaxMaskVertices) throw CapExceeded("expansion_profile: more than 64 vertices");
  size_cap = std::min(size_cap, n);
  if (size_cap < 1) throw ValidationError("expansion_profile: size_cap must be >= 1");
  double subsets = 0.0;
  double binom = 1.0;
  for (int s = 1; s <= size_cap; ++s) {
    binom = binom * (n - s + 1) / s;
    subsets += binom;
  }
  if (subsets > static_cast<double>(budget)) {
    throw CapExceeded("expansion_profile: " + std::to_string(subsets) +
                      " subsets exceed the budget");
  }
  std::vector<Mask> nbr(n);
  for (int v = 0; v < n; ++v) nbr[v] = g.neighbor_mask(v);
  std::vector<double> profile(size_cap + 1, 0.0);
  const Mask all = full_mask(n);
  for (int s = 1; s <= size_cap; ++s) {
    int best = -1;
    // Gosper's hack: next mask with the same popcount.
    for (Mask m = full_mask(s); m <= all && m != 0;) {
      int boundary = 0;
      if (mode == ExpansionMode::edge) {
        for (Mask rest = m; rest; rest &= rest - 1) {
          boundary += popcount(nbr[std::countr_zero(rest)] & ~m);
        }
      } else {
        Mask reach = 0;
        for (Mask rest = m; rest; rest &= rest - 1) reach |= nbr[std::countr_zero(rest)];
        boundary = popcount(reach & ~m);
      }
      if (best < 0 || boundary < best) best = boundary;
      if (s == n) break;
      const Mask c = m & -m;
      const Mask r = m + c;
      if (r == 0) break;
      m = (((r ^ m) >> 2) / c) | r;
    }
    profile[s] = static_cast<double>(best) / s;
  }
  return profile;
}

}  // namespace tiltcut
