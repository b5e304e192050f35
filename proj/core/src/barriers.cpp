#include "tiltcut/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "tiltcut/error.hpp"
#include "tiltcut/parallel.hpp"

namespace tiltcut {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_cap(const Network& g, int cap, const char* what) {
  if (g.size() < 1) throw ValidationError(std::string(what) + ": empty graph");
  if (g.size() > cap || g.size() > kMaxMaskVertices) {
    throw CapExceeded(std::string(what) + ": n = " + std::to_string(g.size()) +
                      " exceeds the exact cap " + std::to_string(cap));
  }
}

/// w(S) for every mask. Field sums are built by adding the highest member
/// last, so each entry equals weighted_size summed in increasing vertex order.
std::vector<double> weight_table(const Network& g) {
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  std::vector<int> cut(states, 0);
  std::vector<double> hsum(states, 0.0);
  std::vector<double> w(states, 0.0);
  for (Mask s = 1; s < states; ++s) {
    const int v = 63 - std::countl_zero(s);
    const Mask rest = s & ~bit(v);
    cut[s] = cut[rest] + g.degree(v) - 2 * popcount(g.neighbor_mask(v) & rest);
    hsum[s] = hsum[rest] + g.field(v);
    w[s] = cut[s] - hsum[s];
  }
  return w;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n), members(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) members[i] = {i};
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  std::vector<std::size_t> parent;
  std::vector<std::vector<std::size_t>> members;
};

}  // namespace

double tilted_weight(const Network& g, Mask s) {
  if (g.size() > kMaxMaskVertices || (s & ~full_mask(g.size())) != 0) {
    throw std::out_of_range("tilted_weight: mask outside the vertex set");
  }
  int cut = 0;
  double hsum = 0.0;
  for (int v = 0; v < g.size(); ++v) {
    if (!(s & bit(v))) continue;
    cut += popcount(g.neighbor_mask(v) & ~s);
    hsum += g.field(v);
  }
  return cut - hsum;
}

double prefix_width(const Network& g, std::span<const int> order) {
  const int n = g.size();
  if (static_cast<int>(order.size()) != n || n == 0) {
    throw ValidationError("prefix_width: ordering must list every vertex once");
  }
  std::vector<char> seen(n, 0);
  for (int v : order) {
    if (v < 0 || v >= n || seen[v]) throw ValidationError("prefix_width: not a permutation");
    seen[v] = 1;
  }
  double best = -kInf;
  if (n <= kMaxMaskVertices) {
    Mask s = 0;
    for (int v : order) {
      s |= bit(v);
      best = std::max(best, tilted_weight(g, s));
    }
    return best;
  }
  std::vector<int> inside(n, 0);
  std::fill(seen.begin(), seen.end(), 0);
  long long cut = 0;
  double hsum = 0.0;
  for (int v : order) {
    cut += g.degree(v) - 2 * inside[v];
    for (int u : g.neighbors(v)) ++inside[u];
    hsum += g.field(v);
    best = std::max(best, static_cast<double>(cut) - hsum);
  }
  return best;
}

Ordering tilted_cutwidth(const Network& g, int cap) {
  require_cap(g, cap, "tilted_cutwidth");
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  const auto w = weight_table(g);
  std::vector<double> best(states);
  best[0] = -kInf;
  for (Mask s = 1; s < states; ++s) {
    double inner = kInf;
    for (Mask rest = s; rest; rest &= rest - 1) inner = std::min(inner, best[s & ~(rest & -rest)]);
    best[s] = std::max(w[s], inner);
  }
  Ordering out;
  out.value = best[states - 1];
  out.order.resize(n);
  Mask s = states - 1;
  for (int t = n - 1; t >= 0; --t) {
    double inner = kInf;
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if ((s & bit(v)) && best[s & ~bit(v)] < inner) {
        inner = best[s & ~bit(v)];
        pick = v;
      }
    }
    out.order[t] = pick;
    s &= ~bit(pick);
  }
  return out;
}

Ordering heuristic_ordering(const Network& g) {
  const int n = g.size();
  if (n == 0) throw ValidationError("heuristic_ordering: empty graph");
  std::vector<int> inside(n, 0);
  std::vector<char> used(n, 0);
  long long cut = 0;
  double hsum = 0.0;
  Ordering out;
  for (int t = 0; t < n; ++t) {
    int pick = -1;
    double pick_value = kInf;
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      const double value = static_cast<double>(cut + g.degree(v) - 2 * inside[v]) - (hsum + g.field(v));
      if (value < pick_value) {
        pick_value = value;
        pick = v;
      }
    }
    used[pick] = 1;
    cut += g.degree(pick) - 2 * inside[pick];
    hsum += g.field(pick);
    for (int u : g.neighbors(pick)) ++inside[u];
    out.order.push_back(pick);
  }
  out.value = prefix_width(g, out.order);
  return out;
}

std::vector<double> energy_table(const Network& g) {
  require_cap(g, kMaxMaskVertices - 32, "energy_table");
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> e(states);
  for (Mask s = 0; s < states; ++s) {
    // Same operation order as energy(), so both agree bit for bit.
    double h = 0.0;
    for (const auto& edge : g.edges()) {
      h -= (((s >> edge.u) & 1) == ((s >> edge.v) & 1)) ? 1.0 : -1.0;
    }
    for (int i = 0; i < n; ++i) h -= g.field(i) * ((s & bit(i)) ? 1.0 : -1.0);
    e[s] = h;
  }
  return e;
}

GeneralBarrier general_barrier(const Network& g, int cap) {
  require_cap(g, cap, "general_barrier");
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  const Mask target = full_mask(n);
  GeneralBarrier out;
  out.energies = energy_table(g);
  out.connect_level.assign(states, kInf);
  std::vector<std::size_t> order(states);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.energies[a] < out.energies[b]; });
  DisjointSets sets(states);
  std::vector<char> processed(states, 0);
  std::vector<char> has_target(states, 0);
  has_target[target] = 1;
  for (std::size_t z : order) {
    processed[z] = 1;
    const double level = out.energies[z];
    for (int i = 0; i < n; ++i) {
      const std::size_t y = z ^ bit(i);
      if (!processed[y]) continue;
      std::size_t a = sets.find(z), b = sets.find(y);
      if (a == b) continue;
      if (sets.members[a].size() < sets.members[b].size()) std::swap(a, b);
      if (has_target[a] != has_target[b]) {
        for (std::size_t x : sets.members[has_target[a] ? b : a]) out.connect_level[x] = level;
      }
      sets.parent[b] = a;
      sets.members[a].insert(sets.members[a].end(), sets.members[b].begin(), sets.members[b].end());
      sets.members[b].clear();
      sets.members[b].shrink_to_fit();
      has_target[a] = has_target[a] || has_target[b];
    }
    if (z == target) {
      for (std::size_t x : sets.members[sets.find(z)]) out.connect_level[x] = level;
    }
  }
  out.value = -kInf;
  for (Mask z = 0; z < target; ++z) {
    const double v = out.connect_level[z] - out.energies[z];
    if (v > out.value) {
      out.value = v;
      out.worst_start = z;
    }
  }
  return out;
}

double monotone_barrier(const Network& g, Mask start, const std::vector<double>& energies) {
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  if (energies.size() != states || (start & ~full_mask(n)) != 0) {
    throw ValidationError("monotone_barrier: energies or start do not match the graph");
  }
  std::vector<double> best(states, kInf);
  best[start] = energies[start];
  for (Mask s = 0; s < states; ++s) {
    if ((s & start) != start || s == start) continue;
    double inner = kInf;
    for (Mask rest = s & ~start; rest; rest &= rest - 1) {
      inner = std::min(inner, best[s & ~(rest & -rest)]);
    }
    best[s] = std::max(energies[s], inner);
  }
  return best[states - 1] - energies[start];
}

MonotonePathCheck monotone_path_optimality_check(const Network& g, int cap) {
  require_cap(g, cap, "monotone_path_optimality_check");
  const auto barrier = general_barrier(g, cap);
  return monotone_path_optimality_check(g, barrier.worst_start, barrier);
}

MonotonePathCheck monotone_path_optimality_check(const Network& g, Mask start,
                                                 const GeneralBarrier& barrier) {
  MonotonePathCheck check;
  check.start = start;
  check.unrestricted = barrier.connect_level.at(start) - barrier.energies.at(start);
  check.monotone = monotone_barrier(g, start, barrier.energies);
  check.equal = std::abs(check.monotone - check.unrestricted) <= kTieTolerance;
  return check;
}

namespace {

/// Closure of {} under removals and under additions with pair value < c.
std::vector<char> closure_below(int n, const std::vector<double>& w, double c) {
  const std::size_t states = std::size_t{1} << n;
  std::vector<char> in(states, 0);
  std::vector<Mask> stack{0};
  in[0] = 1;
  while (!stack.empty()) {
    const Mask s = stack.back();
    stack.pop_back();
    for (int i = 0; i < n; ++i) {
      const Mask y = s ^ bit(i);
      if (in[y]) continue;
      if ((s & bit(i)) || std::max(w[s], w[y]) < c) {
        in[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return in;
}

}  // namespace

TiltedCut tilted_cut(const Network& g, int cap) {
  require_cap(g, cap, "tilted_cut");
  const int n = g.size();
  const std::size_t states = std::size_t{1} << n;
  const Mask target = full_mask(n);
  const auto w = weight_table(g);
  std::vector<double> candidates;
  candidates.reserve(states * n / 2);
  for (Mask s = 0; s < states; ++s) {
    for (int i = 0; i < n; ++i) {
      if (!(s & bit(i))) candidates.push_back(std::max(w[s], w[s | bit(i)]));
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  // Reachability of V only grows with c; the smallest candidate never reaches it.
  std::size_t lo = 0, hi = candidates.size();
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (closure_below(n, w, candidates[mid])[target]) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  TiltedCut out;
  out.value = candidates[lo];
  const auto family = closure_below(n, w, out.value);
  for (Mask s = 0; s < states; ++s) {
    if (!family[s]) continue;
    ++out.family_size;
    bool maximal = true;
    for (int i = 0; i < n && maximal; ++i) {
      if (!(s & bit(i)) && family[s | bit(i)]) maximal = false;
    }
    if (maximal) out.antichain.push_back(s);
  }
  return out;
}

BarrierReport gamma_star(const Network& g, const GammaStarOptions& options) {
  if (g.size() > options.cap) {
    throw CapExceeded("gamma_star: n = " + std::to_string(g.size()) + " exceeds the cap " +
                      std::to_string(options.cap) +
                      "; raise the cap or scan connected subgraphs only");
  }
  require_cap(g, options.cap, "gamma_star");
  const int n = g.size();
  const std::size_t subsets = (std::size_t{1} << n) - 1;
  BarrierReport rep;
  rep.n = n;
  rep.heuristic = options.connected_only;

  struct Slot {
    bool used = false;
    double gamma = -kInf;
    double delta = 0.0;
    std::vector<int> order;
  };
  std::vector<Slot> slots(subsets);
  parallel_for(subsets, options.workers, [&](std::size_t k) {
    const Mask f = static_cast<Mask>(k + 1);
    const auto sub = induced_subgraph(g, VertexSubset::from_mask(n, f));
    if (options.connected_only && !is_connected(sub.graph)) return;
    Slot& slot = slots[k];
    slot.used = true;
    auto ord = tilted_cutwidth(sub.graph, options.cap);
    slot.gamma = ord.value;
    for (int& v : ord.order) v = sub.original_vertex[v];
    slot.order = std::move(ord.order);
    if (options.verify) slot.delta = tilted_cut(sub.graph, options.cap).value;
  });

  rep.gamma_star = -kInf;
  rep.max_delta = -kInf;
  bool per_f_ok = true;
  for (std::size_t k = 0; k < subsets; ++k) {
    const Slot& slot = slots[k];
    if (!slot.used) continue;
    const Mask f = static_cast<Mask>(k + 1);
    if (slot.gamma > rep.gamma_star) {
      rep.gamma_star = slot.gamma;
      rep.f_star = f;
      rep.f_star_ordering = slot.order;
    }
    if (f == full_mask(n)) {
      rep.gamma = slot.gamma;
      rep.ordering = slot.order;
    }
    if (options.verify) {
      rep.max_delta = std::max(rep.max_delta, slot.delta);
      if (slot.delta > std::max(slot.gamma, 0.0) + kTieTolerance) per_f_ok = false;
      rep.per_subgraph.push_back({f, slot.gamma, slot.delta});
    }
  }
  if (!slots.back().used) {
    const auto ord = tilted_cutwidth(g, options.cap);
    rep.gamma = ord.value;
    rep.ordering = ord.order;
  }
  if (n <= kBarrierCap) {
    const auto cut = tilted_cut(g, kBarrierCap);
    rep.delta = cut.value;
    rep.omega_witness = cut.antichain;
  }
  if (options.verify) {
    rep.verified = true;
    rep.duality_holds =
        per_f_ok && std::abs(rep.max_delta - std::max(rep.gamma_star, 0.0)) <= kTieTolerance;
  }
  if (options.with_general_barrier && n <= kBarrierCap) {
    const auto gb = general_barrier(g, kBarrierCap);
    rep.general_barrier = gb.value;
    rep.worst_start = gb.worst_start;
    rep.has_general_barrier = true;
  }
  return rep;
}

}  // namespace tiltcut
