#include "tiltcut/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "tiltcut/barriers.hpp"
#include "tiltcut/error.hpp"
#include "tiltcut/generators.hpp"
#include "tiltcut/rng.hpp"

namespace tiltcut {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on the weight window, so that sums like 0.1 + 0.1 + 0.1 still land on 0.3.
constexpr double kWindowSlack = 1e-9;

double window_sum(const std::vector<double>& w, const VertexSubset& s) {
  double total = 0.0;
  for (int v : s.members()) total += w[v];
  return total;
}

double max_degree_ratio(const Network& g) {
  double worst = 0.0;
  for (int i = 0; i < g.size(); ++i) {
    if (g.degree(i) == 0) continue;
    worst = std::max(worst, g.field(i) > 0.0 ? g.degree(i) / g.field(i) : kInf);
  }
  return worst;
}

}  // namespace

DirichletNorms dirichlet_norms(const Network& g, const std::vector<double>& f,
                               const std::vector<double>& w) {
  if (static_cast<int>(f.size()) != g.size() || static_cast<int>(w.size()) != g.size()) {
    throw ValidationError("dirichlet_norms: f and w need one entry per vertex");
  }
  DirichletNorms out;
  for (int i = 0; i < g.size(); ++i) out.weighted += w[i] * f[i] * f[i];
  for (const auto& e : g.edges()) out.gradient += (f[e.u] - f[e.v]) * (f[e.u] - f[e.v]);
  return out;
}

SweepResult cheeger_sweep(const Network& g, const SweepInput& in) {
  const int n = g.size();
  if (static_cast<int>(in.f.size()) != n || static_cast<int>(in.w.size()) != n ||
      in.omega0.universe() != n || in.omega1.universe() != n) {
    throw ValidationError("cheeger_sweep: inputs must cover every vertex");
  }
  double top = 0.0;
  for (double x : in.f) top = std::max(top, std::abs(x));
  for (int i : in.omega1.members()) {
    if (in.f[i] < top) {
      throw ValidationError("cheeger_sweep: hypothesis 1 fails, f is not maximal at vertex " +
                            std::to_string(i));
    }
  }
  for (int i = 0; i < n; ++i) {
    if (!in.omega0.contains(i) && in.f[i] != 0.0) {
      throw ValidationError("cheeger_sweep: hypothesis 2 fails, f is nonzero at vertex " +
                            std::to_string(i) + " outside omega0");
    }
  }
  const double w1 = window_sum(in.w, in.omega1);
  const double w0 = window_sum(in.w, in.omega0);
  if (!in.omega1.is_subset_of(in.omega0) || w1 < in.L1 - kWindowSlack ||
      w0 > in.L2 + kWindowSlack) {
    throw ValidationError("cheeger_sweep: hypothesis 3 fails, need omega1 in omega0 and "
                          "L1 <= |omega1|_w <= |omega0|_w <= L2");
  }
  const auto norms = dirichlet_norms(g, in.f, g.fields());
  if (!(norms.weighted > 0.0)) {
    throw ValidationError("cheeger_sweep: hypothesis 4 fails, ||f||_h = 0 leaves the Rayleigh "
                          "quotient unbounded");
  }

  SweepResult out;
  out.lambda = norms.gradient / norms.weighted;
  out.certified = std::sqrt(4.0 * out.lambda * max_degree_ratio(g));
  std::vector<double> sq(n);
  for (int i = 0; i < n; ++i) sq[i] = in.f[i] * in.f[i];
  std::vector<double> levels{0.0};
  for (double x : sq) {
    if (x < top * top) levels.push_back(x);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  out.ratio = kInf;
  for (double z : levels) {
    VertexSubset s(n);
    for (int i = 0; i < n; ++i) {
      if (sq[i] > z) s.insert(i);
    }
    const double mass = weighted_size(g, s);
    const int cut = cut_value(g, s);
    const double ratio = mass > 0.0 ? cut / mass : (cut == 0 ? 0.0 : kInf);
    if (ratio < out.ratio) {
      out.ratio = ratio;
      out.threshold = z;
      out.chosen = s;
    }
  }
  const double bound = out.certified * weighted_size(g, out.chosen);
  out.inequality_holds = cut_value(g, out.chosen) <= bound * (1.0 + 1e-12) + 1e-12;
  return out;
}

std::vector<double> grid_bump(const Network& g, double ell) {
  if (!g.has_positions()) throw ValidationError("grid_bump: the network has no positions");
  if (!(ell > 0.0) || !std::isfinite(ell)) throw ValidationError("grid_bump: ell must be > 0");
  const int d = g.dimension();
  std::map<std::vector<long long>, double> mass;
  std::vector<std::vector<long long>> cube(g.size());
  for (int i = 0; i < g.size(); ++i) {
    for (int k = 0; k < d; ++k) {
      cube[i].push_back(static_cast<long long>(std::floor(g.positions()[i][k] / ell)));
    }
    mass[cube[i]] += g.field(i);
  }
  const std::vector<long long>* best = nullptr;
  double best_mass = -kInf;
  for (const auto& [key, m] : mass) {
    if (m > best_mass) {
      best_mass = m;
      best = &key;
    }
  }
  std::vector<double> f(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    double d2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double lo = (*best)[k] * ell;
      const double x = g.positions()[i][k];
      const double excess = std::max({0.0, lo - x, x - (lo + ell)});
      d2 += excess * excess;
    }
    f[i] = std::max(0.0, 1.0 - std::sqrt(d2) / ell);
  }
  return f;
}

namespace {

struct Extraction {
  bool found = false;
  Mask set = 0;
  double value = kInf;
  bool heuristic = false;
};

class CruxSearch {
 public:
  CruxSearch(const Network& g, double L1, double L2) : g_(g), L1_(L1), L2_(L2) {
    for (int i = 0; i < g.size(); ++i) nbr_.push_back(g.neighbor_mask(i));
  }

  double mass(Mask s) const {
    double total = 0.0;
    for (int v = 0; v < g_.size(); ++v) {
      if (s & bit(v)) total += g_.field(v);
    }
    return total;
  }

  bool admissible(Mask s) const {
    const double m = mass(s);
    return s != 0 && m >= L1_ - kWindowSlack && m <= L2_ + kWindowSlack;
  }

  /// cut(S, V_t \ S) - |S|_{h^{V_t}} = cut(S, V_t \ S) - |S|_h - e(S, V \ V_t).
  double value(Mask s, Mask remaining) const {
    int inner = 0, outer = 0;
    for (int v = 0; v < g_.size(); ++v) {
      if (!(s & bit(v))) continue;
      inner += popcount(nbr_[v] & remaining & ~s);
      outer += popcount(nbr_[v] & ~remaining);
    }
    return inner - mass(s) - outer;
  }

  Extraction exact(Mask remaining) const {
    Extraction best;
    // Submasks in increasing numeric order, so strict improvement keeps the smallest encoding.
    std::vector<Mask> subs;
    for (Mask s = remaining;; s = (s - 1) & remaining) {
      subs.push_back(s);
      if (s == 0) break;
    }
    std::reverse(subs.begin(), subs.end());
    for (Mask s : subs) {
      if (!admissible(s)) continue;
      const double v = value(s, remaining);
      if (v < best.value) {
        best = {true, s, v, false};
      }
    }
    return best;
  }

  Extraction local(Mask remaining, std::uint64_t budget, Rng& rng) const {
    Extraction best;
    best.heuristic = true;
    std::vector<int> pool;
    for (int v = 0; v < g_.size(); ++v) {
      if (remaining & bit(v)) pool.push_back(v);
    }
    Mask cur = 0;
    for (std::uint64_t it = 0; it < budget; ++it) {
      if (cur == 0 || !admissible(cur) || uniform01(rng) < 0.05) {
        cur = 0;
        for (std::size_t tries = 0; tries < pool.size() && mass(cur) < L1_; ++tries) {
          cur |= bit(pool[uniform_index(rng, pool.size())]);
        }
      } else {
        const Mask next = cur ^ bit(pool[uniform_index(rng, pool.size())]);
        if (admissible(next) && value(next, remaining) <= value(cur, remaining)) cur = next;
      }
      if (admissible(cur)) {
        const double v = value(cur, remaining);
        if (v < best.value || (v == best.value && cur < best.set)) {
          best.found = true;
          best.set = cur;
          best.value = v;
        }
      }
    }
    return best;
  }

 private:
  const Network& g_;
  double L1_, L2_;
  std::vector<Mask> nbr_;
};

std::pair<int, std::vector<int>> arrange_block(const Network& g, Mask block, bool& heuristic) {
  const int n = g.size();
  const auto sub = induced_subgraph(g, VertexSubset::from_mask(n, block));
  const Network plain = sub.graph.with_uniform_field(0.0);
  Ordering ord = plain.size() <= kCutwidthCap ? tilted_cutwidth(plain) : heuristic_ordering(plain);
  if (plain.size() > kCutwidthCap) heuristic = true;
  for (int& v : ord.order) v = sub.original_vertex[v];
  return {static_cast<int>(std::lround(ord.value)), ord.order};
}

}  // namespace

PartitionCertificate crux_partition(const Network& g, double L1, double L2, double C,
                                    const CruxOptions& options) {
  const int n = g.size();
  if (n < 1 || n > kMaxMaskVertices) throw ValidationError("crux_partition: need 1 <= n <= 64");
  if (!(L1 >= 0.0) || !(L2 >= L1)) throw ValidationError("crux_partition: need 0 <= L1 <= L2");
  if (L2 < g.max_field()) throw ValidationError("crux_partition: need L2 >= h_max");
  PartitionCertificate cert;
  cert.L1 = L1;
  cert.L2 = L2;
  cert.C = C;
  CruxSearch search(g, L1, L2);
  Rng rng(derive_seed(options.seed, 0));
  Mask remaining = full_mask(n);
  while (remaining != 0) {
    if (search.mass(remaining) < L1 - kWindowSlack) break;
    const bool exact = popcount(remaining) <= options.exact_cap;
    const Extraction ex =
        exact ? search.exact(remaining) : search.local(remaining, options.budget, rng);
    cert.heuristic = cert.heuristic || ex.heuristic;
    if (!ex.found || ex.value > L1 + kWindowSlack) {
      cert.hypothesis_holds = false;
      cert.failing_set = VertexSubset::from_mask(n, remaining);
      break;
    }
    PartitionBlock block;
    block.vertices = VertexSubset::from_mask(n, ex.set);
    block.extraction_value = ex.value;
    auto [width, order] = arrange_block(g, ex.set, cert.heuristic);
    block.cutwidth = width;
    cert.ordering.insert(cert.ordering.end(), order.begin(), order.end());
    cert.blocks.push_back(std::move(block));
    remaining &= ~ex.set;
  }
  if (remaining != 0) {
    PartitionBlock block;
    block.vertices = VertexSubset::from_mask(n, remaining);
    block.extraction_value = std::numeric_limits<double>::quiet_NaN();
    block.residual = true;
    auto [width, order] = arrange_block(g, remaining, cert.heuristic);
    block.cutwidth = width;
    cert.ordering.insert(cert.ordering.end(), order.begin(), order.end());
    cert.blocks.push_back(std::move(block));
  }
  for (const auto& b : cert.blocks) {
    if (b.cutwidth > C) cert.blocks_within_C = false;
  }
  std::vector<double> four_h(g.fields());
  for (double& x : four_h) x *= 4.0;
  cert.achieved_width = prefix_width(g.with_fields(four_h), cert.ordering);
  cert.valid = cert.hypothesis_holds && cert.achieved_width <= C + L1 + L2 + kTieTolerance;
  return cert;
}

bool telescoping_holds(const Network& g, const PartitionCertificate& cert) {
  VertexSubset acc(g.size());
  for (std::size_t t = 0; t + 1 < cert.blocks.size(); ++t) {
    for (int v : cert.blocks[t].vertices.members()) acc.insert(v);
    if (cut_value(g, acc) > 2.0 * weighted_size(g, acc) + kTieTolerance) return false;
  }
  return true;
}

ExpanderBound expander_lower_bound(const Network& g, const VertexSubset& U, double delta,
                                   double lambda, int b, std::uint64_t budget) {
  if (U.universe() != g.size() || U.empty()) {
    throw ValidationError("expander_lower_bound: U must be a nonempty subset of V");
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("expander_lower_bound: need 0 < delta <= 1");
  if (b < 0) throw ValidationError("expander_lower_bound: b must be >= 0");
  const int size = U.count();
  const int s_max = static_cast<int>(std::floor(delta * size));
  ExpanderBound out;
  out.value = (lambda - g.max_field() - b) * s_max;
  out.useful = out.value > 0.0;
  if (!out.useful) {
    out.value = -kInf;
    out.note = "no useful bound: lambda - h_max - b <= 0 or floor(delta |U|) = 0";
  }

  for (int i : U.members()) {
    int outside = 0;
    for (int j : g.neighbors(i)) outside += U.contains(j) ? 0 : 1;
    if (outside > b) {
      throw ValidationError("expander_lower_bound: vertex " + std::to_string(i) + " has " +
                            std::to_string(outside) + " neighbors outside U, more than b");
    }
  }
  if (s_max < 1) {
    out.verified = true;
    return out;
  }
  if (size > kMaxMaskVertices) {
    out.note += (out.note.empty() ? "" : "; ") + std::string("expansion unverified: |U| > 64");
    return out;
  }
  try {
    const auto sub = induced_subgraph(g, U);
    const auto profile = expansion_profile(sub.graph, ExpansionMode::edge, s_max, budget);
    for (int s = 1; s <= s_max; ++s) {
      if (profile[s] < lambda - 1e-12) {
        throw ValidationError("expander_lower_bound: U is not a (delta, lambda) expander; sets of "
                              "size " + std::to_string(s) + " expand by only " +
                              std::to_string(profile[s]));
      }
    }
    out.verified = true;
  } catch (const CapExceeded&) {
    out.note += (out.note.empty() ? "" : "; ") + std::string("expansion unverified: budget exceeded");
  }
  return out;
}

double isoperimetric_constant(double alpha, double gamma) {
  if (!(alpha > 0.0)) throw ValidationError("isoperimetric: alpha must be > 0");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ValidationError("isoperimetric: need 0 <= gamma < 1");
  if (gamma == 0.0) return alpha;
  const double x = std::pow(4.0 * alpha * gamma, 1.0 / (1.0 - gamma));
  return alpha * std::pow(x, gamma) - x / 4.0;
}

IsoperimetricBound isoperimetric_upper_bound(double alpha, double gamma, double h_min,
                                             double h_max) {
  if (!(h_min > 0.0) || !(h_max >= h_min)) {
    throw ValidationError("isoperimetric: need 0 < h_min <= h_max");
  }
  IsoperimetricBound out;
  out.a_prime = isoperimetric_constant(alpha, gamma);
  out.L1 = out.a_prime * std::pow(h_min, -gamma / (1.0 - gamma));
  out.L2 = out.L1 + 2.0 * h_max;
  const double size = out.L2 / h_min;
  out.C = alpha * std::pow(size, gamma) * std::log(std::max(2.0, size));
  out.value = out.C + out.L1 + out.L2;
  return out;
}

}  // namespace tiltcut
