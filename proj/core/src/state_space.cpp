#include "tiltcut/state_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "tiltcut/barriers.hpp"
#include "tiltcut/error.hpp"

namespace tiltcut {

StateSpace::StateSpace(Network g, DynamicsSpec spec, std::vector<double> energies,
                       ReversibleChain chain)
    : graph_(std::move(g)),
      spec_(std::move(spec)),
      energies_(std::move(energies)),
      chain_(std::move(chain)) {}

namespace {

void require_reversible_glauber(const DynamicsSpec& spec) {
  if (spec.kernel() != KernelKind::glauber || spec.mode() != UpdateMode::asynchronous) {
    throw ValidationError("exact state space needs asynchronous Glauber dynamics");
  }
  if (!std::isfinite(spec.beta())) throw ValidationError("exact state space needs finite beta");
}

}  // namespace

StateSpace build_state_space(const Network& g, const DynamicsSpec& spec, int cap) {
  require_reversible_glauber(spec);
  const int n = g.size();
  if (n < 1) throw ValidationError("build_state_space: empty graph");
  if (n > cap) {
    throw CapExceeded("build_state_space: n = " + std::to_string(n) + " exceeds the cap " +
                      std::to_string(cap));
  }
  const std::size_t states = std::size_t{1} << n;
  auto energies = energy_table(g);
  const double beta = spec.beta();
  std::vector<double> log_weight(states);
  std::vector<std::vector<Transition>> out(states);
  std::vector<double> hold(states, 0.0);
  std::vector<char> absorbing(states, 0);
  absorbing[full_mask(n)] = 1;
  std::vector<Mask> nbr(n);
  for (int i = 0; i < n; ++i) nbr[i] = g.neighbor_mask(i);
  for (Mask s = 0; s < states; ++s) {
    log_weight[s] = -beta * energies[s];
    out[s].reserve(n);
    for (int i = 0; i < n; ++i) {
      const int plus = popcount(nbr[i] & s);
      const double K = g.field(i) + 2.0 * plus - g.degree(i);
      const int now = (s & bit(i)) ? 1 : -1;
      out[s].push_back({static_cast<int>(s ^ bit(i)), glauber_flip_prob(K, beta, -now) / n});
      hold[s] += glauber_flip_prob(K, beta, now) / n;
    }
  }
  ReversibleChain chain(std::move(log_weight), std::move(out), std::move(hold),
                        std::move(absorbing));
  return StateSpace(g, spec, std::move(energies), std::move(chain));
}

EigenReport leading_eigenpair(const StateSpace& ss, const EigenOptions& options) {
  return leading_eigenpair(ss.chain(), options);
}

SpectralSandwich spectral_sandwich(const StateSpace& ss, const EigenReport& eigen) {
  return spectral_sandwich(ss.chain(), eigen);
}

StateQuantile exact_hitting_quantile(const StateSpace& ss, Mask start, const EigenReport* eigen,
                                     const QuantileOptions& options) {
  if (start > ss.target()) throw std::out_of_range("start mask outside the state space");
  const auto q = exact_hitting_quantile(ss.chain(), static_cast<int>(start), eigen, options);
  return {q.steps, q.steps / ss.vertex_count(), q.censored};
}

bool is_downward_closed(const std::vector<int>& family) {
  const std::unordered_set<int> members(family.begin(), family.end());
  for (int s : family) {
    for (int rest = s; rest; rest &= rest - 1) {
      if (!members.count(s & ~(rest & -rest))) return false;
    }
  }
  return true;
}

StateLevelSet level_set_sweep(const StateSpace& ss, const EigenReport& eigen) {
  StateLevelSet out;
  out.level_set = level_set_sweep(ss.chain(), eigen);
  out.downward_closed = is_downward_closed(out.level_set.family);
  return out;
}

MonotoneCheck monotone_eigvec_check(const StateSpace& ss, const EigenReport& eigen,
                                    double tolerance) {
  MonotoneCheck check;
  const int n = ss.vertex_count();
  const Mask states = Mask{1} << n;
  for (Mask s = 0; s < states; ++s) {
    for (int i = 0; i < n; ++i) {
      if (s & bit(i)) continue;
      const Mask up = s | bit(i);
      if (eigen.psi0[s] < eigen.psi0[up] - tolerance) {
        check.monotone = false;
        check.witness = std::make_pair(s, up);
        return check;
      }
    }
  }
  return check;
}

ReversibleChain count_chain(const Network& g, const DynamicsSpec& spec) {
  require_reversible_glauber(spec);
  const int n = g.size();
  if (n < 1) throw ValidationError("count_chain: empty graph");
  if (g.edge_count() != n * (n - 1) / 2) {
    throw ValidationError("count_chain: the lumped chain is exact only on complete graphs");
  }
  const double h = g.field(0);
  for (double x : g.fields()) {
    if (x != h) throw ValidationError("count_chain: fields must be uniform");
  }
  const double beta = spec.beta();
  std::vector<double> log_weight(n + 1);
  std::vector<std::vector<Transition>> out(n + 1);
  std::vector<double> hold(n + 1, 0.0);
  std::vector<char> absorbing(n + 1, 0);
  absorbing[n] = 1;
  for (int m = 0; m <= n; ++m) {
    const double aligned = 0.5 * m * (m - 1) + 0.5 * (n - m) * (n - m - 1);
    const double energy = -(aligned - double(m) * (n - m)) - h * (2.0 * m - n);
    log_weight[m] = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0) -
                    beta * energy;
    const double pick_plus = double(m) / n;
    const double pick_minus = double(n - m) / n;
    const double k_plus = h + (m - 1) - (n - m);
    const double k_minus = h + m - (n - m - 1);
    if (m > 0) {
      out[m].push_back({m - 1, pick_plus * glauber_flip_prob(k_plus, beta, -1)});
      hold[m] += pick_plus * glauber_flip_prob(k_plus, beta, +1);
    }
    if (m < n) {
      out[m].push_back({m + 1, pick_minus * glauber_flip_prob(k_minus, beta, +1)});
      hold[m] += pick_minus * glauber_flip_prob(k_minus, beta, -1);
    }
  }
  return ReversibleChain(std::move(log_weight), std::move(out), std::move(hold),
                         std::move(absorbing));
}

}  // namespace tiltcut
