#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tiltcut/chain.hpp"
#include "tiltcut/dynamics.hpp"
#include "tiltcut/network.hpp"

namespace tiltcut {

inline constexpr int kDefaultExactCap = 14;

/// All 2^n configurations of an asynchronous Glauber chain, indexed by mask,
/// with the all-(+1) state as the absorbing target.
class StateSpace {
 public:
  StateSpace(Network g, DynamicsSpec spec, std::vector<double> energies, ReversibleChain chain);

  int vertex_count() const noexcept { return graph_.size(); }
  int state_count() const noexcept { return chain_.size(); }
  double beta() const noexcept { return spec_.beta(); }
  const Network& graph() const noexcept { return graph_; }
  const DynamicsSpec& spec() const noexcept { return spec_; }
  const ReversibleChain& chain() const noexcept { return chain_; }

  double energy(Mask s) const { return energies_[s]; }
  const std::vector<double>& energies() const noexcept { return energies_; }
  double log_mu(Mask s) const { return chain_.log_mu(static_cast<int>(s)); }
  Mask target() const noexcept { return full_mask(graph_.size()); }

 private:
  Network graph_;
  DynamicsSpec spec_;
  std::vector<double> energies_;
  ReversibleChain chain_;
};

/// Requires an asynchronous Glauber spec with finite beta and n <= cap.
StateSpace build_state_space(const Network& g, const DynamicsSpec& spec,
                             int cap = kDefaultExactCap);

EigenReport leading_eigenpair(const StateSpace& ss, const EigenOptions& options = {});
SpectralSandwich spectral_sandwich(const StateSpace& ss, const EigenReport& eigen);

struct StateQuantile {
  double steps = 0.0;
  /// steps / n: comparable with the Monte Carlo sweeps.
  double sweeps = 0.0;
  bool censored = false;
};

StateQuantile exact_hitting_quantile(const StateSpace& ss, Mask start,
                                     const EigenReport* eigen = nullptr,
                                     const QuantileOptions& options = {});

struct StateLevelSet {
  LevelSetResult level_set;
  /// S in B and i in S imply S \ {i} in B.
  bool downward_closed = false;
};

StateLevelSet level_set_sweep(const StateSpace& ss, const EigenReport& eigen);

struct MonotoneCheck {
  bool monotone = true;
  /// A violating pair (x, x + i) with psi0(x) < psi0(x + i) - tolerance.
  std::optional<std::pair<Mask, Mask>> witness;
};

/// psi0(S) >= psi0(S + i) - tolerance for all S and i not in S (psi0 scaled to max 1).
MonotoneCheck monotone_eigvec_check(const StateSpace& ss, const EigenReport& eigen,
                                    double tolerance = 1e-9);

bool is_downward_closed(const std::vector<int>& family);

/// Number-of-(+1) birth-death chain of Glauber dynamics on K_n with a uniform
/// field; state m = |S|, absorbing at m = n. Refuses other inputs.
ReversibleChain count_chain(const Network& g, const DynamicsSpec& spec);

}  // namespace tiltcut
