#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "tiltcut/network.hpp"
#include "tiltcut/rng.hpp"

namespace tiltcut {

enum class KernelKind { glauber, ellison, custom };
enum class UpdateMode { asynchronous, synchronous };

/// Noisy best-response kernel, noise level and update schedule.
///
/// Custom kernels are tabulated per vertex: table[i][m] is the probability that
/// vertex i refreshes to +1 when m of its neighbors are +1. Construction checks
/// the monotone class conditions against the network the table was built for.
class DynamicsSpec {
 public:
  static DynamicsSpec glauber(double beta, UpdateMode mode = UpdateMode::asynchronous);
  static DynamicsSpec ellison(double beta, UpdateMode mode = UpdateMode::asynchronous);
  static DynamicsSpec custom(const Network& g, double beta, std::vector<std::vector<double>> table,
                             UpdateMode mode = UpdateMode::asynchronous);

  KernelKind kernel() const noexcept { return kernel_; }
  double beta() const noexcept { return beta_; }
  UpdateMode mode() const noexcept { return mode_; }
  const std::vector<std::vector<double>>& table() const noexcept { return table_; }

  /// True when p(+1 | .) is non-decreasing in the number of + neighbors.
  bool is_monotone() const noexcept;

  /// Probability that vertex v refreshes to +1 given `plus_neighbors` + neighbors.
  double prob_plus(const Network& g, int v, int plus_neighbors) const;

 private:
  DynamicsSpec(KernelKind kernel, double beta, UpdateMode mode)
      : kernel_(kernel), beta_(beta), mode_(mode) {}

  KernelKind kernel_;
  double beta_;
  UpdateMode mode_;
  std::vector<std::vector<double>> table_;
};

/// K_i = h_i + (# neighbors in S) - (# neighbors not in S).
double local_field(const Network& g, const VertexSubset& s, int i);

/// Heat-bath probability (1 + exp(-2 beta K y))^{-1} of refreshing to y in {-1, +1}.
/// beta = +inf gives the noise-free limit (1/2 at K = 0).
double glauber_flip_prob(double K, double beta, int y);

/// Ellison kernel: the best response y* = sign(K) (y* = +1 at K = 0) is drawn
/// with probability 1 - e^{-beta}, the other action with e^{-beta}. Note that
/// beta = 0 gives p(y*) = 0; it is accepted as stated.
double ellison_flip_prob(double K, double beta, int y);

/// Refreshes vertex i of S against the uniform number u: i ends in the set iff
/// u < p(+1 | S). Shared uniforms give the monotone coupling.
VertexSubset update_vertex(const Network& g, const VertexSubset& s, int i, double u,
                           const DynamicsSpec& spec);

/// One step: asynchronous refreshes one uniformly chosen vertex; synchronous
/// refreshes every vertex against the pre-step configuration.
VertexSubset step(const Network& g, const VertexSubset& s, const DynamicsSpec& spec, Rng& rng);

struct TrialOutcome {
  /// Elementary steps until S = V (single-site updates or synchronous rounds).
  std::uint64_t steps = 0;
  /// steps / n for asynchronous dynamics, rounds for synchronous.
  double sweeps = 0.0;
  bool censored = false;
};

inline constexpr double kDefaultMaxSweeps = 1e6;

TrialOutcome hitting_time_trial(const Network& g, const DynamicsSpec& spec,
                                const VertexSubset& start, Rng& rng,
                                double max_sweeps = kDefaultMaxSweeps);

/// Monte Carlo estimate of the typical hitting time of the all-(+1) state.
struct HittingTimeEstimate {
  /// Per-trial T_+ in sweeps; censored trials are +inf.
  std::vector<double> samples;
  /// Per-trial T_+ in elementary steps; censored trials hold the cap.
  std::vector<std::uint64_t> steps;
  std::vector<std::uint64_t> trial_seeds;
  double quantile_value = 0.0;
  int n_trials = 0;
  int n_censored = 0;
  std::uint64_t seed = 0;
  /// More than half of the trials were censored.
  bool unreliable = false;
};

struct SimulationOptions {
  int n_trials = 1000;
  double max_sweeps = kDefaultMaxSweeps;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Runs independent trials from `start` (default: the empty set, all -1) with
/// sub-seeds derived from options.seed, and reports the e^{-1} quantile.
HittingTimeEstimate typical_hitting_time(const Network& g, const DynamicsSpec& spec,
                                         const SimulationOptions& options);
HittingTimeEstimate typical_hitting_time(const Network& g, const DynamicsSpec& spec,
                                         const VertexSubset& start,
                                         const SimulationOptions& options);

/// Empirical e^{-1} crossing from step samples; censored entries count as +inf.
/// Returns +inf when the crossing lies among censored samples.
double empirical_crossing(std::vector<std::uint64_t> steps, const std::vector<bool>& censored);

/// Crossing of e^{-1} by the log-linear interpolation between (t-1, above)
/// and (t, below), where above > e^{-1} >= below.
///
/// Both the Monte Carlo and the exact hitting-time quantiles use this rule on
/// the survival curve G(t) = P{T_+ > t} sampled at integer steps.
double interpolate_crossing(std::uint64_t t, double above, double below);

struct ExponentFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int points = 0;
};

struct BetaEstimate {
  double beta = 0.0;
  double tau = 0.0;
};

/// Least-squares slope of log tau against 2 beta (an estimate of Gamma_*).
/// Requires >= 3 points, finite positive tau, and at least two distinct betas.
ExponentFit exponent_fit(const std::vector<BetaEstimate>& estimates);

}  // namespace tiltcut
