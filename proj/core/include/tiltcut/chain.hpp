#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace tiltcut {

struct Transition {
  int to = 0;
  double prob = 0.0;
};

/// Finite discrete-time chain, reversible w.r.t. exp(log_weight), with an
/// absorbing target set A.
///
/// Off-diagonal transitions are listed per state; the holding probability is
/// stored separately (and computed by the builder as a sum of positive terms
/// rather than as 1 - sum of flips, which keeps it accurate near 1).
class ReversibleChain {
 public:
  ReversibleChain() = default;
  ReversibleChain(std::vector<double> log_weight, std::vector<std::vector<Transition>> out,
                  std::vector<double> hold, std::vector<char> absorbing);

  int size() const noexcept { return static_cast<int>(log_mu_.size()); }
  /// Normalized log stationary probability.
  double log_mu(int x) const { return log_mu_[x]; }
  const std::vector<double>& log_mu() const noexcept { return log_mu_; }
  bool is_absorbing(int x) const { return absorbing_[x] != 0; }
  std::span<const Transition> transitions(int x) const { return out_[x]; }
  double hold(int x) const { return hold_[x]; }

  /// Non-absorbing states in increasing order, and the inverse map (-1 on A).
  const std::vector<int>& transient_states() const noexcept { return transient_; }
  int transient_index(int x) const { return transient_index_[x]; }

  /// max over transitions x -> y of |mu(x)p(x,y) - mu(y)p(y,x)| / max(mu(x)p(x,y), mu(y)p(y,x)).
  double max_detailed_balance_violation() const;

  /// Total killing probability k(x) = sum_{y in A} p(x, y).
  double killing(int x) const;

 private:
  std::vector<double> log_mu_;
  std::vector<std::vector<Transition>> out_;
  std::vector<double> hold_;
  std::vector<char> absorbing_;
  std::vector<int> transient_;
  std::vector<int> transient_index_;
};

/// Dense matrix of the restricted kernel p^A on the transient states (row-major).
std::vector<double> restricted_kernel_dense(const ReversibleChain& chain);

/// Leading eigenpair of the restricted kernel: its top eigenvalue is 1 - lambda0.
struct EigenReport {
  double lambda0 = 0.0;
  /// Second smallest eigenvalue of I - p^A (NaN when not computed).
  double lambda1 = std::numeric_limits<double>::quiet_NaN();
  double spectral_gap = std::numeric_limits<double>::quiet_NaN();
  /// lambda1 - lambda0 < 1e-8: psi0 is ill-conditioned.
  bool gap_flag = false;
  /// Nonnegative eigenvector over all states (zero on A), scaled to max entry 1.
  std::vector<double> psi0;
  int iterations = 0;
  /// ||p^A psi0 - (1 - lambda0) psi0||_{2,mu} / ||psi0||_{2,mu}.
  double residual = 0.0;
  std::string method;
};

enum class EigenMethod { automatic, inverse_iteration, power_iteration };

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  int max_iterations = 20000;
  double tolerance = 1e-14;
  /// Largest transient-state count handled by the dense elimination.
  int dense_cap = 2047;
  bool compute_second = true;
};

/// Computes lambda0 and psi0.
///
/// The default route is inverse iteration on I - p^A through a subtraction-free
/// (GTH-style) elimination, which keeps lambda0 accurate to relative precision
/// even when it is far below machine epsilon; lambda0 itself is read off the
/// Dirichlet form, a sum of positive terms. Chains above `dense_cap` fall back to
/// mu-weighted power iteration. Throws ConvergenceError at the iteration cap.
EigenReport leading_eigenpair(const ReversibleChain& chain, const EigenOptions& options = {});

struct SpectralSandwich {
  double lower = 0.0;
  double upper = 0.0;
  /// False when lambda0 is not resolvable (zero, negative or non-finite).
  bool resolved = true;
};

/// 1/log(1/(1-lambda0)) <= tau_A <= 1/log(1/(1-lambda0)) * (1 + max_{x not in A} log(1/mu(x)) / 2).
SpectralSandwich spectral_sandwich(const ReversibleChain& chain, const EigenReport& eigen);

struct ExactQuantile {
  /// Typical hitting time in elementary steps; +inf when censored.
  double steps = 0.0;
  bool censored = false;
  std::string method;
};

struct QuantileOptions {
  /// Step-by-step iteration budget, in transition evaluations.
  std::uint64_t iteration_budget = 200'000'000;
  /// Largest transient-state count for dense binary lifting.
  int lifting_cap = 1023;
  /// Longest horizon for dense lifting before round-off dominates.
  double lifting_horizon = 1e13;
};

/// Exact e^{-1} crossing of P_start{T_A > t}, computed from the exact survival
/// curve P_A^t 1 (step iteration, then repeated squaring, then the one-mode
/// spectral tail once the remainder is provably negligible).
ExactQuantile exact_hitting_quantile(const ReversibleChain& chain, int start,
                                     const EigenReport* eigen = nullptr,
                                     const QuantileOptions& options = {});

/// Exact survival curve P_start{T_A > t} for t = 0..horizon by direct iteration.
std::vector<double> survival_curve(const ReversibleChain& chain, int start, int horizon);

struct LevelSetResult {
  double threshold = 0.0;
  /// States of B = {x : psi0(x) > threshold}, increasing.
  std::vector<int> family;
  double ratio = 0.0;
  /// ratio / |state space|.
  double lower = 0.0;
  bool sandwich_holds = false;
  int levels_scanned = 0;
};

/// Scans every level set of psi0 and returns the one minimizing the escape
/// ratio sum_{(x,y) in dB} mu(x)p(x,y) / sum_{x in B} mu(x).
LevelSetResult level_set_sweep(const ReversibleChain& chain, const EigenReport& eigen);

}  // namespace tiltcut
