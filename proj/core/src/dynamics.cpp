#include "tiltcut/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tiltcut/error.hpp"
#include "tiltcut/parallel.hpp"

namespace tiltcut {

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
}

int plus_neighbors(const Network& g, const VertexSubset& s, int i) {
  int m = 0;
  for (int j : g.neighbors(i)) m += s.contains(j) ? 1 : 0;
  return m;
}

}  // namespace

DynamicsSpec DynamicsSpec::glauber(double beta, UpdateMode mode) {
  check_beta(beta);
  return DynamicsSpec(KernelKind::glauber, beta, mode);
}

DynamicsSpec DynamicsSpec::ellison(double beta, UpdateMode mode) {
  check_beta(beta);
  return DynamicsSpec(KernelKind::ellison, beta, mode);
}

DynamicsSpec DynamicsSpec::custom(const Network& g, double beta,
                                  std::vector<std::vector<double>> table, UpdateMode mode) {
  check_beta(beta);
  if (static_cast<int>(table.size()) != g.size()) {
    throw ValidationError("custom kernel: need one table row per vertex");
  }
  const double cap = std::exp(-2.0 * beta);
  for (int i = 0; i < g.size(); ++i) {
    const auto& row = table[i];
    const int deg = g.degree(i);
    const std::string where = "custom kernel, vertex " + std::to_string(i);
    if (static_cast<int>(row.size()) != deg + 1) {
      throw ValidationError(where + ": row needs deg+1 = " + std::to_string(deg + 1) + " entries");
    }
    for (int m = 0; m <= deg; ++m) {
      if (!(row[m] >= 0.0 && row[m] <= 1.0)) {
        throw ValidationError(where + ": entry " + std::to_string(m) + " is not a probability");
      }
      if (m > 0 && row[m] < row[m - 1]) {
        throw ValidationError(where + ": p(+1) decreases at " + std::to_string(m) +
                              " plus neighbors");
      }
      if (g.field(i) + 2.0 * m - deg < 0.0 && row[m] > cap) {
        throw ValidationError(where + ": p(+1) exceeds e^{-2 beta} at negative local field (" +
                              std::to_string(m) + " plus neighbors)");
      }
    }
  }
  DynamicsSpec spec(KernelKind::custom, beta, mode);
  spec.table_ = std::move(table);
  return spec;
}

bool DynamicsSpec::is_monotone() const noexcept {
  // Ellison refreshes to the best response with 1 - e^{-beta}; below log 2 that
  // is less likely than the other action and the kernel turns anti-monotone.
  if (kernel_ == KernelKind::ellison) return -std::expm1(-beta_) >= std::exp(-beta_);
  return true;
}

double DynamicsSpec::prob_plus(const Network& g, int v, int plus_neighbors) const {
  const double K = g.field(v) + 2.0 * plus_neighbors - g.degree(v);
  switch (kernel_) {
    case KernelKind::glauber: return glauber_flip_prob(K, beta_, +1);
    case KernelKind::ellison: return ellison_flip_prob(K, beta_, +1);
    case KernelKind::custom: return table_.at(v).at(plus_neighbors);
  }
  return 0.0;
}

double local_field(const Network& g, const VertexSubset& s, int i) {
  return g.field(i) + 2.0 * plus_neighbors(g, s, i) - g.degree(i);
}

double glauber_flip_prob(double K, double beta, int y) {
  check_beta(beta);
  if (y != 1 && y != -1) throw ValidationError("spin must be +1 or -1");
  const double ky = K * y;
  if (std::isinf(beta)) return ky > 0.0 ? 1.0 : (ky < 0.0 ? 0.0 : 0.5);
  if (beta == 0.0) return 0.5;
  // The rarer outcome is evaluated directly and the likelier one as its
  // complement, so p(+1) + p(-1) rounds to exactly 1.
  if (ky < 0.0) return 1.0 / (1.0 + std::exp(-2.0 * beta * ky));
  return 1.0 - 1.0 / (1.0 + std::exp(2.0 * beta * ky));
}

double ellison_flip_prob(double K, double beta, int y) {
  check_beta(beta);
  if (y != 1 && y != -1) throw ValidationError("spin must be +1 or -1");
  const int best = K >= 0.0 ? 1 : -1;
  const double other = std::exp(-beta);
  if (other <= 0.5) return y == best ? 1.0 - other : other;
  const double keep = -std::expm1(-beta);
  return y == best ? keep : 1.0 - keep;
}

VertexSubset update_vertex(const Network& g, const VertexSubset& s, int i, double u,
                           const DynamicsSpec& spec) {
  VertexSubset next = s;
  if (u < spec.prob_plus(g, i, plus_neighbors(g, s, i))) {
    next.insert(i);
  } else {
    next.erase(i);
  }
  return next;
}

VertexSubset step(const Network& g, const VertexSubset& s, const DynamicsSpec& spec, Rng& rng) {
  const int n = g.size();
  if (n == 0) return s;
  if (spec.mode() == UpdateMode::asynchronous) {
    const int i = static_cast<int>(uniform_index(rng, n));
    return update_vertex(g, s, i, uniform01(rng), spec);
  }
  VertexSubset next = s;
  for (int i = 0; i < n; ++i) {
    if (uniform01(rng) < spec.prob_plus(g, i, plus_neighbors(g, s, i))) {
      next.insert(i);
    } else {
      next.erase(i);
    }
  }
  return next;
}

namespace {

// Per-vertex p(+1) indexed by the number of + neighbors, so trials never
// re-evaluate exponentials.
std::vector<std::vector<double>> prob_tables(const Network& g, const DynamicsSpec& spec) {
  std::vector<std::vector<double>> table(g.size());
  for (int i = 0; i < g.size(); ++i) {
    for (int m = 0; m <= g.degree(i); ++m) table[i].push_back(spec.prob_plus(g, i, m));
  }
  return table;
}

TrialOutcome run_trial(const Network& g, const DynamicsSpec& spec,
                       const std::vector<std::vector<double>>& table, const VertexSubset& start,
                       Rng& rng, double max_sweeps) {
  const int n = g.size();
  const bool async = spec.mode() == UpdateMode::asynchronous;
  const double cap_steps = async ? max_sweeps * n : max_sweeps;
  const auto max_steps = static_cast<std::uint64_t>(std::min(std::ceil(cap_steps), 1.8e19));
  std::vector<char> state(n);
  int plus = 0;
  for (int i = 0; i < n; ++i) plus += (state[i] = start.contains(i) ? 1 : 0);
  std::vector<int> plus_nbrs(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j : g.neighbors(i)) plus_nbrs[i] += state[j];
  }
  auto set_spin = [&](int i, char value) {
    if (state[i] == value) return;
    state[i] = value;
    const int delta = value ? 1 : -1;
    plus += delta;
    for (int j : g.neighbors(i)) plus_nbrs[j] += delta;
  };

  TrialOutcome out;
  std::vector<char> fresh;
  while (plus < n) {
    if (out.steps >= max_steps) {
      out.censored = true;
      break;
    }
    if (async) {
      const int i = static_cast<int>(uniform_index(rng, n));
      set_spin(i, uniform01(rng) < table[i][plus_nbrs[i]] ? 1 : 0);
    } else {
      fresh.resize(n);
      for (int i = 0; i < n; ++i) fresh[i] = uniform01(rng) < table[i][plus_nbrs[i]] ? 1 : 0;
      for (int i = 0; i < n; ++i) set_spin(i, fresh[i]);
    }
    ++out.steps;
  }
  out.sweeps = async ? static_cast<double>(out.steps) / n : static_cast<double>(out.steps);
  return out;
}

}  // namespace

TrialOutcome hitting_time_trial(const Network& g, const DynamicsSpec& spec,
                                const VertexSubset& start, Rng& rng, double max_sweeps) {
  if (!(max_sweeps > 0.0) || !std::isfinite(max_sweeps)) {
    throw ValidationError("max_sweeps must be positive and finite");
  }
  if (start.universe() != g.size()) throw std::out_of_range("start subset has the wrong universe");
  return run_trial(g, spec, prob_tables(g, spec), start, rng, max_sweeps);
}

HittingTimeEstimate typical_hitting_time(const Network& g, const DynamicsSpec& spec,
                                         const SimulationOptions& options) {
  return typical_hitting_time(g, spec, VertexSubset(g.size()), options);
}

HittingTimeEstimate typical_hitting_time(const Network& g, const DynamicsSpec& spec,
                                         const VertexSubset& start,
                                         const SimulationOptions& options) {
  if (options.n_trials < 100) throw ValidationError("typical_hitting_time: need >= 100 trials");
  if (!(options.max_sweeps > 0.0) || !std::isfinite(options.max_sweeps)) {
    throw ValidationError("max_sweeps must be positive and finite");
  }
  if (start.universe() != g.size()) throw std::out_of_range("start subset has the wrong universe");
  const auto table = prob_tables(g, spec);
  const std::size_t n_trials = options.n_trials;
  HittingTimeEstimate est;
  est.seed = options.seed;
  est.n_trials = options.n_trials;
  est.samples.resize(n_trials);
  est.steps.resize(n_trials);
  est.trial_seeds.resize(n_trials);
  std::vector<char> censored(n_trials, 0);
  parallel_for(n_trials, options.workers, [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(options.seed, t);
    Rng rng(seed);
    const TrialOutcome o = run_trial(g, spec, table, start, rng, options.max_sweeps);
    est.trial_seeds[t] = seed;
    est.steps[t] = o.steps;
    est.samples[t] = o.censored ? std::numeric_limits<double>::infinity() : o.sweeps;
    censored[t] = o.censored ? 1 : 0;
  });
  std::vector<bool> flags(censored.begin(), censored.end());
  est.n_censored = static_cast<int>(std::count(censored.begin(), censored.end(), 1));
  est.unreliable = 2 * est.n_censored > est.n_trials;
  const double crossing = empirical_crossing(est.steps, flags);
  const bool async = spec.mode() == UpdateMode::asynchronous;
  est.quantile_value = (async && g.size() > 0) ? crossing / g.size() : crossing;
  return est;
}

double interpolate_crossing(std::uint64_t t, double above, double below) {
  if (t == 0) return 0.0;
  const double base = static_cast<double>(t - 1);
  if (!(below > 0.0)) return base;
  const double la = std::log(above);
  const double lb = std::log(below);
  return base + (la + 1.0) / (la - lb);
}

double empirical_crossing(std::vector<std::uint64_t> steps, const std::vector<bool>& censored) {
  const std::size_t N = steps.size();
  if (N == 0 || censored.size() != N) {
    throw ValidationError("empirical_crossing: need matching nonempty samples");
  }
  constexpr auto kInf = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t j = 0; j < N; ++j) {
    if (censored[j]) steps[j] = kInf;
  }
  std::sort(steps.begin(), steps.end());
  const auto m = static_cast<std::size_t>(std::floor(N * std::exp(-1.0)));
  const std::uint64_t t1 = steps[N - m - 1];
  if (t1 == kInf) return std::numeric_limits<double>::infinity();
  if (t1 == 0) return 0.0;
  const auto at_least = [&](std::uint64_t t) {
    return static_cast<double>(steps.end() - std::lower_bound(steps.begin(), steps.end(), t));
  };
  return interpolate_crossing(t1, at_least(t1) / N, at_least(t1 + 1) / N);
}

ExponentFit exponent_fit(const std::vector<BetaEstimate>& estimates) {
  if (estimates.size() < 3) throw ValidationError("exponent_fit: need at least 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& e : estimates) {
    if (!(e.tau > 0.0) || !std::isfinite(e.tau) || !std::isfinite(e.beta)) {
      throw ValidationError("exponent_fit: tau must be finite and positive");
    }
    sx += 2.0 * e.beta;
    sy += std::log(e.tau);
  }
  const double k = static_cast<double>(estimates.size());
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& e : estimates) {
    const double dx = 2.0 * e.beta - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(e.tau) - my);
  }
  if (!(sxx > 0.0)) throw ValidationError("exponent_fit: all beta values are equal");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& e : estimates) {
    const double r = std::log(e.tau) - fit.intercept - fit.slope * 2.0 * e.beta;
    ssr += r * r;
  }
  fit.slope_stderr = estimates.size() > 2 ? std::sqrt(ssr / (k - 2.0) / sxx) : 0.0;
  fit.points = static_cast<int>(estimates.size());
  return fit;
}

}  // namespace tiltcut
