#include "tiltcut/chain.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "tiltcut/dynamics.hpp"
#include "tiltcut/error.hpp"

namespace tiltcut {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Full-spectrum eigensolves for lambda1 stay affordable up to this size.
constexpr int kSecondEigenCap = 1023;
// Absolute error allowed on the survival curve when switching to the one-mode tail.
constexpr double kTailTolerance = 1e-10;

double log_sum_exp(const std::vector<double>& v) {
  double top = -kInf;
  for (double x : v) top = std::max(top, x);
  if (!std::isfinite(top)) return top;
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

/// Transient-state view of the restricted kernel with mu scaled to max 1.
struct Restricted {
  int m = 0;
  std::vector<int> offsets;
  std::vector<int> cols;
  std::vector<double> probs;
  std::vector<double> hold;
  std::vector<double> kill;
  std::vector<double> w;
};

Restricted restrict_chain(const ReversibleChain& chain) {
  Restricted r;
  const auto& trans = chain.transient_states();
  r.m = static_cast<int>(trans.size());
  r.offsets.push_back(0);
  double top = -kInf;
  for (int x : trans) top = std::max(top, chain.log_mu(x));
  for (int x : trans) {
    double kill = 0.0;
    for (const auto& t : chain.transitions(x)) {
      const int j = chain.transient_index(t.to);
      if (j < 0) {
        kill += t.prob;
      } else if (t.prob > 0.0) {
        r.cols.push_back(j);
        r.probs.push_back(t.prob);
      }
    }
    r.offsets.push_back(static_cast<int>(r.cols.size()));
    r.hold.push_back(chain.hold(x));
    r.kill.push_back(kill);
    r.w.push_back(std::exp(chain.log_mu(x) - top));
  }
  return r;
}

std::vector<double> apply_kernel(const Restricted& r, const std::vector<double>& v) {
  std::vector<double> out(r.m);
  for (int x = 0; x < r.m; ++x) {
    double s = r.hold[x] * v[x];
    for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) s += r.probs[k] * v[r.cols[k]];
    out[x] = s;
  }
  return out;
}

/// (I - p^A) v written through differences, so it stays accurate for v near constant.
std::vector<double> apply_generator(const Restricted& r, const std::vector<double>& v) {
  std::vector<double> out(r.m);
  for (int x = 0; x < r.m; ++x) {
    double s = r.kill[x] * v[x];
    for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) {
      s += r.probs[k] * (v[x] - v[r.cols[k]]);
    }
    out[x] = s;
  }
  return out;
}

double mu_dot(const Restricted& r, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (int x = 0; x < r.m; ++x) s += r.w[x] * a[x] * b[x];
  return s;
}

double mu_residual(const Restricted& r, const std::vector<double>& psi, double lambda0) {
  const auto lpsi = apply_generator(r, psi);
  double num = 0.0;
  for (int x = 0; x < r.m; ++x) {
    const double d = lpsi[x] - lambda0 * psi[x];
    num += r.w[x] * d * d;
  }
  return std::sqrt(num / mu_dot(r, psi, psi));
}

/// LU factors of I - p^A by Grassmann-Taksar-Heyman elimination: every pivot and
/// fill-in is a sum of nonnegative terms, so solves with nonnegative right-hand
/// sides are accurate componentwise.
class GthFactor {
 public:
  explicit GthFactor(const Restricted& r) : m_(r.m), a_(std::size_t(r.m) * r.m, 0.0), d_(r.m) {
    std::vector<double> kill = r.kill;
    for (int x = 0; x < m_; ++x) {
      for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) at(x, r.cols[k]) += r.probs[k];
    }
    for (int z = 0; z < m_; ++z) {
      double pivot = kill[z];
      for (int y = z + 1; y < m_; ++y) pivot += at(z, y);
      if (!(pivot > 0.0)) {
        throw ConvergenceError("restricted chain is not absorbed from every state", kInf);
      }
      d_[z] = pivot;
      const double* row_z = &a_[std::size_t(z) * m_];
      for (int x = z + 1; x < m_; ++x) {
        const double rxz = at(x, z);
        if (rxz == 0.0) continue;
        const double f = rxz / pivot;
        double* row_x = &a_[std::size_t(x) * m_];
        for (int y = z + 1; y < m_; ++y) row_x[y] += f * row_z[y];
        kill[x] += f * kill[z];
      }
    }
  }

  /// Solves (I - p^A) u = b for b >= 0.
  std::vector<double> solve(std::vector<double> b) const {
    for (int x = 0; x < m_; ++x) {
      const double* row = &a_[std::size_t(x) * m_];
      double s = b[x];
      for (int z = 0; z < x; ++z) s += row[z] / d_[z] * b[z];
      b[x] = s;
    }
    for (int z = m_ - 1; z >= 0; --z) {
      const double* row = &a_[std::size_t(z) * m_];
      double s = b[z];
      for (int y = z + 1; y < m_; ++y) s += row[y] * b[y];
      b[z] = s / d_[z];
    }
    return b;
  }

 private:
  double& at(int x, int y) { return a_[std::size_t(x) * m_ + y]; }

  int m_;
  std::vector<double> a_;
  std::vector<double> d_;
};

void normalize_max(std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  for (double& x : v) x /= top;
}

double max_change(const std::vector<double>& a, const std::vector<double>& b) {
  double c = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) c = std::max(c, std::abs(a[i] - b[i]));
  return c;
}

/// Dirichlet form over the mu norm: a ratio of positive sums.
double dirichlet_rayleigh(const Restricted& r, const std::vector<double>& v) {
  double e = 0.0;
  for (int x = 0; x < r.m; ++x) {
    double s = r.kill[x] * v[x] * v[x];
    for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) {
      const double d = v[x] - v[r.cols[k]];
      s += 0.5 * r.probs[k] * d * d;
    }
    e += r.w[x] * s;
  }
  return e / mu_dot(r, v, v);
}

Eigen::MatrixXd dense_kernel(const Restricted& r) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(r.m, r.m);
  for (int x = 0; x < r.m; ++x) {
    p(x, x) = r.hold[x];
    for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) p(x, r.cols[k]) += r.probs[k];
  }
  return p;
}

/// 1 - (second largest eigenvalue) of the mu-symmetrized restricted kernel.
double second_eigenvalue(const Restricted& r) {
  const Eigen::MatrixXd p = dense_kernel(r);
  Eigen::MatrixXd s(r.m, r.m);
  for (int x = 0; x < r.m; ++x) {
    for (int y = 0; y < r.m; ++y) s(x, y) = x == y ? p(x, x) : std::sqrt(p(x, y) * p(y, x));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense symmetric eigensolve failed", kInf);
  }
  return 1.0 - solver.eigenvalues()(r.m - 2);
}

}  // namespace

ReversibleChain::ReversibleChain(std::vector<double> log_weight,
                                 std::vector<std::vector<Transition>> out,
                                 std::vector<double> hold, std::vector<char> absorbing)
    : log_mu_(std::move(log_weight)),
      out_(std::move(out)),
      hold_(std::move(hold)),
      absorbing_(std::move(absorbing)) {
  const std::size_t n = log_mu_.size();
  if (n == 0 || out_.size() != n || hold_.size() != n || absorbing_.size() != n) {
    throw ValidationError("chain: inconsistent state counts");
  }
  const double z = log_sum_exp(log_mu_);
  if (!std::isfinite(z)) throw ValidationError("chain: weights must be finite");
  for (double& x : log_mu_) x -= z;
  transient_index_.assign(n, -1);
  for (std::size_t x = 0; x < n; ++x) {
    double total = hold_[x];
    for (const auto& t : out_[x]) {
      if (t.to < 0 || static_cast<std::size_t>(t.to) >= n || t.to == static_cast<int>(x)) {
        throw ValidationError("chain: bad transition target from state " + std::to_string(x));
      }
      if (!(t.prob >= 0.0)) throw ValidationError("chain: negative transition probability");
      total += t.prob;
    }
    if (!(hold_[x] >= 0.0) || std::abs(total - 1.0) > 1e-9) {
      throw ValidationError("chain: row " + std::to_string(x) + " does not sum to one");
    }
    if (!absorbing_[x]) {
      transient_index_[x] = static_cast<int>(transient_.size());
      transient_.push_back(static_cast<int>(x));
    }
  }
}

double ReversibleChain::max_detailed_balance_violation() const {
  double worst = 0.0;
  for (int x = 0; x < size(); ++x) {
    for (const auto& t : out_[x]) {
      double back = 0.0;
      for (const auto& r : out_[t.to]) {
        if (r.to == x) back = r.prob;
      }
      if (t.prob == 0.0 && back == 0.0) continue;
      if (t.prob == 0.0 || back == 0.0) return 1.0;
      const double gap = (log_mu_[x] + std::log(t.prob)) - (log_mu_[t.to] + std::log(back));
      worst = std::max(worst, -std::expm1(-std::abs(gap)));
    }
  }
  return worst;
}

double ReversibleChain::killing(int x) const {
  double k = 0.0;
  for (const auto& t : out_[x]) {
    if (absorbing_[t.to]) k += t.prob;
  }
  return k;
}

std::vector<double> restricted_kernel_dense(const ReversibleChain& chain) {
  const Restricted r = restrict_chain(chain);
  const Eigen::MatrixXd p = dense_kernel(r);
  std::vector<double> out(std::size_t(r.m) * r.m);
  for (int x = 0; x < r.m; ++x) {
    for (int y = 0; y < r.m; ++y) out[std::size_t(x) * r.m + y] = p(x, y);
  }
  return out;
}

EigenReport leading_eigenpair(const ReversibleChain& chain, const EigenOptions& options) {
  const Restricted r = restrict_chain(chain);
  if (r.m == 0) throw ValidationError("leading_eigenpair: every state is absorbing");
  const bool inverse = options.method == EigenMethod::inverse_iteration ||
                       (options.method == EigenMethod::automatic && r.m <= options.dense_cap);
  EigenReport rep;
  std::vector<double> psi(r.m, 1.0);
  double lambda0 = 0.0;
  double prev_change = kInf;
  bool converged = false;
  if (inverse) {
    rep.method = "inverse-iteration";
    const GthFactor lu(r);
    for (int it = 1; it <= options.max_iterations && !converged; ++it) {
      auto next = lu.solve(psi);
      lambda0 = mu_dot(r, psi, psi) / mu_dot(r, psi, next);
      normalize_max(next);
      const double change = max_change(next, psi);
      psi = std::move(next);
      rep.iterations = it;
      // Round-off floors the change near 1e-16; stalling there counts as converged.
      converged = change <= options.tolerance || (change <= 1e-12 && change >= prev_change);
      prev_change = change;
    }
    lambda0 = mu_dot(r, psi, psi) / mu_dot(r, psi, lu.solve(psi));
  } else {
    rep.method = "power-iteration";
    for (int it = 1; it <= options.max_iterations && !converged; ++it) {
      auto next = apply_kernel(r, psi);
      normalize_max(next);
      const double change = max_change(next, psi);
      psi = std::move(next);
      rep.iterations = it;
      converged = change <= options.tolerance || (change <= 1e-12 && change >= prev_change);
      prev_change = change;
    }
    lambda0 = dirichlet_rayleigh(r, psi);
  }
  rep.lambda0 = lambda0;
  rep.residual = mu_residual(r, psi, lambda0);
  if (!converged && !(rep.residual <= 1e-10)) {
    throw ConvergenceError("leading_eigenpair: no convergence after " +
                               std::to_string(rep.iterations) + " iterations",
                           rep.residual);
  }
  rep.psi0.assign(chain.size(), 0.0);
  for (int x = 0; x < r.m; ++x) rep.psi0[chain.transient_states()[x]] = psi[x];
  if (options.compute_second && r.m >= 2 && r.m <= kSecondEigenCap) {
    rep.lambda1 = second_eigenvalue(r);
    rep.spectral_gap = rep.lambda1 - rep.lambda0;
    rep.gap_flag = rep.spectral_gap < 1e-8;
  }
  return rep;
}

SpectralSandwich spectral_sandwich(const ReversibleChain& chain, const EigenReport& eigen) {
  SpectralSandwich s;
  const double l0 = eigen.lambda0;
  if (!(l0 > 0.0) || !std::isfinite(l0) || l0 > 1.0) {
    s.resolved = false;
    s.lower = s.upper = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double worst = 0.0;
  for (int x : chain.transient_states()) worst = std::max(worst, -chain.log_mu(x));
  s.lower = 1.0 / -std::log1p(-l0);
  s.upper = s.lower * (1.0 + 0.5 * worst);
  return s;
}

std::vector<double> survival_curve(const ReversibleChain& chain, int start, int horizon) {
  if (start < 0 || start >= chain.size()) throw std::out_of_range("survival_curve: bad start");
  if (horizon < 0) throw ValidationError("survival_curve: negative horizon");
  std::vector<double> g(horizon + 1, 0.0);
  const int s = chain.transient_index(start);
  if (s < 0) return g;
  const Restricted r = restrict_chain(chain);
  std::vector<double> v(r.m, 1.0);
  for (int t = 0; t <= horizon; ++t) {
    g[t] = v[s];
    if (t < horizon) v = apply_kernel(r, v);
  }
  return g;
}

namespace {

class QuantileSolver {
 public:
  QuantileSolver(const ReversibleChain& chain, int start, const EigenReport* eigen,
                 const QuantileOptions& options)
      : chain_(chain), r_(restrict_chain(chain)), s_(chain.transient_index(start)),
        eigen_(eigen), options_(options) {}

  ExactQuantile run() {
    if (s_ < 0) return {0.0, false, "absorbed"};
    const double level = std::exp(-1.0);
    const std::uint64_t per_step = r_.probs.size() + static_cast<std::uint64_t>(r_.m);
    const std::uint64_t max_steps = std::max<std::uint64_t>(1, options_.iteration_budget / per_step);

    std::vector<double> v(r_.m, 1.0);
    double prev = 1.0;
    for (std::uint64_t t = 1; t <= max_steps; ++t) {
      v = apply_kernel(r_, v);
      if (v[s_] <= level) return {interpolate_crossing(t, prev, v[s_]), false, "iteration"};
      prev = v[s_];
    }
    double known = static_cast<double>(max_steps);
    if (auto tail = try_tail(known)) return *tail;
    if (r_.m <= options_.lifting_cap) return lift(std::move(v), max_steps);
    return censored();
  }

 private:
  static ExactQuantile censored() { return {kInf, true, "censored"}; }

  const EigenReport* eigen() {
    if (eigen_ == nullptr && !eigen_failed_) {
      try {
        own_ = leading_eigenpair(chain_);
        eigen_ = &*own_;
      } catch (const ConvergenceError&) {
        eigen_failed_ = true;
      }
    }
    return eigen_;
  }

  /// One-mode answer, if the other modes are below kTailTolerance from step `from` on.
  std::optional<ExactQuantile> try_tail(double from) {
    const EigenReport* e = eigen();
    if (e == nullptr || !(e->lambda0 > 0.0) || e->lambda0 >= 1.0) return std::nullopt;
    if (r_.m > 1) {
      // lambda1 carries dense-eigensolver round-off; halving it keeps the bound safe.
      if (!(e->lambda1 > 1e-12)) return std::nullopt;
      const double log_bound = from * std::log1p(-0.5 * e->lambda1) -
                               0.5 * chain_.log_mu(chain_.transient_states()[s_]);
      if (log_bound > std::log(kTailTolerance)) return std::nullopt;
    }
    std::vector<double> psi(r_.m);
    for (int x = 0; x < r_.m; ++x) psi[x] = e->psi0[chain_.transient_states()[x]];
    const std::vector<double> ones(r_.m, 1.0);
    const double c0 = psi[s_] * mu_dot(r_, psi, ones) / mu_dot(r_, psi, psi);
    const double tau = (1.0 + std::log(c0)) / -std::log1p(-e->lambda0);
    if (!(tau >= from)) return std::nullopt;
    return ExactQuantile{tau, false, "spectral-tail"};
  }

  ExactQuantile lift(std::vector<double> v, std::uint64_t at) {
    const double level = std::exp(-1.0);
    using Vec = Eigen::VectorXd;
    std::vector<Eigen::MatrixXd> powers{dense_kernel(r_)};
    Vec cur = Eigen::Map<Vec>(v.data(), r_.m);
    double t = static_cast<double>(at);
    int top = -1;
    for (int j = 0;; ++j) {
      const Vec cand = powers[j] * cur;
      if (cand(s_) <= level) {
        top = j;
        break;
      }
      cur = cand;
      t += std::ldexp(1.0, j);
      if (auto tail = try_tail(t)) return *tail;
      if (t + std::ldexp(1.0, j + 1) > options_.lifting_horizon) return censored();
      powers.push_back(powers[j] * powers[j]);
    }
    for (int j = top - 1; j >= 0; --j) {
      const Vec cand = powers[j] * cur;
      if (cand(s_) > level) {
        cur = cand;
        t += std::ldexp(1.0, j);
      }
    }
    const double below = (powers[0] * cur)(s_);
    return {interpolate_crossing(static_cast<std::uint64_t>(t) + 1, cur(s_), below), false, "lifting"};
  }

  const ReversibleChain& chain_;
  Restricted r_;
  int s_;
  const EigenReport* eigen_;
  std::optional<EigenReport> own_;
  bool eigen_failed_ = false;
  QuantileOptions options_;
};

}  // namespace

ExactQuantile exact_hitting_quantile(const ReversibleChain& chain, int start,
                                     const EigenReport* eigen, const QuantileOptions& options) {
  if (start < 0 || start >= chain.size()) {
    throw std::out_of_range("exact_hitting_quantile: bad start state");
  }
  return QuantileSolver(chain, start, eigen, options).run();
}

LevelSetResult level_set_sweep(const ReversibleChain& chain, const EigenReport& eigen) {
  const Restricted r = restrict_chain(chain);
  const auto& trans = chain.transient_states();
  if (r.m == 0) throw ValidationError("level_set_sweep: every state is absorbing");
  std::vector<double> thresholds{0.0};
  for (int x : trans) thresholds.push_back(eigen.psi0[x]);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.pop_back();  // the maximum leaves B empty

  LevelSetResult best;
  best.ratio = kInf;
  std::vector<char> in_b(r.m);
  for (double b : thresholds) {
    double mass = 0.0, flux = 0.0;
    for (int x = 0; x < r.m; ++x) in_b[x] = eigen.psi0[trans[x]] > b ? 1 : 0;
    for (int x = 0; x < r.m; ++x) {
      if (!in_b[x]) continue;
      mass += r.w[x];
      double out = r.kill[x];
      for (int k = r.offsets[x]; k < r.offsets[x + 1]; ++k) {
        if (!in_b[r.cols[k]]) out += r.probs[k];
      }
      flux += r.w[x] * out;
    }
    const double ratio = flux / mass;
    ++best.levels_scanned;
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.threshold = b;
      best.family.clear();
      for (int x = 0; x < r.m; ++x) {
        if (in_b[x]) best.family.push_back(trans[x]);
      }
    }
  }
  best.lower = best.ratio / chain.size();
  const double slack = 1e-9;
  best.sandwich_holds = best.lower <= eigen.lambda0 * (1.0 + slack) &&
                        eigen.lambda0 <= best.ratio * (1.0 + slack);
  return best;
}

}  // namespace tiltcut
