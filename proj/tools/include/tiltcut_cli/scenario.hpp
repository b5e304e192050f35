#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tiltcut/dynamics.hpp"
#include "tiltcut/generators.hpp"
#include "tiltcut/network.hpp"

namespace tiltcut::cli {

enum class Mode { simulate, exact, barriers, bounds, dichotomy };

std::string to_string(Mode m);
Mode parse_mode(const std::string& name);

/// Raw key-value pairs of a scenario file.
///
/// Grammar, one entry per line:
///
///   # comment
///   key = value
///   list_key = v1, v2, v3
///
/// Keys are lowercase identifiers; surrounding whitespace is ignored; a key may
/// appear once. Unknown keys are rejected when the scenario is resolved.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text);
ConfigMap read_config_file(const std::string& path);

/// A fully resolved experiment description.
struct Scenario {
  Mode mode = Mode::barriers;
  FamilySpec family;
  std::optional<std::string> graph_file;
  /// Uniform field h, a per-vertex list, or payoffs (at most one is set).
  std::optional<double> h;
  std::vector<double> fields;
  std::optional<PayoffMatrix> payoff;

  KernelKind kernel = KernelKind::glauber;
  UpdateMode update = UpdateMode::asynchronous;
  std::vector<double> betas;
  int trials = 1000;
  double max_sweeps = kDefaultMaxSweeps;
  std::uint64_t seed = 0;
  std::string out = "out";
  int cap_exact_n = 14;
  unsigned workers = 1;
  int random_starts = 5;

  // dichotomy
  std::vector<int> sizes{6, 8, 10, 12};
  int replicates = 5;
  double h_chain = 1.0;
  double h_regular = 0.1;
  int regular_k = 3;

  // bounds
  std::optional<double> L1, L2, C;
  std::optional<double> delta, lambda;
  int b = 0;
  std::optional<double> alpha, gamma;
  std::optional<double> ell;
  bool verify = true;

  /// Every key with its resolved value, in canonical text form.
  ConfigMap canonical() const;
  /// FNV-1a hash of the canonical form, as 16 hex digits.
  std::string config_hash() const;
};

/// Resolves raw keys into a Scenario; throws ValidationError on bad input.
Scenario resolve(const ConfigMap& raw);

/// Builds the network the scenario describes (generated or read, with fields attached).
Network build_network(const Scenario& s);

DynamicsSpec dynamics_for(const Scenario& s, double beta);

/// Runs the scenario and writes its output files under s.out. Returns the
/// written paths, relative to s.out, in creation order.
std::vector<std::string> run(const Scenario& s);

/// One beta of one graph, as fed to the exponent report.
struct BetaPoint {
  double beta = 0.0;
  /// Typical hitting time in sweeps; +inf when censored.
  double tau = 0.0;
  bool censored = false;
  /// NaN when no exact eigenpair was computed.
  double lambda0 = std::numeric_limits<double>::quiet_NaN();
  double sandwich_lo = std::numeric_limits<double>::quiet_NaN();
  double sandwich_hi = std::numeric_limits<double>::quiet_NaN();
};

struct ExponentRow {
  double beta = 0.0;
  double gamma_star = 0.0;
  /// max(gamma_star, 0): the exponent visible in hitting times.
  double gamma_star_clamped = 0.0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();
  /// slope - gamma_star_clamped.
  double slope_discrepancy = std::numeric_limits<double>::quiet_NaN();
  /// Discrete slope from the previous beta, and its relative gap to gamma_star_clamped.
  double local_slope = std::numeric_limits<double>::quiet_NaN();
  double local_discrepancy = std::numeric_limits<double>::quiet_NaN();
  /// -log(lambda0) / (2 beta).
  double spectral_rate = std::numeric_limits<double>::quiet_NaN();
  double sandwich_lo = std::numeric_limits<double>::quiet_NaN();
  double sandwich_hi = std::numeric_limits<double>::quiet_NaN();
  double tau = 0.0;
  /// "ok", "censored" (no slope reported) or "few-points".
  std::string flag;
};

/// One row per beta, sorted by beta. The fitted slope needs three or more
/// uncensored points; any censored point suppresses it for the whole graph.
std::vector<ExponentRow> exponent_report(double gamma_star, std::vector<BetaPoint> points);

}  // namespace tiltcut::cli
