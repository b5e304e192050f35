#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tiltcut/network.hpp"

namespace tiltcut {

struct DirichletNorms {
  /// ||f||_w^2 = sum_i w_i f_i^2
  double weighted = 0.0;
  /// ||grad_G f||^2 = sum_{(i,j) in E} (f_i - f_j)^2
  double gradient = 0.0;
};

DirichletNorms dirichlet_norms(const Network& g, const std::vector<double>& f,
                               const std::vector<double>& w);

struct SweepInput {
  std::vector<double> f;
  /// Window weights w; the window is L1 <= |S|_w <= L2.
  std::vector<double> w;
  VertexSubset omega0;
  VertexSubset omega1;
  double L1 = 0.0;
  double L2 = 0.0;
};

struct SweepResult {
  VertexSubset chosen;
  double threshold = 0.0;
  /// cut(S, V \ S) / |S|_h
  double ratio = 0.0;
  /// ||grad f||^2 / ||f||_h^2
  double lambda = 0.0;
  /// sqrt(4 lambda max_i(deg_i / h_i))
  double certified = 0.0;
  bool inequality_holds = false;
};

/// Level-set sweep over S_z = {i : f_i^2 > z}.
///
/// Checks the four hypotheses first (f maximal on omega1, zero off omega0, the
/// weight window, and a finite Rayleigh quotient against h) and throws
/// ValidationError naming the first one that fails. Fields h come from g.
SweepResult cheeger_sweep(const Network& g, const SweepInput& input);

/// Bump f_i = [1 - dist(x_i, C0)/ell]_+ around the side-ell cube C0 of the
/// grid partition with the largest field mass (ties: lexicographically smallest
/// cube). Requires positions.
std::vector<double> grid_bump(const Network& g, double ell);

struct PartitionBlock {
  VertexSubset vertices;
  /// cut(R_t, V_t \ R_t) - |R_t|_{h^{V_t}}; NaN for the residual block.
  double extraction_value = 0.0;
  int cutwidth = 0;
  bool residual = false;
};

struct PartitionCertificate {
  std::vector<PartitionBlock> blocks;
  double L1 = 0.0;
  double L2 = 0.0;
  double C = 0.0;
  std::vector<int> ordering;
  /// max_t [cut(S_t, V \ S_t) - |S_t|_{4h}] over the prefixes of `ordering`.
  double achieved_width = 0.0;
  bool hypothesis_holds = true;
  /// Remaining vertex set at the first extraction whose minimum exceeded L1.
  std::optional<VertexSubset> failing_set;
  bool blocks_within_C = true;
  /// At least one inner argmin or block arrangement was not solved exactly.
  bool heuristic = false;
  bool valid = false;
};

struct CruxOptions {
  /// Largest remaining-set size for which the inner argmin is enumerated.
  int exact_cap = 20;
  /// Local-search iterations per extraction above exact_cap.
  std::uint64_t budget = 200'000;
  std::uint64_t seed = 0;
};

/// Greedy block partition: repeatedly extract the window-feasible set
/// (L1 <= |S|_h <= L2) minimizing cut(S, V_t \ S) - |S|_{h^{V_t}}, arrange each
/// block by its exact cutwidth, concatenate, and evaluate against fields 4h.
/// Requires L2 >= h_max.
PartitionCertificate crux_partition(const Network& g, double L1, double L2, double C,
                                    const CruxOptions& options = {});

/// cut(R_1 u ... u R_t, rest) <= |R_1 u ... u R_t|_{2h} for every t < l.
bool telescoping_holds(const Network& g, const PartitionCertificate& cert);

struct ExpanderBound {
  /// (lambda - h_max - b) * floor(delta |U|); -inf when not positive.
  double value = 0.0;
  bool useful = false;
  bool verified = false;
  std::string note;
};

/// Lower bound on Gamma_* from an expanding, loosely attached vertex set U.
/// The hypotheses are checked by enumeration (|U| <= 64 and the subset budget);
/// when the check cannot run the bound is returned unverified.
ExpanderBound expander_lower_bound(const Network& g, const VertexSubset& U, double delta,
                                   double lambda, int b, std::uint64_t budget = 50'000'000);

/// A'(alpha, gamma) = sup_{x >= 0} (alpha x^gamma - x/4).
double isoperimetric_constant(double alpha, double gamma);

struct IsoperimetricBound {
  double a_prime = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double C = 0.0;
  double value = 0.0;
};

/// Computable surrogate C + L1 + L2 of the isoperimetric upper bound, with
/// L1 = A' h_min^{-gamma/(1-gamma)}, L2 = L1 + 2 h_max and
/// C = alpha L2_size^gamma log max(2, L2_size) for sets of size at most L2/h_min.
IsoperimetricBound isoperimetric_upper_bound(double alpha, double gamma, double h_min,
                                             double h_max);

}  // namespace tiltcut
