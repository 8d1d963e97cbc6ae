#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "chaosbounds/core.hpp"

namespace chaosbounds {

/// Result of a sphere-constrained maximization (or of an exact route that
/// replaces one). `value` always equals the objective at `argmax`;
/// `gap_estimate` is the spread between the best and second-best restart,
/// zero when fewer than two restarts ran or an exact route was taken.
struct OptResult {
  double value = 0.0;
  Vec argmax;
  Vec argmax_y;  // second block for bilinear suprema, empty otherwise
  int restarts_used = 0;
  bool converged = true;
  bool exact = false;  // closed-form route, no iteration
  double gap_estimate = 0.0;

  // Sample-average-approximation extras (sup_x_expected_norm only).
  double fresh_value = std::numeric_limits<double>::quiet_NaN();
  bool overfit = false;

  std::vector<double> trace;  // objective per accepted step, if requested
};

struct OptOptions {
  int restarts = 32;
  int max_iters = 5000;
  double tol = 1e-10;     // relative objective change counted as stable
  int stable_iters = 20;  // consecutive stable iterations to declare convergence
  std::uint64_t seed = 0x6a09e667f3bcc908ull;
  bool record_trace = false;
};

/// Objective for projected gradient ascent on the unit sphere. `value`
/// must be the exact objective; `value_grad` may use a smoothed gradient.
struct SphereObjective {
  std::function<double(const Vec&)> value;
  std::function<double(const Vec&, Vec&)> value_grad;  // fills grad, returns value
};

/// Maximizes a positively homogeneous objective over the unit sphere by
/// projected gradient ascent with backtracking line search and random
/// restarts. Restart k draws its start from substream (seed, k), so the
/// reported maximum is nondecreasing in the restart count. Extra warm
/// starts are prepended and do not consume random substreams.
OptResult sphere_maximize(Index dim, const SphereObjective& obj, const OptOptions& opts,
                          const std::vector<Vec>& warm_starts = {});

/// Single ascent run from a given start; never returns a value below the
/// objective at `start`. Used for warm-started half-steps.
std::pair<double, Vec> sphere_ascend(const SphereObjective& obj, Vec start,
                                     const OptOptions& opts);

/// Largest singular value of a dense matrix via the eigen-decomposition of
/// the smaller Gram matrix. Returns 0 for empty input.
double largest_singular_value(const Mat& a);

/// Largest eigenvalue and eigenvector of a symmetric PSD matrix.
std::pair<double, Vec> top_eigen_sym(const Mat& s);

}  // namespace chaosbounds
