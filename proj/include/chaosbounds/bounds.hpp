#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "chaosbounds/core.hpp"
#include "chaosbounds/functionals.hpp"
#include "chaosbounds/mc.hpp"

namespace chaosbounds {

enum class Provenance { Exact, Optimized, Mc };

struct TermValue {
  double value = 0.0;
  Provenance prov = Provenance::Exact;
  std::uint64_t seed = 0;      // Mc / Optimized
  std::int64_t n_samples = 0;  // Mc / Optimized
  bool flagged = false;        // optimizer non-convergence or SAA overfit

  std::string prov_name() const;
};

/// The individually named terms of the bound right-hand sides, kept
/// separate so the universal constant stays a caller-chosen parameter.
struct BoundTerms {
  TermValue e_chaos;      // E || sum a_ij (g_i g_j - delta_ij) ||
  TermValue e_lin_gij;    // E || sum_{i != j} a_ij g_ij ||
  TermValue sup_x_e_lin;  // sup_x E || sum_{i != j} a_ij x_i g_j ||
  TermValue u_hs;         // sup over the HS ball
  TermValue v;            // injective two-sphere norm

  double U() const { return sup_x_e_lin.value + u_hs.value; }
  double V() const { return v.value; }
};

struct ComputeTermsOptions {
  std::int64_t mc_samples = std::int64_t(1) << 14;
  std::int64_t saa_samples = 4096;
  std::uint64_t seed = 1;
  OptOptions opt;
};

/// Fills all five terms. Deterministic routes are used where available
/// (u_hs / v for Scalar, Polytope and Lr r = 2; the scalar closed form of
/// the sup_x linear term); the expectations are Monte Carlo with seeds
/// derived from opts.seed.
BoundTerms compute_terms(const CoefficientTensor& a, const NormSpec& ns,
                         const ComputeTermsOptions& opts = {});

/// Moment lower bound (constant omitted):
/// e_chaos + sqrt(p) sup_x_e_lin + sqrt(p) u_hs + p v.
double prop1_lower(double p, const BoundTerms& terms);

enum class LogVariant { A, B };

/// The two logarithmic upper bounds (natural log, constant omitted).
/// A: log(ep) e_chaos + sqrt(p) sup_x_e_lin + sqrt(p) u_hs + p log(ep) v.
/// B: e_chaos + sqrt(p) sup_x_e_lin + sqrt(p) log(ep) u_hs + p v.
double thm3_upper(double p, const BoundTerms& terms, LogVariant variant);

/// Log-free upper bound with the independent-array linear term:
/// e_chaos + e_lin_gij + sqrt(p) sup_x_e_lin + sqrt(p) u_hs + p v.
double thm4_upper(double p, const BoundTerms& terms);

struct TailBound {
  double t = 0.0;
  double value = 0.0;
  double c_used = 1.0;
  double valid_from = 0.0;       // threshold below which the hypothesis fails
  bool below_threshold = false;  // bound returned but not asserted
};

struct TailPair {
  TailBound upper;
  TailBound lower;
};

/// Two-sided tail bounds from U and V. upper.value =
/// 2 exp(-min{t^2/U^2, t/V} / c) with valid_from = c (e_chaos + e_lin_gij);
/// lower.value = min(1, (1/c_shift?) ...) -- see implementation note:
/// the lower bound applies at the shifted threshold t + e_chaos / c_shift
/// (recorded in lower.t) with rate constant c: (1/c) exp(-c min{...}),
/// clamped to 1. U = 0 and V = 0 degenerates to upper 0 for t > 0.
TailPair thm6_tails(double t, const BoundTerms& terms, double c,
                    std::optional<double> c_shift = std::nullopt);

/// Subgaussian extension: 2 exp(-min{t^2/(alpha^4 U^2), t/(alpha^2 V)} / c)
/// with valid_from = c alpha^2 (e_chaos + e_lin_gij). Results below the
/// threshold carry below_threshold = true but are still returned.
TailBound thm7_hw_tail(double t, double alpha, const BoundTerms& terms, double c);

struct LrMomentParts {
  double sqrt_sum = 0.0;  // || sqrt(sum a^2) ||_{L_r}
  double u1 = 0.0;        // sup_x || sqrt(sum_j (sum_{i != j} a_ij x_i)^2) ||_{L_r}
  double u_hs = 0.0;
  double v = 0.0;
};

struct LrMomentBounds {
  double lower = 0.0;  // expression * r^{-1/2}
  double upper = 0.0;  // expression * r
  double expression = 0.0;
  LrMomentParts parts;
};

/// Two-sided L_r moment bound from purely deterministic quantities:
/// expression = sqrt_sum + sqrt(p) u1 + sqrt(p) u_hs + p v.
LrMomentBounds cor9_lr_moment(double p, const CoefficientTensor& a, const NormSpec& ns,
                              const OptOptions& opts = {});

/// L_r tail bound: 2 exp(-min{t^2/(alpha^4 r U^2), t/(alpha^2 V)} / c),
/// U and V the deterministic L_r forms, valid_from = c alpha^2 r sqrt_sum.
TailBound cor10_lr_tail(double t, double alpha, const CoefficientTensor& a, const NormSpec& ns,
                        double c, const OptOptions& opts = {});

/// Type-2 tail bound with constant lambda:
/// U = lambda type2_column_sup + u_hs, valid_from =
/// c lambda^2 alpha^2 sqrt(sum_ij ||a_ij||^2). Degenerate U = V = 0
/// evaluates the exponent as 0 (bound 2).
TailBound cor13_type2_tail(double t, double alpha, double lambda, const CoefficientTensor& a,
                           const NormSpec& ns, double c, const OptOptions& opts = {});

struct MomentPair {
  double lower = 0.0;
  double upper = 0.0;
};

/// Non-centered forms: || sum a_ij g_i g_j ||_p is equivalent to
/// || E S || + centered moments, so both sides just gain e_mean_norm =
/// || sum_i a_ii ||.
MomentPair noncentered_moment(double p, const BoundTerms& terms, double e_mean_norm);

/// || sum_i a_ii || under ns, the non-centered mean term.
double mean_norm(const CoefficientTensor& a, const NormSpec& ns);

/// Scalar moment law: p ||A||_op + sqrt(p) ||A||_HS (m = 1 only).
double scalar_mom(double p, const CoefficientTensor& a);

}  // namespace chaosbounds
