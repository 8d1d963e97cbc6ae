#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "chaosbounds/core.hpp"
#include "chaosbounds/rng.hpp"
#include "chaosbounds/sphere_opt.hpp"

namespace chaosbounds {

enum class FormVariant {
  CenteredQuadratic,  // sum_ij a_ij (X_i X_j - delta_ij E X^2)
  DecoupledOffdiag,   // sum_{i != j} a_ij X_i X'_j
  OffdiagQuadratic,   // sum_{i != j} a_ij X_i X_j
  LinearGij,          // sum_ij a_ij G_ij, independent array
  LinearX,            // sum_{i != j} a_ij x_i X_j for fixed x
  DiagonalOnly,       // sum_i a_ii (X_i^2 - 1)
  DiagonalExp,        // sum_i a_ii E_i, standard symmetric exponential
  Noncentered,        // sum_ij a_ij X_i X_j
};

struct FormKind {
  FormVariant variant = FormVariant::CenteredQuadratic;
  Vec x;  // LinearX only

  static FormKind of(FormVariant v) { return FormKind{v, Vec()}; }
  static FormKind linear_x(Vec x) { return FormKind{FormVariant::LinearX, std::move(x)}; }
};

const char* form_name(FormVariant v);

enum class DistFamily { Gaussian, Rademacher, UniformScaled, TruncatedGaussian };

/// A mean-zero, unit-variance sampling family with its subgaussian
/// parameter alpha: P(|X| >= t) <= 2 exp(-t^2 / 2 alpha^2). The defaults
/// are validated empirically by the tail test, not asserted.
struct DistSpec {
  DistFamily family = DistFamily::Gaussian;
  double alpha = 1.0;

  static DistSpec gaussian() { return {DistFamily::Gaussian, 1.0}; }
  static DistSpec rademacher() { return {DistFamily::Rademacher, 1.0}; }
  static DistSpec uniform_scaled() { return {DistFamily::UniformScaled, std::sqrt(3.0)}; }
  static DistSpec truncated_gaussian() { return {DistFamily::TruncatedGaussian, 1.0}; }

  double draw(SampleRng& rng) const;
  const char* name() const;
};

/// Moment estimate with a 95% batch-mean confidence interval
/// (16 batches on the p-th powers, transformed through the 1/p root).
/// Identical seeds reproduce the estimate bit-for-bit.
struct MomentEstimate {
  double p = 1.0;
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct TailEstimate {
  double t = 0.0;
  double p_hat = 0.0;
  double ci_low = 0.0;  // Wilson 95%
  double ci_high = 0.0;
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// One draw of the F-valued form. The rng is single-owner; pass a fresh
/// substream per sample for reproducible parallel estimation.
Vec sample_form(const CoefficientTensor& a, const FormKind& kind, const DistSpec& dist,
                SampleRng& rng);

/// Default sample count policy: 2^14 for p <= 8, 2^17 for p <= 32.
/// Moments above p = 32 are refused unless force is set.
std::int64_t default_samples(double p);
constexpr double kMaxMomentOrder = 32.0;

/// A reusable pool of sampled norms ||form draw||_ns, one independent
/// substream per sample index. Estimates for a whole p-grid share one
/// pool, which makes the estimated p-norms exactly nondecreasing in p.
struct NormPool {
  std::vector<double> norms;
  std::uint64_t seed = 0;
};

NormPool sample_norm_pool(const CoefficientTensor& a, const NormSpec& ns, const FormKind& kind,
                          const DistSpec& dist, std::int64_t n_samples, std::uint64_t seed);

MomentEstimate moment_from_pool(const NormPool& pool, double p, bool force = false);
TailEstimate tail_from_pool(const NormPool& pool, double t);

MomentEstimate estimate_moment(const CoefficientTensor& a, const NormSpec& ns,
                               const FormKind& kind, const DistSpec& dist, double p,
                               std::int64_t n_samples, std::uint64_t seed, bool force = false);

/// estimate_moment with p = 1.
MomentEstimate estimate_expected_norm(const CoefficientTensor& a, const NormSpec& ns,
                                      const FormKind& kind, const DistSpec& dist,
                                      std::int64_t n_samples, std::uint64_t seed);

TailEstimate estimate_tail(const CoefficientTensor& a, const NormSpec& ns, const FormKind& kind,
                           const DistSpec& dist, double t, std::int64_t n_samples,
                           std::uint64_t seed);

/// Sample-average approximation of
/// sup_{|x|_2 <= 1} E || sum_{i != j} a_ij x_i g_j ||: one common pool of
/// Gaussian draws, projected ascent with restarts, then a fresh-pool
/// re-evaluation at the argmax. A fresh value more than 5% below the pool
/// value flags the result as overfit.
OptResult sup_x_expected_norm(const CoefficientTensor& a, const NormSpec& ns,
                              const DistSpec& dist, bool exclude_diagonal,
                              std::int64_t n_samples, std::uint64_t seed,
                              const OptOptions& opts = {});

/// Empirical check of the defining subgaussian tail bound for a family:
/// the sampled tail frequency must stay below 2 exp(-t^2 / 2 alpha^2) at
/// every grid point, with mean near zero.
bool subgaussian_tail_ok(const DistSpec& dist, std::uint64_t seed, std::int64_t n_samples,
                         const std::vector<double>& t_grid);

}  // namespace chaosbounds
