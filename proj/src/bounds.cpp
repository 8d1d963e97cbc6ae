#include "chaosbounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace chaosbounds {

namespace {

void require_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw ValidationError("moment order must be >= 1");
}

double hw_exponent(double t, double u, double v) {
  // min{t^2/U^2, t/V} with zero denominators treated as +inf branches.
  const double b1 = (u > 0) ? (t / u) * (t / u) : std::numeric_limits<double>::infinity();
  const double b2 = (v > 0) ? t / v : std::numeric_limits<double>::infinity();
  return std::min(b1, b2);
}

}  // namespace

std::string TermValue::prov_name() const {
  switch (prov) {
    case Provenance::Exact: return "exact";
    case Provenance::Optimized: return "optimized";
    case Provenance::Mc: return "mc";
  }
  return "?";
}

BoundTerms compute_terms(const CoefficientTensor& a, const NormSpec& ns,
                         const ComputeTermsOptions& opts) {
  ns.check_compatible(a.m());
  BoundTerms terms;
  const CoefficientTensor offdiag = a.offdiagonal();

  {
    MomentEstimate e = estimate_expected_norm(a, ns, FormKind::of(FormVariant::CenteredQuadratic),
                                              DistSpec::gaussian(), opts.mc_samples,
                                              derive_seed(opts.seed, 0xc0, 1));
    terms.e_chaos = {e.value, Provenance::Mc, e.seed, e.n_samples, false};
  }
  {
    MomentEstimate e = estimate_expected_norm(offdiag, ns, FormKind::of(FormVariant::LinearGij),
                                              DistSpec::gaussian(), opts.mc_samples,
                                              derive_seed(opts.seed, 0xc0, 2));
    terms.e_lin_gij = {e.value, Provenance::Mc, e.seed, e.n_samples, false};
  }

  if (ns.kind == NormKind::Scalar) {
    // E | sum_{i != j} a_ij x_i g_j | = sqrt(2/pi) || (sum_i a_ij x_i)_j ||_2,
    // so the sup over x is sqrt(2/pi) times the off-diagonal operator norm.
    terms.sup_x_e_lin = {std::sqrt(2.0 / std::numbers::pi) * op_norm(offdiag),
                         Provenance::Exact, 0, 0, false};
  } else {
    OptResult r = sup_x_expected_norm(a, ns, DistSpec::gaussian(), true, opts.saa_samples,
                                      derive_seed(opts.seed, 0xc0, 3), opts.opt);
    terms.sup_x_e_lin = {r.fresh_value, Provenance::Optimized, derive_seed(opts.seed, 0xc0, 3),
                         opts.saa_samples, r.overfit || !r.converged};
  }

  {
    OptResult r = u_hs_sup(a, ns, opts.opt);
    terms.u_hs = {r.value, r.exact ? Provenance::Exact : Provenance::Optimized, opts.opt.seed, 0,
                  !r.exact && !r.converged};
  }
  {
    OptResult r = v_injective(a, ns, opts.opt);
    terms.v = {r.value, r.exact ? Provenance::Exact : Provenance::Optimized, opts.opt.seed, 0,
               !r.exact && !r.converged};
  }
  return terms;
}

double prop1_lower(double p, const BoundTerms& terms) {
  require_p(p);
  const double sp = std::sqrt(p);
  return terms.e_chaos.value + sp * terms.sup_x_e_lin.value + sp * terms.u_hs.value +
         p * terms.v.value;
}

double thm3_upper(double p, const BoundTerms& terms, LogVariant variant) {
  require_p(p);
  const double sp = std::sqrt(p);
  const double lep = std::log(std::numbers::e * p);
  if (variant == LogVariant::A) {
    return lep * terms.e_chaos.value + sp * terms.sup_x_e_lin.value + sp * terms.u_hs.value +
           p * lep * terms.v.value;
  }
  return terms.e_chaos.value + sp * terms.sup_x_e_lin.value + sp * lep * terms.u_hs.value +
         p * terms.v.value;
}

double thm4_upper(double p, const BoundTerms& terms) {
  require_p(p);
  const double sp = std::sqrt(p);
  return terms.e_chaos.value + terms.e_lin_gij.value + sp * terms.sup_x_e_lin.value +
         sp * terms.u_hs.value + p * terms.v.value;
}

TailPair thm6_tails(double t, const BoundTerms& terms, double c, std::optional<double> c_shift) {
  if (!(t > 0)) throw ValidationError("tail threshold must be positive");
  if (!(c > 0)) throw ValidationError("constant must be positive");
  const double cs = c_shift.value_or(c);
  const double u = terms.U();
  const double v = terms.V();
  const double expo = hw_exponent(t, u, v);

  TailPair pair;
  pair.upper.t = t;
  pair.upper.c_used = c;
  pair.upper.valid_from = c * (terms.e_chaos.value + terms.e_lin_gij.value);
  pair.upper.value = std::isinf(expo) ? 0.0 : 2.0 * std::exp(-expo / c);
  pair.upper.below_threshold = t <= pair.upper.valid_from;

  // The lower bound claims P(||S|| >= t + E||S|| / c_shift) >= value; the
  // shifted threshold is recorded in lower.t. Clamped at 1, a probability.
  pair.lower.t = t + terms.e_chaos.value / cs;
  pair.lower.c_used = c;
  pair.lower.valid_from = 0.0;
  pair.lower.value = std::isinf(expo) ? 0.0 : std::min(1.0, std::exp(-c * expo) / c);
  return pair;
}

TailBound thm7_hw_tail(double t, double alpha, const BoundTerms& terms, double c) {
  if (!(t > 0)) throw ValidationError("tail threshold must be positive");
  if (!(alpha > 0)) throw ValidationError("alpha must be positive");
  if (!(c > 0)) throw ValidationError("constant must be positive");
  const double a2 = alpha * alpha;
  const double expo = hw_exponent(t, a2 * terms.U(), a2 * terms.V());
  TailBound b;
  b.t = t;
  b.c_used = c;
  b.valid_from = c * a2 * (terms.e_chaos.value + terms.e_lin_gij.value);
  b.value = std::isinf(expo) ? 0.0 : 2.0 * std::exp(-expo / c);
  b.below_threshold = t <= b.valid_from;
  return b;
}

LrMomentBounds cor9_lr_moment(double p, const CoefficientTensor& a, const NormSpec& ns,
                              const OptOptions& opts) {
  require_p(p);
  if (ns.kind != NormKind::Lr) throw ScopeError("cor9_lr_moment requires an Lr norm");
  LrMomentBounds out;
  out.parts.sqrt_sum = lr_sqrt_sum(a, ns);
  out.parts.u1 = lr_u1_sup(a, ns, /*exclude_diagonal=*/true, opts).value;
  out.parts.u_hs = u_hs_sup(a, ns, opts).value;
  out.parts.v = v_injective(a, ns, opts).value;
  const double sp = std::sqrt(p);
  out.expression =
      out.parts.sqrt_sum + sp * out.parts.u1 + sp * out.parts.u_hs + p * out.parts.v;
  out.lower = out.expression / std::sqrt(ns.r);
  out.upper = out.expression * ns.r;
  return out;
}

TailBound cor10_lr_tail(double t, double alpha, const CoefficientTensor& a, const NormSpec& ns,
                        double c, const OptOptions& opts) {
  if (!(t > 0)) throw ValidationError("tail threshold must be positive");
  if (!(alpha > 0)) throw ValidationError("alpha must be positive");
  if (!(c > 0)) throw ValidationError("constant must be positive");
  if (ns.kind != NormKind::Lr) throw ScopeError("cor10_lr_tail requires an Lr norm");
  const double a2 = alpha * alpha;
  const double u = lr_u1_sup(a, ns, true, opts).value + u_hs_sup(a, ns, opts).value;
  const double v = v_injective(a, ns, opts).value;
  const double expo = hw_exponent(t, a2 * std::sqrt(ns.r) * u, a2 * v);
  TailBound b;
  b.t = t;
  b.c_used = c;
  b.valid_from = c * a2 * ns.r * lr_sqrt_sum(a, ns);
  b.value = std::isinf(expo) ? 0.0 : 2.0 * std::exp(-expo / c);
  b.below_threshold = t <= b.valid_from;
  return b;
}

TailBound cor13_type2_tail(double t, double alpha, double lambda, const CoefficientTensor& a,
                           const NormSpec& ns, double c, const OptOptions& opts) {
  if (!(t > 0)) throw ValidationError("tail threshold must be positive");
  if (!(alpha > 0)) throw ValidationError("alpha must be positive");
  if (!(lambda >= 1.0)) throw ValidationError("type-2 constant must be >= 1");
  if (!(c > 0)) throw ValidationError("constant must be positive");
  ns.check_compatible(a.m());
  const double a2 = alpha * alpha;
  const double u = lambda * type2_column_sup(a, ns, opts).value + u_hs_sup(a, ns, opts).value;
  const double v = v_injective(a, ns, opts).value;

  // sqrt(sum_ij ||a_ij||^2): rows of the flat storage are exactly the
  // coefficient vectors a_ij over k.
  double hs_like = 0.0;
  if (!a.is_sparse()) {
    const Mat& f = a.dense_flat();
    for (Index r = 0; r < f.rows(); ++r) {
      const double nv = norm_eval(f.row(r).transpose(), ns);
      hs_like += nv * nv;
    }
  } else {
    std::map<Index, Vec> rows;
    const SparseMat& sp = a.sparse_flat();
    for (Index k = 0; k < a.m(); ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        auto [pos, inserted] = rows.try_emplace(it.row(), Vec::Zero(a.m()));
        pos->second[k] = it.value();
      }
    }
    for (const auto& [r, aij] : rows) {
      const double nv = norm_eval(aij, ns);
      hs_like += nv * nv;
    }
  }
  hs_like = std::sqrt(hs_like);

  // Degenerate U = V = 0 evaluates the exponent as 0, so the bound is the
  // trivial 2 for every threshold.
  const double expo = (u == 0.0 && v == 0.0) ? 0.0 : hw_exponent(t, a2 * u, a2 * v);
  TailBound b;
  b.t = t;
  b.c_used = c;
  b.valid_from = c * lambda * lambda * a2 * hs_like;
  b.value = 2.0 * std::exp(-expo / c);
  b.below_threshold = t <= b.valid_from;
  return b;
}

MomentPair noncentered_moment(double p, const BoundTerms& terms, double e_mean_norm) {
  require_p(p);
  if (!(e_mean_norm >= 0)) throw ValidationError("mean norm must be nonnegative");
  return {e_mean_norm + prop1_lower(p, terms), e_mean_norm + thm4_upper(p, terms)};
}

double mean_norm(const CoefficientTensor& a, const NormSpec& ns) {
  ns.check_compatible(a.m());
  return norm_eval(a.slice_trace(), ns);
}

double scalar_mom(double p, const CoefficientTensor& a) {
  require_p(p);
  if (a.m() != 1) throw ScopeError("scalar_mom requires m = 1");
  return p * op_norm(a) + std::sqrt(p) * hs_norm(a);
}

}  // namespace chaosbounds
