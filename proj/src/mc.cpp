#include "chaosbounds/mc.hpp"

#include <algorithm>
#include <cmath>

namespace chaosbounds {

namespace {

constexpr int kBatches = 16;
constexpr double kZ95 = 1.959963984540054;

Vec draw_vector(const DistSpec& dist, Index n, SampleRng& rng) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = dist.draw(rng);
  return v;
}

}  // namespace

const char* form_name(FormVariant v) {
  switch (v) {
    case FormVariant::CenteredQuadratic: return "centered_quadratic";
    case FormVariant::DecoupledOffdiag: return "decoupled_offdiag";
    case FormVariant::OffdiagQuadratic: return "offdiag_quadratic";
    case FormVariant::LinearGij: return "linear_gij";
    case FormVariant::LinearX: return "linear_x";
    case FormVariant::DiagonalOnly: return "diagonal_only";
    case FormVariant::DiagonalExp: return "diagonal_exp";
    case FormVariant::Noncentered: return "noncentered";
  }
  return "?";
}

double DistSpec::draw(SampleRng& rng) const {
  switch (family) {
    case DistFamily::Gaussian: return rng.gaussian();
    case DistFamily::Rademacher: return rng.rademacher();
    case DistFamily::UniformScaled: return rng.uniform_scaled();
    case DistFamily::TruncatedGaussian: return rng.truncated_gaussian();
  }
  return 0.0;
}

const char* DistSpec::name() const {
  switch (family) {
    case DistFamily::Gaussian: return "gaussian";
    case DistFamily::Rademacher: return "rademacher";
    case DistFamily::UniformScaled: return "uniform_scaled";
    case DistFamily::TruncatedGaussian: return "truncated_gaussian";
  }
  return "?";
}

Vec sample_form(const CoefficientTensor& a, const FormKind& kind, const DistSpec& dist,
                SampleRng& rng) {
  const Index n = a.n();
  switch (kind.variant) {
    case FormVariant::CenteredQuadratic: {
      const Vec g = draw_vector(dist, n, rng);
      return a.quad_form(g) - a.slice_trace();
    }
    case FormVariant::DecoupledOffdiag: {
      const Vec g = draw_vector(dist, n, rng);
      const Vec h = draw_vector(dist, n, rng);
      return a.bilinear_form(g, h) - a.diag_bilinear(g, h);
    }
    case FormVariant::OffdiagQuadratic: {
      const Vec g = draw_vector(dist, n, rng);
      return a.quad_form(g) - a.diag_bilinear(g, g);
    }
    case FormVariant::LinearGij: {
      Vec w(n * n);
      for (Index i = 0; i < n * n; ++i) w[i] = dist.draw(rng);
      return a.linear_array(w);
    }
    case FormVariant::LinearX: {
      if (kind.x.size() != n) throw ScopeError("LinearX form needs a fixed x of length n");
      const Vec g = draw_vector(dist, n, rng);
      Mat m = a.contract_first(kind.x);
      const Mat d = a.diag_matrix();
      for (Index k = 0; k < a.m(); ++k) {
        m.col(k).array() -= d.col(k).array() * kind.x.array();
      }
      return m.transpose() * g;
    }
    case FormVariant::DiagonalOnly: {
      const Vec g = draw_vector(dist, n, rng);
      return a.diag_matrix().transpose() * (g.cwiseAbs2() - Vec::Ones(n));
    }
    case FormVariant::DiagonalExp: {
      Vec e(n);
      for (Index i = 0; i < n; ++i) e[i] = rng.sym_exponential();
      return a.diag_matrix().transpose() * e;
    }
    case FormVariant::Noncentered: {
      const Vec g = draw_vector(dist, n, rng);
      return a.quad_form(g);
    }
  }
  throw ScopeError("unknown form variant");
}

std::int64_t default_samples(double p) {
  return (p <= 8.0) ? (std::int64_t(1) << 14) : (std::int64_t(1) << 17);
}

NormPool sample_norm_pool(const CoefficientTensor& a, const NormSpec& ns, const FormKind& kind,
                          const DistSpec& dist, std::int64_t n_samples, std::uint64_t seed) {
  ns.check_compatible(a.m());
  if (n_samples < 64) throw ValidationError("need at least 64 samples");
  NormPool pool;
  pool.seed = seed;
  pool.norms.resize(std::size_t(n_samples));

  // LinearX admits a precomputed contraction; the per-sample cost drops to
  // one n x m matrix-vector product.
  if (kind.variant == FormVariant::LinearX) {
    if (kind.x.size() != a.n()) throw ScopeError("LinearX form needs a fixed x of length n");
    Mat m = a.contract_first(kind.x);
    const Mat d = a.diag_matrix();
    for (Index k = 0; k < a.m(); ++k) {
      m.col(k).array() -= d.col(k).array() * kind.x.array();
    }
    const Mat mt = m.transpose();
    for (std::int64_t s = 0; s < n_samples; ++s) {
      SampleRng rng(seed, std::uint64_t(s));
      const Vec g = draw_vector(dist, a.n(), rng);
      pool.norms[std::size_t(s)] = norm_eval(mt * g, ns);
    }
    return pool;
  }

  for (std::int64_t s = 0; s < n_samples; ++s) {
    SampleRng rng(seed, std::uint64_t(s));
    pool.norms[std::size_t(s)] = norm_eval(sample_form(a, kind, dist, rng), ns);
  }
  return pool;
}

MomentEstimate moment_from_pool(const NormPool& pool, double p, bool force) {
  if (p < 1.0) throw ValidationError("moment order must be >= 1");
  if (p > kMaxMomentOrder && !force) {
    throw ScopeError("moment order above 32 is unreliable at these sample sizes; pass force");
  }
  const std::int64_t total = std::int64_t(pool.norms.size());
  if (total < 64) throw ValidationError("need at least 64 samples");
  const std::int64_t batch = total / kBatches;
  const std::int64_t used = batch * kBatches;

  MomentEstimate est;
  est.p = p;
  est.n_samples = used;
  est.seed = pool.seed;

  // Work in log space on the p-th powers so large p never overflows.
  double lmax = -std::numeric_limits<double>::infinity();
  for (std::int64_t s = 0; s < used; ++s) {
    const double x = pool.norms[std::size_t(s)];
    if (x > 0) lmax = std::max(lmax, p * std::log(x));
  }
  if (!std::isfinite(lmax)) {
    return est;  // every sampled norm is zero
  }

  double batch_means[kBatches];
  double mean = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    double acc = 0.0;
    for (std::int64_t s = b * batch; s < (b + 1) * batch; ++s) {
      const double x = pool.norms[std::size_t(s)];
      if (x > 0) acc += std::exp(p * std::log(x) - lmax);
    }
    batch_means[b] = acc / double(batch);
    mean += batch_means[b];
  }
  mean /= kBatches;

  double var = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    const double d = batch_means[b] - mean;
    var += d * d;
  }
  var /= (kBatches - 1);
  const double sem = std::sqrt(var / kBatches);

  const auto root = [&](double scaled) {
    if (scaled <= 0.0) return 0.0;
    return std::exp((lmax + std::log(scaled)) / p);
  };
  est.value = root(mean);
  est.ci_low = root(mean - kZ95 * sem);
  est.ci_high = root(mean + kZ95 * sem);
  return est;
}

TailEstimate tail_from_pool(const NormPool& pool, double t) {
  TailEstimate est;
  est.t = t;
  est.seed = pool.seed;
  const double n = double(pool.norms.size());
  est.n_samples = std::int64_t(pool.norms.size());
  std::int64_t hits = 0;
  for (double x : pool.norms) {
    if (x >= t) ++hits;
  }
  const double p_hat = double(hits) / n;
  est.p_hat = p_hat;
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double margin =
      kZ95 * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) / denom;
  est.ci_low = std::max(0.0, center - margin);
  est.ci_high = std::min(1.0, center + margin);
  return est;
}

MomentEstimate estimate_moment(const CoefficientTensor& a, const NormSpec& ns,
                               const FormKind& kind, const DistSpec& dist, double p,
                               std::int64_t n_samples, std::uint64_t seed, bool force) {
  if (p < 1.0) throw ValidationError("moment order must be >= 1");
  if (n_samples <= 0) n_samples = default_samples(p);
  return moment_from_pool(sample_norm_pool(a, ns, kind, dist, n_samples, seed), p, force);
}

MomentEstimate estimate_expected_norm(const CoefficientTensor& a, const NormSpec& ns,
                                      const FormKind& kind, const DistSpec& dist,
                                      std::int64_t n_samples, std::uint64_t seed) {
  return estimate_moment(a, ns, kind, dist, 1.0, n_samples, seed);
}

TailEstimate estimate_tail(const CoefficientTensor& a, const NormSpec& ns, const FormKind& kind,
                           const DistSpec& dist, double t, std::int64_t n_samples,
                           std::uint64_t seed) {
  if (!(t >= 0)) throw ValidationError("tail threshold must be nonnegative");
  if (n_samples <= 0) n_samples = default_samples(1.0);
  return tail_from_pool(sample_norm_pool(a, ns, kind, dist, n_samples, seed), t);
}

OptResult sup_x_expected_norm(const CoefficientTensor& a, const NormSpec& ns,
                              const DistSpec& dist, bool exclude_diagonal,
                              std::int64_t n_samples, std::uint64_t seed,
                              const OptOptions& opts) {
  ns.check_compatible(a.m());
  if (n_samples <= 0) n_samples = 4096;
  const Index n = a.n();
  const Mat diag = a.diag_matrix();

  // Common random numbers: one fixed pool for the whole optimization.
  const auto make_pool = [&](std::uint64_t pool_seed) {
    Mat g(n, n_samples);
    for (std::int64_t s = 0; s < n_samples; ++s) {
      SampleRng rng(pool_seed, std::uint64_t(s));
      for (Index i = 0; i < n; ++i) g(i, s) = dist.draw(rng);
    }
    return g;
  };
  const Mat pool = make_pool(seed);

  const auto contract = [&](const Vec& x) {
    Mat m = a.contract_first(x);
    if (exclude_diagonal) {
      for (Index k = 0; k < a.m(); ++k) {
        m.col(k).array() -= diag.col(k).array() * x.array();
      }
    }
    return m;
  };

  const auto pool_value = [&](const Mat& g, const Vec& x) {
    const Mat mt = contract(x).transpose();
    double acc = 0.0;
    for (std::int64_t s = 0; s < g.cols(); ++s) {
      acc += norm_eval(mt * g.col(s), ns);
    }
    return acc / double(g.cols());
  };

  SphereObjective obj;
  obj.value = [&](const Vec& x) { return pool_value(pool, x); };
  obj.value_grad = [&](const Vec& x, Vec& grad) {
    const Mat mt = contract(x).transpose();
    double acc = 0.0;
    Mat h = Mat::Zero(n, a.m());
    for (std::int64_t s = 0; s < n_samples; ++s) {
      const Vec v = mt * pool.col(s);
      acc += norm_eval(v, ns);
      h.noalias() += pool.col(s) * norm_subgradient(v, ns).transpose();
    }
    h /= double(n_samples);
    grad = a.contract_second_sum(h);
    if (exclude_diagonal) {
      grad -= (diag.array() * h.array()).rowwise().sum().matrix();
    }
    return acc / double(n_samples);
  };

  OptResult res = sphere_maximize(n, obj, opts);
  const Mat fresh = make_pool(derive_seed(seed, 0x5aa5, 1));
  res.fresh_value = pool_value(fresh, res.argmax);
  res.overfit = res.fresh_value < 0.95 * res.value;
  return res;
}

bool subgaussian_tail_ok(const DistSpec& dist, std::uint64_t seed, std::int64_t n_samples,
                         const std::vector<double>& t_grid) {
  std::vector<double> draws(static_cast<std::size_t>(n_samples));
  double mean = 0.0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    SampleRng rng(seed, std::uint64_t(s));
    draws[std::size_t(s)] = dist.draw(rng);
    mean += draws[std::size_t(s)];
  }
  mean /= double(n_samples);
  // Mean-zero family: allow 5 standard errors of slack around 0.
  if (std::abs(mean) > 5.0 / std::sqrt(double(n_samples))) return false;
  for (double t : t_grid) {
    std::int64_t hits = 0;
    for (double x : draws) {
      if (std::abs(x) >= t) ++hits;
    }
    const double emp = double(hits) / double(n_samples);
    if (emp > 2.0 * std::exp(-t * t / (2.0 * dist.alpha * dist.alpha))) return false;
  }
  return true;
}

}  // namespace chaosbounds
