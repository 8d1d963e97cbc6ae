#include "chaosbounds/functionals.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "chaosbounds/rng.hpp"

namespace chaosbounds {

namespace {

constexpr double kSmoothEps = 1e-12;

void require_scalar(const CoefficientTensor& a, const char* op) {
  if (a.m() != 1) throw ScopeError(std::string(op) + " requires a scalar tensor (m = 1)");
}

Vec weighted_sqrt(const NormSpec& ns) {
  return ns.weights.cwiseSqrt();
}

/// Off-diagonal contraction (sum_{i != j} a_ijk x_i)_{jk}.
Mat contract_first_offdiag(const CoefficientTensor& a, const Vec& x) {
  Mat m = a.contract_first(x);
  const Mat d = a.diag_matrix();
  for (Index k = 0; k < a.m(); ++k) {
    m.col(k).array() -= d.col(k).array() * x.array();
  }
  return m;
}

}  // namespace

double hs_norm(const CoefficientTensor& a) {
  require_scalar(a, "hs_norm");
  return std::sqrt(a.slice_sqnorm()[0]);
}

double op_norm(const CoefficientTensor& a) {
  require_scalar(a, "op_norm");
  return largest_singular_value(a.slice(0));
}

std::pair<double, Vec> norm_linop_sup(const Mat& m_op, const NormSpec& ns,
                                      const OptOptions& opts, const Vec* warm) {
  const Index d = m_op.rows();
  switch (ns.kind) {
    case NormKind::Scalar: {
      Vec c = m_op.col(0);
      const double v = c.norm();
      if (v > 0) c /= v;
      else { c.setZero(); c[0] = 1.0; }
      return {v, std::move(c)};
    }
    case NormKind::Polytope: {
      double best = -1.0;
      Vec bestvec;
      for (const Vec& t : ns.points) {
        Vec mt = m_op * t;
        const double v = mt.norm();
        if (v > best) {
          best = v;
          bestvec = std::move(mt);
        }
      }
      if (best > 0) bestvec /= bestvec.norm();
      else { bestvec = Vec::Zero(d); bestvec[0] = 1.0; }
      return {best, std::move(bestvec)};
    }
    case NormKind::Lr: {
      if (ns.r == 2.0) {
        const Vec ws = weighted_sqrt(ns);
        Mat g = m_op.transpose() * m_op;  // m x m
        g = ws.asDiagonal() * g * ws.asDiagonal();
        auto [lmax, u] = top_eigen_sym(g);
        Vec z = m_op * ws.asDiagonal() * u;
        const double zn = z.norm();
        if (zn > 0) z /= zn;
        else { z = Vec::Zero(d); z[0] = 1.0; }
        // Evaluate rather than trust sqrt(lmax); keeps value == f(argmax).
        return {norm_eval(m_op.transpose() * z, ns), std::move(z)};
      }
      SphereObjective obj;
      obj.value = [&](const Vec& z) { return norm_eval(m_op.transpose() * z, ns); };
      obj.value_grad = [&](const Vec& z, Vec& grad) {
        Vec v = m_op.transpose() * z;
        grad.noalias() = m_op * norm_subgradient(v, ns);
        return norm_eval(v, ns);
      };
      if (warm != nullptr && warm->size() == d && warm->norm() > 0) {
        auto [v, z] = sphere_ascend(obj, *warm / warm->norm(), opts);
        return {v, std::move(z)};
      }
      OptResult r = sphere_maximize(d, obj, opts);
      return {r.value, std::move(r.argmax)};
    }
  }
  return {0.0, Vec::Zero(std::max(Index(1), d))};
}

OptResult u_hs_sup(const CoefficientTensor& a, const NormSpec& ns, const OptOptions& opts) {
  ns.check_compatible(a.m());
  const Index d = a.n() * a.n();
  OptResult out;
  switch (ns.kind) {
    case NormKind::Scalar: {
      // Cauchy-Schwarz: the sup over the HS ball of a linear functional is
      // its own HS norm, attained at the normalized coefficient array.
      const double v = std::sqrt(a.slice_sqnorm()[0]);
      out.value = v;
      out.argmax = a.apply_flat(Vec::Ones(1));
      if (v > 0) out.argmax /= v;
      out.exact = true;
      return out;
    }
    case NormKind::Polytope: {
      const Mat g = a.gram();
      double best = -1.0;
      Vec best_t;
      for (const Vec& t : ns.points) {
        const double v = std::sqrt(std::max(0.0, double(t.dot(g * t))));
        if (v > best) {
          best = v;
          best_t = t;
        }
      }
      out.value = best;
      out.argmax = a.apply_flat(best_t);
      const double an = out.argmax.norm();
      if (an > 0) out.argmax /= an;
      out.exact = true;
      return out;
    }
    case NormKind::Lr: {
      if (ns.r == 2.0) {
        const Vec ws = weighted_sqrt(ns);
        Mat g = ws.asDiagonal() * a.gram() * ws.asDiagonal();
        auto [lmax, u] = top_eigen_sym(g);
        Vec z = a.apply_flat(ws.asDiagonal() * u);
        const double zn = z.norm();
        if (zn > 0) z /= zn;
        out.value = norm_eval(a.linear_array(zn > 0 ? z : Vec::Zero(d)), ns);
        if (!(zn > 0)) out.value = 0.0;
        out.argmax = (zn > 0) ? z : Vec::Zero(d);
        out.exact = true;
        return out;
      }
      SphereObjective obj;
      obj.value = [&](const Vec& z) { return norm_eval(a.linear_array(z), ns); };
      obj.value_grad = [&](const Vec& z, Vec& grad) {
        Vec v = a.linear_array(z);
        grad = a.apply_flat(norm_subgradient(v, ns));
        return norm_eval(v, ns);
      };
      out = sphere_maximize(d, obj, opts);
      return out;
    }
  }
  return out;
}

double lr_sqrt_sum(const CoefficientTensor& a, const NormSpec& ns) {
  if (ns.kind != NormKind::Lr) throw ScopeError("lr_sqrt_sum requires an Lr norm");
  ns.check_compatible(a.m());
  const Vec s = a.slice_sqnorm();
  double acc = 0.0;
  for (Index k = 0; k < a.m(); ++k) {
    acc += ns.weights[k] * std::pow(s[k], ns.r / 2.0);
  }
  return std::pow(acc, 1.0 / ns.r);
}

double lr_u1_objective(const CoefficientTensor& a, const NormSpec& ns, const Vec& x,
                       bool exclude_diagonal) {
  if (ns.kind != NormKind::Lr) throw ScopeError("lr_u1_objective requires an Lr norm");
  ns.check_compatible(a.m());
  const Mat m = exclude_diagonal ? contract_first_offdiag(a, x) : a.contract_first(x);
  double acc = 0.0;
  for (Index k = 0; k < a.m(); ++k) {
    acc += ns.weights[k] * std::pow(m.col(k).squaredNorm(), ns.r / 2.0);
  }
  return std::pow(acc, 1.0 / ns.r);
}

OptResult lr_u1_sup(const CoefficientTensor& a, const NormSpec& ns, bool exclude_diagonal,
                    const OptOptions& opts) {
  if (ns.kind != NormKind::Lr) throw ScopeError("lr_u1_sup requires an Lr norm");
  ns.check_compatible(a.m());
  const Index n = a.n();
  OptResult out;
  if (ns.r == 2.0) {
    // f(x)^2 = x^T K x with K = sum_k w_k B_k^T B_k, B_k the (optionally
    // diagonal-masked) transposed slice.
    Mat kmat = Mat::Zero(n, n);
    for (Index k = 0; k < a.m(); ++k) {
      if (ns.weights[k] == 0.0) continue;
      Mat b = a.slice(k).transpose();
      if (exclude_diagonal) b.diagonal().setZero();
      kmat.noalias() += ns.weights[k] * (b.transpose() * b);
    }
    auto [lmax, u] = top_eigen_sym(kmat);
    out.value = lr_u1_objective(a, ns, u, exclude_diagonal);
    out.argmax = u;
    out.exact = true;
    return out;
  }

  const double r = ns.r;
  const Mat diag = a.diag_matrix();
  SphereObjective obj;
  obj.value = [&](const Vec& x) { return lr_u1_objective(a, ns, x, exclude_diagonal); };
  obj.value_grad = [&, r](const Vec& x, Vec& grad) {
    Mat m = exclude_diagonal ? contract_first_offdiag(a, x) : a.contract_first(x);
    const double f = lr_u1_objective(a, ns, x, exclude_diagonal);
    if (f <= 0 || !std::isfinite(f)) {
      grad = Vec::Zero(x.size());
      return f;
    }
    // d f / d m_jk = w_k u_k^{r-2} f^{1-r} m_jk with u_k the smoothed
    // column norm; then pull back through the contraction.
    Mat gm(m.rows(), m.cols());
    for (Index k = 0; k < a.m(); ++k) {
      const double uk = std::sqrt(m.col(k).squaredNorm() + kSmoothEps);
      gm.col(k) = ns.weights[k] * std::pow(uk, r - 2.0) * std::pow(f, 1.0 - r) * m.col(k);
    }
    grad = a.contract_second_sum(gm);
    if (exclude_diagonal) {
      grad -= (diag.array() * gm.array()).rowwise().sum().matrix();
    }
    return f;
  };
  out = sphere_maximize(n, obj, opts);
  return out;
}

OptResult v_injective(const CoefficientTensor& a, const NormSpec& ns, const OptOptions& opts) {
  ns.check_compatible(a.m());
  const Index n = a.n();
  OptResult out;

  if (ns.kind == NormKind::Polytope) {
    // For each dual point the bilinear sup is the operator norm of the
    // contracted slice; the polytope sup is their maximum.
    double best = -1.0;
    Vec best_t;
    for (const Vec& t : ns.points) {
      Mat at = Mat::Zero(n, n);
      for (Index k = 0; k < a.m(); ++k) {
        if (t[k] != 0.0) at.noalias() += t[k] * a.slice(k);
      }
      const double v = largest_singular_value(at);
      if (v > best) {
        best = v;
        best_t = t;
      }
    }
    Mat at = Mat::Zero(n, n);
    for (Index k = 0; k < a.m(); ++k) {
      if (best_t[k] != 0.0) at.noalias() += best_t[k] * a.slice(k);
    }
    Eigen::JacobiSVD<Mat> svd(at, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.value = best;
    out.argmax = svd.matrixU().col(0);
    out.argmax_y = svd.matrixV().col(0);
    out.exact = true;
    return out;
  }

  // Alternating maximization. For fixed x the inner problem over y is a
  // norm-of-linear-map sup with operator contract_first(x); for fixed y
  // the roles swap to contract_second(y). Half-steps are exact for Scalar
  // and Lr r = 2, warm-started monotone ascent otherwise, so the objective
  // never decreases between half-steps.
  OptOptions inner = opts;
  inner.restarts = 1;

  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  bool best_converged = false;

  auto run_from = [&](Vec x0) {
    Vec x = std::move(x0);
    Vec y;
    double f = -std::numeric_limits<double>::infinity();
    bool converged = false;
    int stable = 0;
    std::vector<double> trace;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
      auto [fy, ynew] = norm_linop_sup(a.contract_first(x), ns, inner, y.size() ? &y : nullptr);
      y = std::move(ynew);
      if (opts.record_trace) trace.push_back(fy);
      auto [fx, xnew] = norm_linop_sup(a.contract_second(y), ns, inner, &x);
      x = std::move(xnew);
      if (opts.record_trace) trace.push_back(fx);
      const double rel = (fx - f) / std::max(std::abs(fx), 1e-300);
      f = fx;
      if (rel < opts.tol) {
        if (++stable >= opts.stable_iters) {
          converged = true;
          break;
        }
      } else {
        stable = 0;
      }
    }
    return std::tuple<double, Vec, Vec, bool, std::vector<double>>(
        f, std::move(x), std::move(y), converged, std::move(trace));
  };

  const int restarts = std::max(1, opts.restarts);
  for (int kr = 0; kr < restarts; ++kr) {
    SampleRng rng(opts.seed, std::uint64_t(kr));
    Vec x0(n);
    for (Index i = 0; i < n; ++i) x0[i] = rng.gaussian();
    const double xn = x0.norm();
    if (xn > 0) x0 /= xn;
    else x0 = Vec::Unit(n, 0);
    auto [f, x, y, converged, trace] = run_from(std::move(x0));
    if (f > best) {
      second = best;
      best = f;
      out.argmax = std::move(x);
      out.argmax_y = std::move(y);
      best_converged = converged;
      if (opts.record_trace) out.trace = std::move(trace);
    } else if (f > second) {
      second = f;
    }
  }
  out.value = best;
  out.restarts_used = restarts;
  out.converged = best_converged;
  out.gap_estimate = std::isfinite(second) ? best - second : 0.0;
  return out;
}

double delta_infty(const CoefficientTensor& a, const NormSpec& ns, const OptOptions&) {
  if (ns.kind != NormKind::Polytope) throw ScopeError("delta_infty requires a Polytope norm");
  ns.check_compatible(a.m());
  const Index n = a.n();
  std::vector<Mat> slices(a.m());
  for (Index k = 0; k < a.m(); ++k) slices[k] = a.slice(k);
  double best = 0.0;
  const Index np = Index(ns.points.size());
  for (Index p = 0; p < np; ++p) {
    for (Index q = p + 1; q < np; ++q) {
      const Vec d = ns.points[p] - ns.points[q];
      Mat ad = Mat::Zero(n, n);
      for (Index k = 0; k < a.m(); ++k) {
        if (d[k] != 0.0) ad.noalias() += d[k] * slices[k];
      }
      best = std::max(best, largest_singular_value(ad));
    }
  }
  return best;
}

OptResult type2_column_sup(const CoefficientTensor& a, const NormSpec& ns,
                           const OptOptions& opts) {
  ns.check_compatible(a.m());
  const Index n = a.n();
  OptResult out;

  auto objective = [&](const Vec& x) {
    const Mat m = contract_first_offdiag(a, x);
    double acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double nj = norm_eval(m.row(j).transpose(), ns);
      acc += nj * nj;
    }
    return std::sqrt(acc);
  };

  if (ns.kind == NormKind::Scalar ||
      (ns.kind == NormKind::Lr && ns.r == 2.0)) {
    // Scalar reduces to the off-diagonal operator norm; Lr r = 2 to the
    // same weighted flattening as lr_u1_sup.
    Mat kmat = Mat::Zero(n, n);
    for (Index k = 0; k < a.m(); ++k) {
      const double w = (ns.kind == NormKind::Scalar) ? 1.0 : ns.weights[k];
      if (w == 0.0) continue;
      Mat b = a.slice(k).transpose();
      b.diagonal().setZero();
      kmat.noalias() += w * (b.transpose() * b);
    }
    auto [lmax, u] = top_eigen_sym(kmat);
    out.value = objective(u);
    out.argmax = u;
    out.exact = true;
    return out;
  }

  SphereObjective obj;
  obj.value = objective;
  obj.value_grad = [&](const Vec& x, Vec& grad) {
    const Mat m = contract_first_offdiag(a, x);
    double acc = 0.0;
    Mat gm = Mat::Zero(n, a.m());
    for (Index j = 0; j < n; ++j) {
      const Vec row = m.row(j).transpose();
      const double nj = norm_eval(row, ns);
      acc += nj * nj;
      gm.row(j) = (nj * norm_subgradient(row, ns)).transpose();
    }
    const double f = std::sqrt(acc);
    if (f <= 0) {
      grad = Vec::Zero(n);
      return f;
    }
    gm /= f;
    grad = a.contract_second_sum(gm);
    grad -= (a.diag_matrix().array() * gm.array()).rowwise().sum().matrix();
    return f;
  };
  out = sphere_maximize(n, obj, opts);
  return out;
}

}  // namespace chaosbounds
