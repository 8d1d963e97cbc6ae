#include "chaosbounds/sphere_opt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "chaosbounds/rng.hpp"

namespace chaosbounds {

namespace {

struct RunResult {
  double value = 0.0;
  Vec x;
  bool converged = false;
  std::vector<double> trace;
};

RunResult ascend_impl(const SphereObjective& obj, Vec x, const OptOptions& opts) {
  RunResult res;
  double f = obj.value(x);
  Vec grad(x.size());
  double step = 1.0;
  int stable = 0;
  bool converged = false;
  if (opts.record_trace) res.trace.push_back(f);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    obj.value_grad(x, grad);
    // Remove the radial component; only tangential motion changes a
    // homogeneous objective on the sphere.
    grad -= grad.dot(x) * x;
    const double gnorm = grad.norm();
    if (gnorm <= 1e-300 * std::max(1.0, std::abs(f))) {
      converged = true;
      break;
    }

    double s = step;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vec cand = x + (s / gnorm) * grad;
      const double cn = cand.norm();
      if (cn > 0) {
        cand /= cn;
        const double fc = obj.value(cand);
        if (fc > f) {
          const double rel = (fc - f) / std::max(std::abs(fc), 1e-300);
          x = std::move(cand);
          f = fc;
          step = std::min(s * 1.5, 1e3);
          accepted = true;
          if (opts.record_trace) res.trace.push_back(f);
          stable = (rel < opts.tol) ? stable + 1 : 0;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      // No improving point along the gradient at any tried step size.
      converged = true;
      break;
    }
    if (stable >= opts.stable_iters) {
      converged = true;
      break;
    }
  }
  res.value = f;
  res.x = std::move(x);
  res.converged = converged;
  return res;
}

}  // namespace

std::pair<double, Vec> sphere_ascend(const SphereObjective& obj, Vec start,
                                     const OptOptions& opts) {
  RunResult r = ascend_impl(obj, std::move(start), opts);
  return {r.value, std::move(r.x)};
}

OptResult sphere_maximize(Index dim, const SphereObjective& obj, const OptOptions& opts,
                          const std::vector<Vec>& warm_starts) {
  OptResult out;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  bool best_converged = false;

  auto consume = [&](RunResult&& r) {
    if (r.value > best) {
      second = best;
      best = r.value;
      out.argmax = std::move(r.x);
      best_converged = r.converged;
      if (opts.record_trace) out.trace = std::move(r.trace);
    } else if (r.value > second) {
      second = r.value;
    }
  };

  for (const Vec& w : warm_starts) {
    if (w.size() != dim) continue;
    const double wn = w.norm();
    if (!(wn > 0)) continue;
    consume(ascend_impl(obj, w / wn, opts));
  }

  const int restarts = std::max(1, opts.restarts);
  for (int k = 0; k < restarts; ++k) {
    SampleRng rng(opts.seed, std::uint64_t(k));
    Vec x0(dim);
    for (Index i = 0; i < dim; ++i) x0[i] = rng.gaussian();
    const double nn = x0.norm();
    if (!(nn > 0)) {
      x0.setZero();
      x0[0] = 1.0;
    } else {
      x0 /= nn;
    }
    consume(ascend_impl(obj, std::move(x0), opts));
  }

  out.value = best;
  out.restarts_used = restarts;
  out.converged = best_converged;
  out.gap_estimate = std::isfinite(second) ? best - second : 0.0;
  return out;
}

double largest_singular_value(const Mat& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Mat g;
  if (a.rows() <= a.cols()) {
    g.noalias() = a * a.transpose();
  } else {
    g.noalias() = a.transpose() * a;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lmax = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(0.0, lmax));
}

std::pair<double, Vec> top_eigen_sym(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  const Index last = s.rows() - 1;
  return {es.eigenvalues()[last], es.eigenvectors().col(last)};
}

}  // namespace chaosbounds
