#include "chaosbounds/core.hpp"

#include <algorithm>
#include <cmath>

namespace chaosbounds {

namespace {

// Smoothing width used inside square roots when differentiating Lr
// objectives with r < 2; keeps ascent directions finite at kinks.
constexpr double kSmoothEps = 1e-12;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw ValidationError(std::string("non-finite entry in ") + what);
  }
}

}  // namespace

NormSpec NormSpec::scalar() {
  NormSpec ns;
  ns.kind = NormKind::Scalar;
  return ns;
}

NormSpec NormSpec::lr(double r, Vec weights) {
  NormSpec ns;
  ns.kind = NormKind::Lr;
  ns.r = r;
  ns.weights = std::move(weights);
  return ns;
}

NormSpec NormSpec::lr_unit(double r, Index m) {
  return lr(r, Vec::Ones(m));
}

NormSpec NormSpec::polytope(std::vector<Vec> points) {
  NormSpec ns;
  ns.kind = NormKind::Polytope;
  ns.points = std::move(points);
  return ns;
}

Index NormSpec::dim() const {
  switch (kind) {
    case NormKind::Scalar:
      return 1;
    case NormKind::Lr:
      return weights.size();
    case NormKind::Polytope:
      return points.empty() ? 0 : points.front().size();
  }
  return 0;
}

std::string NormSpec::kind_name() const {
  switch (kind) {
    case NormKind::Scalar:
      return "scalar";
    case NormKind::Lr:
      return "lr";
    case NormKind::Polytope:
      return "polytope";
  }
  return "?";
}

void NormSpec::check_compatible(Index m) const {
  switch (kind) {
    case NormKind::Scalar:
      if (m != 1) throw ValidationError("scalar norm requires m = 1");
      return;
    case NormKind::Lr: {
      if (!(r >= 1.0) || !std::isfinite(r)) {
        throw ValidationError("Lr norm requires finite r >= 1");
      }
      if (weights.size() != m) {
        throw ValidationError("Lr weights length does not match m");
      }
      bool any_positive = false;
      for (Index k = 0; k < weights.size(); ++k) {
        check_finite(weights[k], "Lr weights");
        if (weights[k] < 0) throw ValidationError("Lr weights must be nonnegative");
        if (weights[k] > 0) any_positive = true;
      }
      if (!any_positive) throw ValidationError("Lr needs at least one positive weight");
      return;
    }
    case NormKind::Polytope: {
      if (points.empty()) throw ValidationError("polytope norm needs at least one point");
      for (const Vec& t : points) {
        if (t.size() != m) throw ValidationError("polytope point length does not match m");
        for (Index k = 0; k < t.size(); ++k) check_finite(t[k], "polytope points");
      }
      return;
    }
  }
}

double norm_eval(const Vec& v, const NormSpec& ns) {
  ns.check_compatible(v.size());
  switch (ns.kind) {
    case NormKind::Scalar:
      return std::abs(v[0]);
    case NormKind::Lr: {
      if (ns.r == 2.0) {
        return std::sqrt(ns.weights.dot(v.cwiseAbs2()));
      }
      double acc = 0.0;
      for (Index k = 0; k < v.size(); ++k) {
        if (ns.weights[k] > 0) acc += ns.weights[k] * std::pow(std::abs(v[k]), ns.r);
      }
      return std::pow(acc, 1.0 / ns.r);
    }
    case NormKind::Polytope: {
      double best = 0.0;
      for (const Vec& t : ns.points) best = std::max(best, std::abs(t.dot(v)));
      return best;
    }
  }
  return 0.0;
}

Vec norm_subgradient(const Vec& v, const NormSpec& ns) {
  ns.check_compatible(v.size());
  switch (ns.kind) {
    case NormKind::Scalar: {
      Vec d(1);
      d[0] = (v[0] > 0) ? 1.0 : (v[0] < 0 ? -1.0 : 0.0);
      return d;
    }
    case NormKind::Lr: {
      const double r = ns.r;
      Vec a = (v.cwiseAbs2().array() + kSmoothEps).sqrt().matrix();
      double nrm = 0.0;
      for (Index k = 0; k < v.size(); ++k) nrm += ns.weights[k] * std::pow(a[k], r);
      nrm = std::pow(nrm, 1.0 / r);
      Vec d = Vec::Zero(v.size());
      if (nrm <= 0 || !std::isfinite(nrm)) return d;
      for (Index k = 0; k < v.size(); ++k) {
        d[k] = ns.weights[k] * v[k] * std::pow(a[k], r - 2.0) * std::pow(nrm, 1.0 - r);
      }
      return d;
    }
    case NormKind::Polytope: {
      double best = -1.0;
      Index arg = 0;
      double sign = 1.0;
      for (Index q = 0; q < Index(ns.points.size()); ++q) {
        double ip = ns.points[q].dot(v);
        if (std::abs(ip) > best) {
          best = std::abs(ip);
          arg = q;
          sign = (ip >= 0) ? 1.0 : -1.0;
        }
      }
      if (best <= 0) return Vec::Zero(v.size());
      return sign * ns.points[arg];
    }
  }
  return Vec::Zero(v.size());
}

// ---------------------------------------------------------------------------
// CoefficientTensor

double CoefficientTensor::entry(Index i, Index j, Index k) const {
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || k < 0 || k >= m_) {
    throw ValidationError("tensor index out of range");
  }
  if (is_sparse()) return std::get<SparseMat>(flat_).coeff(i + n_ * j, k);
  return std::get<Mat>(flat_)(i + n_ * j, k);
}

Mat CoefficientTensor::slice(Index k) const {
  if (k < 0 || k >= m_) throw ValidationError("slice index out of range");
  if (!is_sparse()) {
    return std::get<Mat>(flat_).col(k).reshaped(n_, n_);
  }
  Mat s = Mat::Zero(n_, n_);
  const SparseMat& sp = std::get<SparseMat>(flat_);
  for (SparseMat::InnerIterator it(sp, k); it; ++it) {
    const Index r = it.row();
    s(r % n_, r / n_) = it.value();
  }
  return s;
}

const Mat& CoefficientTensor::dense_flat() const {
  if (is_sparse()) throw ScopeError("tensor is stored sparse");
  return std::get<Mat>(flat_);
}

const SparseMat& CoefficientTensor::sparse_flat() const {
  if (!is_sparse()) throw ScopeError("tensor is stored dense");
  return std::get<SparseMat>(flat_);
}

Vec CoefficientTensor::quad_form(const Vec& g) const {
  return bilinear_form(g, g);
}

Vec CoefficientTensor::bilinear_form(const Vec& g, const Vec& h) const {
  if (g.size() != n_ || h.size() != n_) throw ValidationError("bilinear_form: bad vector length");
  Vec out(m_);
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    // w = vec(g h^T) in column-major order, so flat^T w = (g^T A_k h)_k.
    Vec w(n_ * n_);
    for (Index j = 0; j < n_; ++j) w.segment(j * n_, n_) = g * h[j];
    out.noalias() = f.transpose() * w;
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      double acc = 0.0;
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        acc += it.value() * g[r % n_] * h[r / n_];
      }
      out[k] = acc;
    }
  }
  return out;
}

Vec CoefficientTensor::diag_bilinear(const Vec& g, const Vec& h) const {
  if (g.size() != n_ || h.size() != n_) throw ValidationError("diag_bilinear: bad vector length");
  Mat d = diag_matrix();
  return d.transpose() * g.cwiseProduct(h);
}

Vec CoefficientTensor::linear_array(const Vec& w) const {
  if (w.size() != n_ * n_) throw ValidationError("linear_array: argument must have length n*n");
  if (!is_sparse()) return std::get<Mat>(flat_).transpose() * w;
  return std::get<SparseMat>(flat_).transpose() * w;
}

Vec CoefficientTensor::apply_flat(const Vec& d) const {
  if (d.size() != m_) throw ValidationError("apply_flat: argument must have length m");
  if (!is_sparse()) return std::get<Mat>(flat_) * d;
  return std::get<SparseMat>(flat_) * d;
}

Mat CoefficientTensor::contract_first(const Vec& x) const {
  if (x.size() != n_) throw ValidationError("contract_first: bad vector length");
  Mat out = Mat::Zero(n_, m_);
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      out.col(k).noalias() = f.col(k).reshaped(n_, n_).transpose() * x;
    }
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        out(r / n_, k) += it.value() * x[r % n_];
      }
    }
  }
  return out;
}

Mat CoefficientTensor::contract_second(const Vec& y) const {
  if (y.size() != n_) throw ValidationError("contract_second: bad vector length");
  Mat out = Mat::Zero(n_, m_);
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      out.col(k).noalias() = f.col(k).reshaped(n_, n_) * y;
    }
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        out(r % n_, k) += it.value() * y[r / n_];
      }
    }
  }
  return out;
}

Vec CoefficientTensor::contract_xy(const Vec& x, const Vec& y) const {
  return bilinear_form(x, y);
}

Vec CoefficientTensor::contract_second_sum(const Mat& H) const {
  if (H.rows() != n_ || H.cols() != m_) {
    throw ValidationError("contract_second_sum: argument must be n x m");
  }
  Vec out = Vec::Zero(n_);
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      out.noalias() += f.col(k).reshaped(n_, n_) * H.col(k);
    }
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        out[r % n_] += it.value() * H(r / n_, k);
      }
    }
  }
  return out;
}

Mat CoefficientTensor::diag_matrix() const {
  Mat d = Mat::Zero(n_, m_);
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (Index i = 0; i < n_; ++i) d(i, k) = f(i + n_ * i, k);
    }
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        if (r % n_ == r / n_) d(r % n_, k) = it.value();
      }
    }
  }
  return d;
}

Vec CoefficientTensor::slice_trace() const {
  return diag_matrix().colwise().sum().transpose();
}

Vec CoefficientTensor::slice_sqnorm() const {
  Vec out(m_);
  if (!is_sparse()) {
    out = std::get<Mat>(flat_).colwise().squaredNorm().transpose();
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      double acc = 0.0;
      for (SparseMat::InnerIterator it(sp, k); it; ++it) acc += it.value() * it.value();
      out[k] = acc;
    }
  }
  return out;
}

Mat CoefficientTensor::gram() const {
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    return f.transpose() * f;
  }
  const SparseMat& sp = std::get<SparseMat>(flat_);
  return Mat(SparseMat(sp.transpose() * sp));
}

CoefficientTensor CoefficientTensor::offdiagonal() const {
  CoefficientTensor out = *this;
  if (!is_sparse()) {
    Mat& f = std::get<Mat>(out.flat_);
    for (Index k = 0; k < m_; ++k) {
      for (Index i = 0; i < n_; ++i) f(i + n_ * i, k) = 0.0;
    }
  } else {
    SparseMat& sp = std::get<SparseMat>(out.flat_);
    const Index n = n_;
    sp.prune([n](Index row, Index, double) { return row % n != row / n; });
  }
  out.zero_diagonal_ = true;
  return out;
}

CoefficientTensor CoefficientTensor::scaled(double c) const {
  if (!std::isfinite(c)) throw ValidationError("scale factor must be finite");
  CoefficientTensor out = *this;
  if (!is_sparse()) {
    std::get<Mat>(out.flat_) *= c;
  } else {
    std::get<SparseMat>(out.flat_) *= c;
  }
  if (c == 0.0) out.zero_diagonal_ = true;
  return out;
}

std::vector<CooEntry> CoefficientTensor::to_coo() const {
  std::vector<CooEntry> out;
  if (!is_sparse()) {
    const Mat& f = std::get<Mat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (Index r = 0; r < n_ * n_; ++r) {
        if (f(r, k) != 0.0) out.push_back({r % n_, r / n_, k, f(r, k)});
      }
    }
  } else {
    const SparseMat& sp = std::get<SparseMat>(flat_);
    for (Index k = 0; k < m_; ++k) {
      for (SparseMat::InnerIterator it(sp, k); it; ++it) {
        const Index r = it.row();
        out.push_back({r % n_, r / n_, k, it.value()});
      }
    }
  }
  return out;
}

CoefficientTensor CoefficientTensor::from_storage(Index n, Index m, Mat dense_flat,
                                                  bool symmetric, bool zero_diagonal) {
  CoefficientTensor t;
  t.n_ = n;
  t.m_ = m;
  t.symmetric_ = symmetric;
  t.zero_diagonal_ = zero_diagonal;
  t.flat_ = std::move(dense_flat);
  return t;
}

CoefficientTensor CoefficientTensor::from_storage(Index n, Index m, SparseMat sparse_flat,
                                                  bool symmetric, bool zero_diagonal) {
  CoefficientTensor t;
  t.n_ = n;
  t.m_ = m;
  t.symmetric_ = symmetric;
  t.zero_diagonal_ = zero_diagonal;
  sparse_flat.makeCompressed();
  t.flat_ = std::move(sparse_flat);
  return t;
}

// ---------------------------------------------------------------------------
// validate_tensor

namespace {

void check_dims(Index n, Index m) {
  if (n < 1 || m < 1) throw ValidationError("tensor dimensions must be >= 1");
}

CoefficientTensor finish_dense(Index n, Index m, Mat flat, const TensorOptions& opts) {
  if (!flat.allFinite()) throw ValidationError("non-finite entry in tensor data");
  if (opts.symmetrize) {
    for (Index k = 0; k < m; ++k) {
      Mat s = flat.col(k).reshaped(n, n);
      flat.col(k) = (0.5 * (s + s.transpose())).reshaped();
    }
  }
  if (opts.zero_diag) {
    for (Index k = 0; k < m; ++k) {
      for (Index i = 0; i < n; ++i) flat(i + n * i, k) = 0.0;
    }
  }
  bool sym = true, zd = true;
  for (Index k = 0; k < m && (sym || zd); ++k) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        const double v = flat(i + n * j, k);
        if (i == j && v != 0.0) zd = false;
        if (i < j && v != flat(j + n * i, k)) sym = false;
      }
    }
  }
  return CoefficientTensor::from_storage(n, m, std::move(flat), sym, zd);
}

CoefficientTensor finish_sparse(Index n, Index m, const std::vector<CooEntry>& coo,
                                const TensorOptions& opts) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trip;
  trip.reserve(coo.size() * (opts.symmetrize ? 2 : 1));
  for (const CooEntry& e : coo) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.k < 0 || e.k >= m) {
      throw ValidationError("coo index out of range");
    }
    if (!std::isfinite(e.value)) throw ValidationError("non-finite entry in tensor data");
    if (opts.zero_diag && e.i == e.j) continue;
    if (opts.symmetrize) {
      trip.emplace_back(e.i + n * e.j, e.k, 0.5 * e.value);
      trip.emplace_back(e.j + n * e.i, e.k, 0.5 * e.value);
    } else {
      trip.emplace_back(e.i + n * e.j, e.k, e.value);
    }
  }
  SparseMat sp(n * n, m);
  sp.setFromTriplets(trip.begin(), trip.end());
  sp.prune(0.0, 0.0);
  sp.makeCompressed();

  bool sym = true, zd = true;
  for (Index k = 0; k < m && (sym || zd); ++k) {
    for (SparseMat::InnerIterator it(sp, k); it; ++it) {
      const Index i = it.row() % n, j = it.row() / n;
      if (i == j && it.value() != 0.0) zd = false;
      if (i != j && it.value() != sp.coeff(j + n * i, k)) sym = false;
    }
  }
  return CoefficientTensor::from_storage(n, m, std::move(sp), sym, zd);
}

bool use_sparse(Index n, Index m, StorageMode mode) {
  switch (mode) {
    case StorageMode::Dense:
      return false;
    case StorageMode::Sparse:
      return true;
    case StorageMode::Auto:
      return n * n * m > kDenseEntryLimit;
  }
  return false;
}

}  // namespace

CoefficientTensor validate_tensor(Index n, Index m, const std::vector<double>& raw,
                                  const TensorOptions& opts) {
  check_dims(n, m);
  if (Index(raw.size()) != n * n * m) {
    throw ValidationError("dense data length does not match n*n*m");
  }
  if (use_sparse(n, m, opts.storage)) {
    std::vector<CooEntry> coo;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        for (Index k = 0; k < m; ++k) {
          const double v = raw[(i * n + j) * m + k];
          if (v != 0.0) coo.push_back({i, j, k, v});
        }
      }
    }
    return finish_sparse(n, m, coo, opts);
  }
  Mat flat(n * n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index k = 0; k < m; ++k) flat(i + n * j, k) = raw[(i * n + j) * m + k];
    }
  }
  return finish_dense(n, m, std::move(flat), opts);
}

CoefficientTensor validate_tensor(Index n, Index m, const std::vector<CooEntry>& coo,
                                  const TensorOptions& opts) {
  check_dims(n, m);
  if (use_sparse(n, m, opts.storage)) return finish_sparse(n, m, coo, opts);
  Mat flat = Mat::Zero(n * n, m);
  for (const CooEntry& e : coo) {
    if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n || e.k < 0 || e.k >= m) {
      throw ValidationError("coo index out of range");
    }
    flat(e.i + n * e.j, e.k) += e.value;
  }
  return finish_dense(n, m, std::move(flat), opts);
}

CoefficientTensor tensor_from_slices(const std::vector<Mat>& slices,
                                     const TensorOptions& opts) {
  if (slices.empty()) throw ValidationError("need at least one slice");
  const Index n = slices.front().rows();
  const Index m = Index(slices.size());
  Mat flat(n * n, m);
  for (Index k = 0; k < m; ++k) {
    if (slices[k].rows() != n || slices[k].cols() != n) {
      throw ValidationError("slices must be square with equal dimension");
    }
    flat.col(k) = slices[k].reshaped();
  }
  if (use_sparse(n, m, opts.storage)) {
    std::vector<CooEntry> coo;
    for (Index k = 0; k < m; ++k) {
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (flat(i + n * j, k) != 0.0) coo.push_back({i, j, k, flat(i + n * j, k)});
        }
      }
    }
    return finish_sparse(n, m, coo, opts);
  }
  return finish_dense(n, m, std::move(flat), opts);
}

double alpha_A(const CoefficientTensor& A, const Mat& y) {
  if (y.rows() != A.n() || y.cols() != A.m()) {
    throw ValidationError("alpha_A: argument must be n x m");
  }
  return A.contract_second_sum(y).norm();
}

}  // namespace chaosbounds
