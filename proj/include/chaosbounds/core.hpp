#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chaosbounds {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;
using Index = Eigen::Index;

/// Raised when input data violates a precondition (bad dimensions,
/// non-finite entries, incompatible norm specification).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation is invoked outside its supported scope,
/// e.g. a scalar-only functional on a vector-valued tensor.
class ScopeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NormKind { Scalar, Lr, Polytope };

/// Target norm on the value space R^m.
///
/// Scalar is |v| on R^1. Lr is the L_r norm under a weighted counting
/// measure, (sum_k w_k |v_k|^r)^(1/r). Polytope is max_{t in points}
/// |<t, v>|; this is a seminorm when the points do not span R^m, which is
/// accepted and documented behavior.
struct NormSpec {
  NormKind kind = NormKind::Scalar;
  double r = 2.0;           // Lr only, r >= 1
  Vec weights;              // Lr only, nonnegative, length m
  std::vector<Vec> points;  // Polytope only, nonempty, each length m

  static NormSpec scalar();
  static NormSpec lr(double r, Vec weights);
  static NormSpec lr_unit(double r, Index m);
  static NormSpec polytope(std::vector<Vec> points);

  /// Value-space dimension implied by the spec.
  Index dim() const;

  /// Throws ValidationError unless the spec is internally consistent and
  /// matches value-space dimension m.
  void check_compatible(Index m) const;

  std::string kind_name() const;
};

/// Evaluates the norm of a value-space element under `ns`.
double norm_eval(const Vec& v, const NormSpec& ns);

/// A subgradient of v -> norm_eval(v, ns) at v. Returns zero at v = 0.
/// Kinks of the Lr norm for r < 2 are smoothed (eps inside the square
/// root), so this is intended for ascent directions, not exact duality.
Vec norm_subgradient(const Vec& v, const NormSpec& ns);

struct CooEntry {
  Index i = 0, j = 0, k = 0;
  double value = 0.0;
};

enum class StorageMode { Auto, Dense, Sparse };

struct TensorOptions {
  bool symmetrize = false;
  bool zero_diag = false;
  StorageMode storage = StorageMode::Auto;
};

/// Dense tensors switch to coordinate-sparse storage above this many
/// logical entries (n * n * m).
inline constexpr Index kDenseEntryLimit = Index(1) << 24;

/// The coefficient array a_{ijk}, i,j in [n), k in [m), with symmetry and
/// diagonal metadata. Immutable after construction; all member functions
/// are const and safe to call concurrently.
///
/// Storage is a flat (n*n) x m matrix, column k holding slice k in
/// column-major (i,j) order: flat(i + n*j, k) = a_{ijk}. Small tensors are
/// dense, large ones sparse; the contraction kernels below cover both.
class CoefficientTensor {
 public:
  CoefficientTensor() = default;

  Index n() const { return n_; }
  Index m() const { return m_; }
  bool symmetric() const { return symmetric_; }
  bool zero_diagonal() const { return zero_diagonal_; }
  bool is_sparse() const { return std::holds_alternative<SparseMat>(flat_); }
  Index logical_size() const { return n_ * n_ * m_; }

  double entry(Index i, Index j, Index k) const;

  /// Slice k as a dense n x n matrix (materialized if sparse).
  Mat slice(Index k) const;

  const Mat& dense_flat() const;
  const SparseMat& sparse_flat() const;

  // Contraction kernels. g, h, x, y are length n; w is length n*n in the
  // same column-major vec order as the flat storage; H is n x m.
  Vec quad_form(const Vec& g) const;                  // (g^T A_k g)_k
  Vec bilinear_form(const Vec& g, const Vec& h) const;// (g^T A_k h)_k
  Vec diag_bilinear(const Vec& g, const Vec& h) const;// (sum_i a_iik g_i h_i)_k
  Vec linear_array(const Vec& w) const;               // flat^T w
  Vec apply_flat(const Vec& d) const;                 // flat d, d length m
  Mat contract_first(const Vec& x) const;             // (sum_i a_ijk x_i)_{jk}
  Mat contract_second(const Vec& y) const;            // (sum_j a_ijk y_j)_{ik}
  Vec contract_xy(const Vec& x, const Vec& y) const;  // (x^T A_k y)_k
  Vec contract_second_sum(const Mat& H) const;        // sum_k A_k H.col(k)

  Mat diag_matrix() const;   // n x m, (i,k) -> a_iik
  Vec slice_trace() const;   // (sum_i a_iik)_k
  Vec slice_sqnorm() const;  // (sum_ij a_ijk^2)_k
  Mat gram() const;          // m x m, flat^T flat

  /// Copy with the generalized diagonal a_iik zeroed.
  CoefficientTensor offdiagonal() const;
  /// Copy with every entry multiplied by c.
  CoefficientTensor scaled(double c) const;

  std::vector<CooEntry> to_coo() const;

  static CoefficientTensor from_storage(Index n, Index m, Mat dense_flat,
                                        bool symmetric, bool zero_diagonal);
  static CoefficientTensor from_storage(Index n, Index m, SparseMat sparse_flat,
                                        bool symmetric, bool zero_diagonal);

 private:
  Index n_ = 0, m_ = 0;
  bool symmetric_ = false;
  bool zero_diagonal_ = false;
  std::variant<Mat, SparseMat> flat_;
};

/// Validates and normalizes raw dense data, row-major over (i, j, k):
/// raw[(i*n + j)*m + k] = a_{ijk}. With opts.symmetrize the entries become
/// (a_{ijk} + a_{jik}) / 2; with opts.zero_diag the slices a_{iik} are
/// zeroed. The symmetric / zero_diagonal flags on the result reflect the
/// final data, checked exactly.
CoefficientTensor validate_tensor(Index n, Index m, const std::vector<double>& raw,
                                  const TensorOptions& opts = {});

/// Same, from coordinate data. Duplicate coordinates are summed.
CoefficientTensor validate_tensor(Index n, Index m, const std::vector<CooEntry>& coo,
                                  const TensorOptions& opts = {});

/// Convenience for building from per-k dense slices.
CoefficientTensor tensor_from_slices(const std::vector<Mat>& slices,
                                     const TensorOptions& opts = {});

/// The norm alpha_A(y) = (sum_i (sum_{jk} a_{ijk} y_{jk})^2)^(1/2) for an
/// n x m argument y. Zero exactly when y annihilates every slice.
double alpha_A(const CoefficientTensor& A, const Mat& y);

}  // namespace chaosbounds
