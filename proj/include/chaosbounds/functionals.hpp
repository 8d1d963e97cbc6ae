#pragma once

#include "chaosbounds/core.hpp"
#include "chaosbounds/sphere_opt.hpp"

namespace chaosbounds {

/// Hilbert-Schmidt (Frobenius) norm of a scalar-valued tensor (m = 1).
double hs_norm(const CoefficientTensor& a);

/// Operator norm of a scalar-valued tensor (m = 1): the largest singular
/// value, computed through the eigen-decomposition of the Gram matrix.
double op_norm(const CoefficientTensor& a);

/// sup over the Hilbert-Schmidt unit ball {x_ij} of || sum_ij a_ij x_ij ||.
/// Exact for Scalar (equals the HS norm), Polytope (duality reduces each
/// dual point to an l2 norm) and Lr with r = 2 (top eigenvalue of the
/// weighted Gram matrix); projected gradient ascent otherwise.
OptResult u_hs_sup(const CoefficientTensor& a, const NormSpec& ns, const OptOptions& opts = {});

/// The injective two-sphere norm V = sup_{|x|_2, |y|_2 <= 1}
/// || sum_ij a_ij x_i y_j ||, by alternating maximization with exact
/// half-steps where the value-space norm allows them (Scalar, Lr r = 2)
/// and an exact dual-point reduction for Polytope.
OptResult v_injective(const CoefficientTensor& a, const NormSpec& ns, const OptOptions& opts = {});

/// || sqrt(sum_ij a_ij^2) ||_{L_r} = (sum_k w_k (sum_ij a_ijk^2)^{r/2})^{1/r}.
double lr_sqrt_sum(const CoefficientTensor& a, const NormSpec& ns);

/// The objective of lr_u1_sup at a point x:
/// (sum_k w_k (sum_j (sum_{i (!= j if excluded)} a_ijk x_i)^2)^{r/2})^{1/r}.
double lr_u1_objective(const CoefficientTensor& a, const NormSpec& ns, const Vec& x,
                       bool exclude_diagonal);

/// sup of lr_u1_objective over the unit sphere in x. Exact via the
/// eigen-decomposition of the weighted flattening when r = 2.
OptResult lr_u1_sup(const CoefficientTensor& a, const NormSpec& ns, bool exclude_diagonal,
                    const OptOptions& opts = {});

/// sup over unit x, y and dual points t, t' of
/// | sum_ijk a_ijk x_i y_j (t_k - t'_k) |, for Polytope norms. Each pair
/// reduces to the operator norm of the contracted slice, so the value is
/// exact.
double delta_infty(const CoefficientTensor& a, const NormSpec& ns, const OptOptions& opts = {});

/// sup over the unit sphere in x of sqrt(sum_j || sum_{i != j} a_ij x_i ||^2),
/// the norm-square column sum entering type-2 bounds. Exact for Scalar and
/// Lr r = 2; projected ascent otherwise.
OptResult type2_column_sup(const CoefficientTensor& a, const NormSpec& ns,
                           const OptOptions& opts = {});

/// Internal building block: sup over the unit sphere of z -> ||M^T z||_ns
/// for a d x m matrix M, with optional warm start. Exact for Scalar,
/// Polytope and Lr r = 2.
std::pair<double, Vec> norm_linop_sup(const Mat& m_op, const NormSpec& ns,
                                      const OptOptions& opts, const Vec* warm = nullptr);

}  // namespace chaosbounds
