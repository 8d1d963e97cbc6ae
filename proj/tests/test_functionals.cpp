#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "chaosbounds/functionals.hpp"
#include "chaosbounds/rng.hpp"

using namespace chaosbounds;

namespace {

CoefficientTensor random_tensor(Index n, Index m, std::uint64_t seed, bool symmetrize = true) {
  SampleRng rng(seed, 0);
  std::vector<double> raw(static_cast<std::size_t>(n * n * m));
  for (double& v : raw) v = rng.gaussian();
  TensorOptions opts;
  opts.symmetrize = symmetrize;
  return validate_tensor(n, m, raw, opts);
}

CoefficientTensor scalar_matrix(const Mat& a) {
  return tensor_from_slices({a}, {});
}

// Brute-force oracle for 2x2xm tensors: product grid over the two circles,
// then a fine local grid around the best cell.
double grid_oracle_v(const CoefficientTensor& a, const NormSpec& ns, int coarse = 3000) {
  REQUIRE(a.n() == 2);
  const auto value = [&](double th, double ph) {
    Vec x(2), y(2);
    x << std::cos(th), std::sin(th);
    y << std::cos(ph), std::sin(ph);
    return norm_eval(a.contract_xy(x, y), ns);
  };
  const double tau = 2.0 * std::numbers::pi;
  double best = -1.0, bth = 0.0, bph = 0.0;
  for (int i = 0; i < coarse; ++i) {
    const double th = tau * i / coarse;
    for (int j = 0; j < coarse; ++j) {
      const double ph = tau * j / coarse;
      const double v = value(th, ph);
      if (v > best) {
        best = v;
        bth = th;
        bph = ph;
      }
    }
  }
  const double step = tau / coarse;
  for (int i = -200; i <= 200; ++i) {
    for (int j = -200; j <= 200; ++j) {
      const double v = value(bth + step * i / 100.0, bph + step * j / 100.0);
      best = std::max(best, v);
    }
  }
  return best;
}

}  // namespace

TEST_CASE("hs_norm basics and re-summation oracle") {
  CHECK(hs_norm(scalar_matrix(Mat::Identity(4, 4))) == doctest::Approx(2.0));
  CHECK(hs_norm(scalar_matrix(Mat::Ones(2, 2))) == doctest::Approx(2.0));

  const CoefficientTensor t = random_tensor(5, 1, 17);
  double acc = 0.0;
  for (Index j = 0; j < 5; ++j) {
    for (Index i = 0; i < 5; ++i) acc += t.entry(i, j, 0) * t.entry(i, j, 0);
  }
  CHECK(hs_norm(t) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));

  CHECK_THROWS_AS(hs_norm(random_tensor(3, 2, 1)), ScopeError);
}

TEST_CASE("op_norm basics") {
  CHECK(op_norm(scalar_matrix(Mat::Identity(3, 3))) == doctest::Approx(1.0));

  SampleRng rng(3, 0);
  Vec x(4), y(4);
  for (Index i = 0; i < 4; ++i) x[i] = rng.gaussian();
  for (Index i = 0; i < 4; ++i) y[i] = rng.gaussian();
  x *= 2.0 / x.norm();
  y *= 3.0 / y.norm();
  CHECK(op_norm(scalar_matrix(x * y.transpose())) == doctest::Approx(6.0).epsilon(1e-10));

  Mat perm(2, 2);
  perm << 0, 1, 1, 0;
  CHECK(op_norm(scalar_matrix(perm)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(op_norm(random_tensor(3, 2, 2)), ScopeError);
}

TEST_CASE("u_hs_sup scalar equals hs_norm") {
  const CoefficientTensor id = scalar_matrix(Mat::Identity(4, 4));
  const OptResult r = u_hs_sup(id, NormSpec::scalar());
  CHECK(r.value == doctest::Approx(2.0));
  CHECK(r.exact);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CoefficientTensor t = random_tensor(8, 1, 100 + s);
    CHECK(u_hs_sup(t, NormSpec::scalar()).value ==
          doctest::Approx(hs_norm(t)).epsilon(1e-10));
  }
}

TEST_CASE("u_hs_sup Lr r=2 equals the flattening singular value") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Index n = 4, m = 3;
    const CoefficientTensor t = random_tensor(n, m, 200 + s);
    const NormSpec ns = NormSpec::lr_unit(2.0, m);
    // Oracle: dense eigen-decomposition of B B^T, B the m x n^2 flattening.
    Mat b(m, n * n);
    for (Index k = 0; k < m; ++k) {
      Index c = 0;
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) b(k, c++) = t.entry(i, j, k);
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(b * b.transpose(), Eigen::EigenvaluesOnly);
    const double oracle = std::sqrt(es.eigenvalues().maxCoeff());
    CHECK(u_hs_sup(t, ns).value == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("u_hs_sup polytope duality equals max slice Frobenius norm") {
  const CoefficientTensor t = random_tensor(3, 2, 301);
  const NormSpec ns = NormSpec::polytope({Vec::Unit(2, 0), Vec::Unit(2, 1)});
  const double f0 = t.slice(0).norm(), f1 = t.slice(1).norm();
  CHECK(u_hs_sup(t, ns).value == doctest::Approx(std::max(f0, f1)).epsilon(1e-12));
}

TEST_CASE("u_hs_sup general Lr ascent brackets the r=2 anchor") {
  // For unit weights, ||v||_{L_r} is within m^{|1/r - 1/2|} of ||v||_2, so
  // the optimized value must live in the corresponding bracket.
  const Index n = 4, m = 3;
  const CoefficientTensor t = random_tensor(n, m, 777);
  const double anchor = u_hs_sup(t, NormSpec::lr_unit(2.0, m)).value;
  for (double r : {1.0, 1.5, 3.0, 4.0}) {
    OptOptions opts;
    opts.restarts = 12;
    const OptResult res = u_hs_sup(t, NormSpec::lr_unit(r, m), opts);
    CHECK(res.converged);
    const double stretch = std::pow(double(m), std::abs(1.0 / r - 0.5));
    CHECK(res.value <= anchor * stretch * (1 + 1e-6));
    CHECK(res.value >= anchor / stretch * (1 - 1e-6));
  }
}

TEST_CASE("v_injective scalar cross-checks against op_norm") {
  for (std::uint64_t s = 0; s < 25; ++s) {
    const Index n = 4 + Index(s % 12);
    const CoefficientTensor t = random_tensor(n, 1, 400 + s);
    OptOptions opts;
    opts.restarts = 8;
    const OptResult r = v_injective(t, NormSpec::scalar(), opts);
    CHECK(r.value == doctest::Approx(op_norm(t)).epsilon(1e-8));
    CHECK(r.converged);
    // value equals the objective at the argmax
    CHECK(norm_eval(t.contract_xy(r.argmax, r.argmax_y), NormSpec::scalar()) ==
          doctest::Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("v_injective single off-diagonal pair with singleton polytope") {
  std::vector<CooEntry> coo = {{0, 1, 0, 1.0}, {1, 0, 0, 1.0}};
  const CoefficientTensor t = validate_tensor(2, 1, coo, {});
  const NormSpec ns = NormSpec::polytope({Vec::Ones(1)});
  CHECK(v_injective(t, ns).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("v_injective matches the grid oracle on 2x2x2 tensors") {
  const std::vector<NormSpec> specs = {
      NormSpec::lr_unit(1.0, 2),
      NormSpec::lr_unit(2.0, 2),
      NormSpec::lr_unit(3.0, 2),
      NormSpec::polytope({Vec::Unit(2, 0), Vec::Unit(2, 1)}),
      NormSpec::polytope({(Vec(2) << 0.8, -0.6).finished()}),
  };
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CoefficientTensor t = random_tensor(2, 2, 500 + s);
    const NormSpec& ns = specs[std::size_t(s % specs.size())];
    OptOptions opts;
    opts.restarts = 8;
    const OptResult r = v_injective(t, ns, opts);
    const double oracle = grid_oracle_v(t, ns, 1500);
    CHECK(r.value == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("v_injective alternating objective is nondecreasing per half-step") {
  const CoefficientTensor t = random_tensor(6, 3, 900);
  for (double r : {1.0, 3.0}) {
    OptOptions opts;
    opts.restarts = 2;
    opts.record_trace = true;
    const OptResult res = v_injective(t, NormSpec::lr_unit(r, 3), opts);
    REQUIRE(res.trace.size() > 2);
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i] >= res.trace[i - 1] * (1 - 1e-12));
    }
  }
}

TEST_CASE("lr_sqrt_sum closed forms") {
  // m = 1, unit weight: reduces to the HS norm for any r.
  const CoefficientTensor t = random_tensor(5, 1, 31);
  for (double r : {1.0, 2.0, 3.0}) {
    CHECK(lr_sqrt_sum(t, NormSpec::lr_unit(r, 1)) ==
          doctest::Approx(hs_norm(t)).epsilon(1e-12));
  }

  // a_ijk = delta_ij delta_k1, n = 4, r = 1, weights (1,1) -> 2.
  std::vector<CooEntry> coo;
  for (Index i = 0; i < 4; ++i) coo.push_back({i, i, 0, 1.0});
  const CoefficientTensor d = validate_tensor(4, 2, coo, {});
  CHECK(lr_sqrt_sum(d, NormSpec::lr_unit(1.0, 2)) == doctest::Approx(2.0));

  // random 3x3x4, r = 3: independent rearranged summation.
  const CoefficientTensor u = random_tensor(3, 4, 32);
  const NormSpec ns = NormSpec::lr_unit(3.0, 4);
  double acc = 0.0;
  for (Index k = 4; k-- > 0;) {
    double sq = 0.0;
    for (Index i = 3; i-- > 0;) {
      for (Index j = 3; j-- > 0;) sq += u.entry(i, j, k) * u.entry(i, j, k);
    }
    acc += std::pow(std::sqrt(sq), 3.0);
  }
  CHECK(lr_sqrt_sum(u, ns) == doctest::Approx(std::pow(acc, 1.0 / 3.0)).epsilon(1e-12));

  CHECK_THROWS_AS(lr_sqrt_sum(t, NormSpec::scalar()), ScopeError);
}

TEST_CASE("lr_u1_sup trivial cases") {
  // n = 1 with excluded diagonal: the inner sum is empty.
  const CoefficientTensor t1 = validate_tensor(1, 2, std::vector<double>{1.0, 2.0}, {});
  CHECK(lr_u1_sup(t1, NormSpec::lr_unit(2.0, 2), true).value == doctest::Approx(0.0));

  // Purely diagonal tensor with excluded diagonal.
  std::vector<CooEntry> coo;
  for (Index i = 0; i < 4; ++i) coo.push_back({i, i, 0, double(i + 1)});
  const CoefficientTensor t2 = validate_tensor(4, 1, coo, {});
  CHECK(lr_u1_sup(t2, NormSpec::lr_unit(2.0, 1), true).value == doctest::Approx(0.0));
}

TEST_CASE("lr_u1_sup r=2 matches the flattening eigen oracle") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Index n = 5, m = 2;
    const CoefficientTensor t = random_tensor(n, m, 600 + s);
    // Oracle: largest singular value of the (m n) x n map x -> (sum_i a_ijk x_i)_{jk},
    // diagonal included.
    Mat big(m * n, n);
    for (Index k = 0; k < m; ++k) {
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) big(k * n + j, i) = t.entry(i, j, k);
      }
    }
    const double oracle = largest_singular_value(big);
    CHECK(lr_u1_sup(t, NormSpec::lr_unit(2.0, m), false).value ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("lr_u1_sup variants agree on zero-diagonal tensors") {
  for (double r : {1.0, 2.0, 3.0}) {
    TensorOptions opts;
    opts.symmetrize = true;
    opts.zero_diag = true;
    SampleRng rng(700 + std::uint64_t(r), 0);
    std::vector<double> raw(4 * 4 * 2);
    for (double& v : raw) v = rng.gaussian();
    const CoefficientTensor t = validate_tensor(4, 2, raw, opts);
    OptOptions oo;
    oo.restarts = 12;
    const double a = lr_u1_sup(t, NormSpec::lr_unit(r, 2), true, oo).value;
    const double b = lr_u1_sup(t, NormSpec::lr_unit(r, 2), false, oo).value;
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("delta_infty polytope identities") {
  const CoefficientTensor t = random_tensor(4, 2, 800);
  Vec tt(2);
  tt << 0.3, -1.1;

  // Singleton: t = t' always.
  CHECK(delta_infty(t, NormSpec::polytope({tt})) == doctest::Approx(0.0));

  // Symmetric pair doubles the singleton injective norm.
  const double v1 = v_injective(t, NormSpec::polytope({tt})).value;
  CHECK(delta_infty(t, NormSpec::polytope({tt, -tt})) == doctest::Approx(2.0 * v1).epsilon(1e-10));

  CHECK_THROWS_AS(delta_infty(t, NormSpec::scalar()), ScopeError);
}

TEST_CASE("delta_infty matches a grid oracle on 2x2x2") {
  const CoefficientTensor t = random_tensor(2, 2, 801);
  const std::vector<Vec> pts = {Vec::Unit(2, 0), Vec::Unit(2, 1)};
  const NormSpec ns = NormSpec::polytope(pts);
  // Oracle: the difference-set polytope via the same grid routine.
  double best = 0.0;
  for (const Vec& p : pts) {
    for (const Vec& q : pts) {
      const Vec d = p - q;
      if (d.norm() == 0) continue;
      best = std::max(best, grid_oracle_v(t, NormSpec::polytope({d}), 1500));
    }
  }
  CHECK(delta_infty(t, ns) == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("type2_column_sup reduces to the off-diagonal operator norm for scalars") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const CoefficientTensor t = random_tensor(6, 1, 820 + s);
    const double oracle = op_norm(t.offdiagonal());
    CHECK(type2_column_sup(t, NormSpec::scalar()).value ==
          doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("type2_column_sup general Lr stays within the r=2 bracket") {
  const Index n = 5, m = 3;
  const CoefficientTensor t = random_tensor(n, m, 830);
  const double anchor = type2_column_sup(t, NormSpec::lr_unit(2.0, m)).value;
  for (double r : {1.0, 4.0}) {
    OptOptions opts;
    opts.restarts = 12;
    const double v = type2_column_sup(t, NormSpec::lr_unit(r, m), opts).value;
    const double stretch = std::pow(double(m), std::abs(1.0 / r - 0.5));
    CHECK(v <= anchor * stretch * (1 + 1e-6));
    CHECK(v >= anchor / stretch * (1 - 1e-6));
  }
}

TEST_CASE("functionals scale linearly in the tensor") {
  const CoefficientTensor t = random_tensor(4, 2, 840);
  const CoefficientTensor t3 = t.scaled(3.0);
  const NormSpec l3 = NormSpec::lr_unit(3.0, 2);
  OptOptions opts;
  opts.restarts = 8;
  CHECK(u_hs_sup(t3, l3, opts).value ==
        doctest::Approx(3.0 * u_hs_sup(t, l3, opts).value).epsilon(1e-10));
  CHECK(v_injective(t3, l3, opts).value ==
        doctest::Approx(3.0 * v_injective(t, l3, opts).value).epsilon(1e-10));
  CHECK(lr_sqrt_sum(t3, l3) == doctest::Approx(3.0 * lr_sqrt_sum(t, l3)).epsilon(1e-12));
  CHECK(lr_u1_sup(t3, l3, true, opts).value ==
        doctest::Approx(3.0 * lr_u1_sup(t, l3, true, opts).value).epsilon(1e-10));

  const CoefficientTensor s1 = random_tensor(5, 1, 841);
  CHECK(hs_norm(s1.scaled(2.5)) == doctest::Approx(2.5 * hs_norm(s1)).epsilon(1e-12));
  CHECK(op_norm(s1.scaled(2.5)) == doctest::Approx(2.5 * op_norm(s1)).epsilon(1e-10));
}

TEST_CASE("optimizer reported maxima are nondecreasing in restarts") {
  const CoefficientTensor t = random_tensor(5, 3, 850);
  const NormSpec ns = NormSpec::lr_unit(1.5, 3);
  double prev = -1.0;
  for (int restarts : {2, 4, 8, 16}) {
    OptOptions opts;
    opts.restarts = restarts;
    const double v = u_hs_sup(t, ns, opts).value;
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1.0;
  for (int restarts : {1, 2, 4, 8}) {
    OptOptions opts;
    opts.restarts = restarts;
    const double v = lr_u1_sup(t, ns, true, opts).value;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("OptResult value matches the objective at the argmax") {
  const CoefficientTensor t = random_tensor(4, 2, 860);
  const NormSpec ns = NormSpec::lr_unit(3.0, 2);
  OptOptions opts;
  opts.restarts = 6;
  const OptResult u = u_hs_sup(t, ns, opts);
  CHECK(norm_eval(t.linear_array(u.argmax), ns) == doctest::Approx(u.value).epsilon(1e-9));
  const OptResult l = lr_u1_sup(t, ns, true, opts);
  CHECK(lr_u1_objective(t, ns, l.argmax, true) == doctest::Approx(l.value).epsilon(1e-9));
}
