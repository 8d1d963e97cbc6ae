#include <doctest.h>

#include <cmath>

#include "chaosbounds/core.hpp"
#include "chaosbounds/rng.hpp"

using namespace chaosbounds;

namespace {

CoefficientTensor random_tensor(Index n, Index m, std::uint64_t seed,
                                StorageMode mode = StorageMode::Auto) {
  SampleRng rng(seed, 0);
  std::vector<double> raw(static_cast<std::size_t>(n * n * m));
  for (double& v : raw) v = rng.gaussian();
  TensorOptions opts;
  opts.storage = mode;
  return validate_tensor(n, m, raw, opts);
}

Vec random_vec(Index n, std::uint64_t seed) {
  SampleRng rng(seed, 1);
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("validate_tensor keeps symmetric zero-diagonal data unchanged") {
  // 2x2x1 [[0,1],[1,0]] with both flags.
  const std::vector<double> raw = {0, 1, 1, 0};
  TensorOptions opts;
  opts.symmetrize = true;
  opts.zero_diag = true;
  const CoefficientTensor t = validate_tensor(2, 1, raw, opts);
  CHECK(t.symmetric());
  CHECK(t.zero_diagonal());
  CHECK(t.entry(0, 1, 0) == 1.0);
  CHECK(t.entry(1, 0, 0) == 1.0);
  CHECK(t.entry(0, 0, 0) == 0.0);
}

TEST_CASE("validate_tensor symmetrizes with the half-sum convention") {
  // [[0,2],[0,0]] -> [[0,1],[1,0]].
  const std::vector<double> raw = {0, 2, 0, 0};
  TensorOptions opts;
  opts.symmetrize = true;
  const CoefficientTensor t = validate_tensor(2, 1, raw, opts);
  CHECK(t.entry(0, 1, 0) == doctest::Approx(1.0));
  CHECK(t.entry(1, 0, 0) == doctest::Approx(1.0));
  CHECK(t.symmetric());
}

TEST_CASE("validate_tensor rejects NaN and bad dims") {
  std::vector<double> raw = {0, 1, 1, std::nan("")};
  CHECK_THROWS_AS(validate_tensor(2, 1, raw, {}), ValidationError);
  CHECK_THROWS_AS(validate_tensor(2, 1, std::vector<double>{1, 2, 3}, {}), ValidationError);
  CHECK_THROWS_AS(validate_tensor(0, 1, std::vector<double>{}, {}), ValidationError);
}

TEST_CASE("validate_tensor is idempotent") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CoefficientTensor t = [&] {
      SampleRng rng(s, 7);
      std::vector<double> raw(3 * 3 * 2);
      for (double& v : raw) v = rng.gaussian();
      TensorOptions opts;
      opts.symmetrize = true;
      opts.zero_diag = (s % 2 == 0);
      return validate_tensor(3, 2, raw, opts);
    }();
    // Re-validate the tensor's own serialized entries with the same flags.
    std::vector<double> again(3 * 3 * 2, 0.0);
    for (const CooEntry& e : t.to_coo()) again[std::size_t((e.i * 3 + e.j) * 2 + e.k)] = e.value;
    TensorOptions opts;
    opts.symmetrize = true;
    opts.zero_diag = t.zero_diagonal();
    const CoefficientTensor u = validate_tensor(3, 2, again, opts);
    CHECK(u.symmetric() == t.symmetric());
    CHECK(u.zero_diagonal() == t.zero_diagonal());
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        for (Index k = 0; k < 2; ++k) CHECK(u.entry(i, j, k) == t.entry(i, j, k));
      }
    }
  }
}

TEST_CASE("coo and dense inputs agree, duplicates sum") {
  std::vector<CooEntry> coo = {{0, 1, 0, 1.5}, {0, 1, 0, 0.5}, {1, 0, 0, 2.0}};
  const CoefficientTensor t = validate_tensor(2, 1, coo, {});
  CHECK(t.entry(0, 1, 0) == doctest::Approx(2.0));
  CHECK(t.entry(1, 0, 0) == doctest::Approx(2.0));
  CHECK(t.symmetric());
}

TEST_CASE("sparse and dense storage expose identical kernels") {
  const Index n = 5, m = 3;
  SampleRng rng(11, 0);
  std::vector<double> raw(static_cast<std::size_t>(n * n * m));
  for (double& v : raw) v = (rng.uniform01() < 0.4) ? rng.gaussian() : 0.0;
  TensorOptions dense_opts, sparse_opts;
  dense_opts.storage = StorageMode::Dense;
  sparse_opts.storage = StorageMode::Sparse;
  const CoefficientTensor d = validate_tensor(n, m, raw, dense_opts);
  const CoefficientTensor s = validate_tensor(n, m, raw, sparse_opts);
  REQUIRE(s.is_sparse());
  REQUIRE(!d.is_sparse());

  const Vec g = random_vec(n, 3), h = random_vec(n, 4);
  CHECK((d.quad_form(g) - s.quad_form(g)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.bilinear_form(g, h) - s.bilinear_form(g, h)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.contract_first(g) - s.contract_first(g)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.contract_second(g) - s.contract_second(g)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.diag_matrix() - s.diag_matrix()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.gram() - s.gram()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((d.slice_sqnorm() - s.slice_sqnorm()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  Vec w = random_vec(n * n, 5);
  CHECK((d.linear_array(w) - s.linear_array(w)).norm() == doctest::Approx(0.0).epsilon(1e-12));
  Mat hh = Mat::Random(n, m);
  CHECK((d.contract_second_sum(hh) - s.contract_second_sum(hh)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("norm_eval basics") {
  Vec v1(1);
  v1 << -3.0;
  CHECK(norm_eval(v1, NormSpec::scalar()) == 3.0);

  Vec v2(2);
  v2 << 3.0, 4.0;
  CHECK(norm_eval(v2, NormSpec::lr_unit(2.0, 2)) == doctest::Approx(5.0));

  Vec v3(2);
  v3 << 2.0, -5.0;
  CHECK(norm_eval(v3, NormSpec::polytope({Vec::Unit(2, 0), Vec::Unit(2, 1)})) ==
        doctest::Approx(5.0));
}

TEST_CASE("norm_eval rejects incompatible dimensions and bad specs") {
  Vec v(2);
  v << 1, 2;
  CHECK_THROWS_AS(norm_eval(v, NormSpec::scalar()), ValidationError);
  CHECK_THROWS_AS(norm_eval(v, NormSpec::lr_unit(0.5, 2)), ValidationError);
  CHECK_THROWS_AS(norm_eval(v, NormSpec::lr(2.0, Vec::Zero(2))), ValidationError);
  CHECK_THROWS_AS(norm_eval(v, NormSpec::polytope({})), ValidationError);
}

TEST_CASE("norm_eval satisfies triangle inequality and homogeneity") {
  const std::vector<NormSpec> specs = {
      NormSpec::scalar(),
      NormSpec::lr_unit(1.0, 4),
      NormSpec::lr_unit(2.0, 4),
      NormSpec::lr_unit(3.5, 4),
      NormSpec::lr(1.5, (Vec(4) << 0.5, 2.0, 0.0, 1.0).finished()),
      NormSpec::polytope({Vec::Unit(4, 0), Vec::Unit(4, 2),
                          (Vec(4) << 1, -1, 0.5, 0.25).finished()}),
  };
  for (const NormSpec& ns : specs) {
    const Index m = ns.dim() == 1 ? 1 : 4;
    SampleRng rng(99, std::uint64_t(ns.kind));
    for (int it = 0; it < 1000; ++it) {
      Vec a(m), b(m);
      for (Index k = 0; k < m; ++k) a[k] = rng.gaussian();
      for (Index k = 0; k < m; ++k) b[k] = rng.gaussian();
      const double na = norm_eval(a, ns), nb = norm_eval(b, ns);
      const double nab = norm_eval(a + b, ns);
      CHECK(nab <= (na + nb) * (1 + 1e-9) + 1e-12);
      const double c = 0.1 + 3.0 * rng.uniform01();
      CHECK(norm_eval(c * a, ns) == doctest::Approx(c * na).epsilon(1e-9));
      CHECK(norm_eval(-a, ns) == doctest::Approx(na).epsilon(1e-9));
    }
  }
}

TEST_CASE("alpha_A simple values") {
  // n = m = 1, a = 2, y = 3 -> 6.
  const CoefficientTensor t1 = validate_tensor(1, 1, std::vector<double>{2.0}, {});
  Mat y1(1, 1);
  y1 << 3.0;
  CHECK(alpha_A(t1, y1) == doctest::Approx(6.0));

  // identity slices: a_{ij1} = delta_ij, y = ((1),(1)) -> sqrt(2).
  const CoefficientTensor t2 = validate_tensor(2, 1, std::vector<double>{1, 0, 0, 1}, {});
  Mat y2(2, 1);
  y2 << 1.0, 1.0;
  CHECK(alpha_A(t2, y2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("alpha_A matches independent reversed-loop summation") {
  const CoefficientTensor t = random_tensor(3, 2, 42);
  SampleRng rng(43, 0);
  Mat y(3, 2);
  for (Index j = 0; j < 3; ++j) {
    for (Index k = 0; k < 2; ++k) y(j, k) = rng.gaussian();
  }
  // Oracle: reversed loop order, scalar accumulation.
  double acc = 0.0;
  for (Index i = 0; i < 3; ++i) {
    double inner = 0.0;
    for (Index k = 2; k-- > 0;) {
      for (Index j = 3; j-- > 0;) inner += t.entry(i, j, k) * y(j, k);
    }
    acc += inner * inner;
  }
  CHECK(alpha_A(t, y) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
}

TEST_CASE("alpha_A is homogeneous and subadditive") {
  const CoefficientTensor t = random_tensor(4, 3, 7);
  SampleRng rng(8, 0);
  for (int it = 0; it < 200; ++it) {
    Mat y(4, 3), z(4, 3);
    for (Index j = 0; j < 4; ++j) {
      for (Index k = 0; k < 3; ++k) {
        y(j, k) = rng.gaussian();
        z(j, k) = rng.gaussian();
      }
    }
    const double ay = alpha_A(t, y), az = alpha_A(t, z);
    CHECK(alpha_A(t, y + z) <= (ay + az) * (1 + 1e-9) + 1e-12);
    const double c = 0.1 + 2.0 * rng.uniform01();
    CHECK(alpha_A(t, c * y) == doctest::Approx(c * ay).epsilon(1e-9));
  }
  CHECK_THROWS_AS(alpha_A(t, Mat::Zero(3, 3)), ValidationError);
}

TEST_CASE("storage auto rule uses the dense limit") {
  const CoefficientTensor small = random_tensor(4, 2, 1);
  CHECK(!small.is_sparse());
  // Forced sparse still round-trips entries.
  const CoefficientTensor sp = random_tensor(4, 2, 1, StorageMode::Sparse);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 4; ++j) {
      for (Index k = 0; k < 2; ++k) CHECK(sp.entry(i, j, k) == small.entry(i, j, k));
    }
  }
}

TEST_CASE("scaled and offdiagonal copies") {
  const CoefficientTensor t = random_tensor(3, 2, 5);
  const CoefficientTensor s = t.scaled(2.0);
  CHECK(s.entry(1, 2, 0) == doctest::Approx(2.0 * t.entry(1, 2, 0)));
  const CoefficientTensor o = t.offdiagonal();
  CHECK(o.zero_diagonal());
  CHECK(o.entry(1, 1, 0) == 0.0);
  CHECK(o.entry(0, 1, 1) == t.entry(0, 1, 1));
}
