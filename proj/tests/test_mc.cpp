#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaosbounds/functionals.hpp"
#include "chaosbounds/mc.hpp"

using namespace chaosbounds;

namespace {

CoefficientTensor random_tensor(Index n, Index m, std::uint64_t seed, bool zero_diag = false) {
  SampleRng rng(seed, 0);
  std::vector<double> raw(static_cast<std::size_t>(n * n * m));
  for (double& v : raw) v = rng.gaussian();
  TensorOptions opts;
  opts.symmetrize = true;
  opts.zero_diag = zero_diag;
  return validate_tensor(n, m, raw, opts);
}

CoefficientTensor unit_scalar() {
  return validate_tensor(1, 1, std::vector<double>{1.0}, {});
}

}  // namespace

TEST_CASE("sample_form definitions") {
  const CoefficientTensor one = unit_scalar();

  SUBCASE("n=1 centered quadratic is g^2 - 1") {
    SampleRng rng(5, 0);
    const Vec v = sample_form(one, FormKind::of(FormVariant::CenteredQuadratic),
                              DistSpec::gaussian(), rng);
    SampleRng rng2(5, 0);
    const double g = rng2.gaussian();
    CHECK(v[0] == doctest::Approx(g * g - 1.0).epsilon(1e-15));
  }

  SUBCASE("diagonal form on a zero-diagonal tensor is exactly zero") {
    const CoefficientTensor t = random_tensor(5, 2, 9, /*zero_diag=*/true);
    SampleRng rng(6, 0);
    const Vec v = sample_form(t, FormKind::of(FormVariant::DiagonalOnly), DistSpec::gaussian(), rng);
    CHECK(v.norm() == 0.0);
  }

  SUBCASE("Rademacher centered quadratic on the identity vanishes") {
    const CoefficientTensor id = tensor_from_slices({Mat::Identity(6, 6)}, {});
    SampleRng rng(7, 0);
    const Vec v = sample_form(id, FormKind::of(FormVariant::CenteredQuadratic),
                              DistSpec::rademacher(), rng);
    CHECK(v[0] == doctest::Approx(0.0));
  }

  SUBCASE("noncentered minus centered equals the trace") {
    const CoefficientTensor t = random_tensor(4, 2, 10);
    SampleRng r1(11, 3), r2(11, 3);
    const Vec a = sample_form(t, FormKind::of(FormVariant::Noncentered), DistSpec::gaussian(), r1);
    const Vec b = sample_form(t, FormKind::of(FormVariant::CenteredQuadratic),
                              DistSpec::gaussian(), r2);
    CHECK((a - b - t.slice_trace()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("linear_x requires a compatible x") {
    const CoefficientTensor t = random_tensor(4, 1, 12);
    SampleRng rng(13, 0);
    FormKind bad = FormKind::linear_x(Vec::Ones(3));
    CHECK_THROWS_AS(sample_form(t, bad, DistSpec::gaussian(), rng), ScopeError);
  }
}

TEST_CASE("moment estimate: variance of g^2 - 1") {
  const MomentEstimate e =
      estimate_moment(unit_scalar(), NormSpec::scalar(),
                      FormKind::of(FormVariant::CenteredQuadratic), DistSpec::gaussian(), 2.0,
                      1 << 14, 2024);
  CHECK(e.ci_low <= std::sqrt(2.0));
  CHECK(e.ci_high >= std::sqrt(2.0));
  CHECK(e.ci_low <= e.value);
  CHECK(e.value <= e.ci_high);
}

TEST_CASE("moment estimate: mean absolute value of the independent array form") {
  const CoefficientTensor t = random_tensor(6, 1, 21);
  const MomentEstimate e =
      estimate_moment(t, NormSpec::scalar(), FormKind::of(FormVariant::LinearGij),
                      DistSpec::gaussian(), 1.0, 1 << 14, 2025);
  const double expected = std::sqrt(2.0 / std::numbers::pi) * hs_norm(t);
  CHECK(e.ci_low <= expected);
  CHECK(e.ci_high >= expected);
}

TEST_CASE("expected norms on the identity") {
  const Index n = 16;
  const CoefficientTensor id = tensor_from_slices({Mat::Identity(n, n)}, {});
  const MomentEstimate chaos =
      estimate_expected_norm(id, NormSpec::scalar(), FormKind::of(FormVariant::CenteredQuadratic),
                             DistSpec::gaussian(), 1 << 14, 31);
  // Cauchy-Schwarz on the variance: E|sum (g_i^2 - 1)| <= sqrt(2 n).
  CHECK(chaos.value <= std::sqrt(2.0 * n) * 1.02);

  const MomentEstimate lin =
      estimate_expected_norm(id, NormSpec::scalar(), FormKind::of(FormVariant::LinearGij),
                             DistSpec::gaussian(), 1 << 14, 32);
  const double expected = std::sqrt(2.0 / std::numbers::pi) * std::sqrt(double(n));
  CHECK(lin.ci_low <= expected);
  CHECK(lin.ci_high >= expected);

  // Paper-backed cap: the two means together stay below (sqrt(2)+1) ||A||_HS.
  for (std::uint64_t s = 0; s < 5; ++s) {
    const CoefficientTensor t = random_tensor(8, 1, 40 + s);
    const MomentEstimate a =
        estimate_expected_norm(t, NormSpec::scalar(),
                               FormKind::of(FormVariant::CenteredQuadratic),
                               DistSpec::gaussian(), 1 << 13, 50 + s);
    const MomentEstimate b = estimate_expected_norm(
        t.offdiagonal(), NormSpec::scalar(), FormKind::of(FormVariant::LinearGij),
        DistSpec::gaussian(), 1 << 13, 60 + s);
    const double slack = (a.ci_high - a.ci_low) + (b.ci_high - b.ci_low);
    CHECK(a.value + b.value <= (std::sqrt(2.0) + 1.0) * hs_norm(t) + slack);
  }
}

TEST_CASE("tail estimates") {
  const CoefficientTensor one = unit_scalar();
  const NormPool pool = sample_norm_pool(one, NormSpec::scalar(),
                                         FormKind::of(FormVariant::CenteredQuadratic),
                                         DistSpec::gaussian(), 1 << 14, 77);

  SUBCASE("t = 0 gives p_hat = 1") {
    CHECK(tail_from_pool(pool, 0.0).p_hat == 1.0);
  }
  SUBCASE("t beyond the sampled maximum gives p_hat = 0 with a positive Wilson upper") {
    const double maxv = *std::max_element(pool.norms.begin(), pool.norms.end());
    const TailEstimate te = tail_from_pool(pool, maxv * 1.01);
    CHECK(te.p_hat == 0.0);
    CHECK(te.ci_high > 0.0);
  }
  SUBCASE("P(|g^2 - 1| >= 1) = erfc(1)") {
    const double expected = std::erfc(1.0);  // 0.15729920705028513
    const TailEstimate te = tail_from_pool(pool, 1.0);
    CHECK(te.ci_low <= expected);
    CHECK(te.ci_high >= expected);
  }
}

TEST_CASE("moments are reproducible bit-for-bit and monotone in p") {
  const CoefficientTensor t = random_tensor(6, 2, 90);
  const NormSpec ns = NormSpec::lr_unit(2.0, 2);
  const NormPool pool = sample_norm_pool(t, ns, FormKind::of(FormVariant::CenteredQuadratic),
                                         DistSpec::gaussian(), 1 << 12, 91);
  const NormPool pool2 = sample_norm_pool(t, ns, FormKind::of(FormVariant::CenteredQuadratic),
                                          DistSpec::gaussian(), 1 << 12, 91);
  REQUIRE(pool.norms.size() == pool2.norms.size());
  for (std::size_t i = 0; i < pool.norms.size(); ++i) {
    CHECK(pool.norms[i] == pool2.norms[i]);  // bit-identical
  }

  double prev = 0.0;
  for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 16.0, 32.0}) {
    const double v = moment_from_pool(pool, p).value;
    CHECK(v >= prev * (1 - 1e-12));
    prev = v;
  }
}

TEST_CASE("large moment orders stay finite through log-space accumulation") {
  // Norms around 1e80 would overflow naive p-th power sums at p = 32.
  NormPool pool;
  pool.seed = 1;
  pool.norms.assign(1024, 1e80);
  pool.norms[0] = 5e80;
  const MomentEstimate e = moment_from_pool(pool, 32.0);
  CHECK(std::isfinite(e.value));
  CHECK(e.value >= 1e80);
  CHECK(e.value <= 6e80);
}

TEST_CASE("moment orders above 32 are refused unless forced") {
  NormPool pool;
  pool.seed = 1;
  pool.norms.assign(64, 1.0);
  CHECK_THROWS_AS(moment_from_pool(pool, 33.0), ScopeError);
  CHECK(moment_from_pool(pool, 33.0, /*force=*/true).value == doctest::Approx(1.0));
  CHECK_THROWS_AS(moment_from_pool(pool, 0.5), ValidationError);
}

TEST_CASE("default sample counts") {
  CHECK(default_samples(8.0) == (1 << 14));
  CHECK(default_samples(8.5) == (1 << 17));
  CHECK(default_samples(32.0) == (1 << 17));
}

TEST_CASE("decoupled and coupled off-diagonal moments stay within the band") {
  for (std::uint64_t s = 0; s < 4; ++s) {
    const CoefficientTensor t = random_tensor(8, 1, 300 + s, /*zero_diag=*/true);
    const NormPool coupled =
        sample_norm_pool(t, NormSpec::scalar(), FormKind::of(FormVariant::OffdiagQuadratic),
                         DistSpec::gaussian(), 1 << 13, 301);
    const NormPool decoupled =
        sample_norm_pool(t, NormSpec::scalar(), FormKind::of(FormVariant::DecoupledOffdiag),
                         DistSpec::gaussian(), 1 << 13, 302);
    for (double p : {1.0, 2.0, 4.0, 8.0}) {
      const double ratio =
          moment_from_pool(coupled, p).value / moment_from_pool(decoupled, p).value;
      CHECK(ratio >= 1.0 / 20.0);
      CHECK(ratio <= 20.0);
    }
  }
}

TEST_CASE("exponential and centered-square diagonals are equivalent within a decade") {
  std::vector<CooEntry> coo;
  for (Index i = 0; i < 12; ++i) coo.push_back({i, i, 0, 1.0 + 0.1 * double(i)});
  const CoefficientTensor t = validate_tensor(12, 1, coo, {});
  const NormPool a = sample_norm_pool(t, NormSpec::scalar(),
                                      FormKind::of(FormVariant::DiagonalOnly),
                                      DistSpec::gaussian(), 1 << 13, 400);
  const NormPool b = sample_norm_pool(t, NormSpec::scalar(),
                                      FormKind::of(FormVariant::DiagonalExp),
                                      DistSpec::gaussian(), 1 << 13, 401);
  for (double p : {1.0, 2.0, 4.0}) {
    const double ratio = moment_from_pool(b, p).value / moment_from_pool(a, p).value;
    CHECK(ratio >= 0.1);
    CHECK(ratio <= 10.0);
  }
}

TEST_CASE("sup_x_expected_norm") {
  SUBCASE("diagonal tensor with excluded diagonal gives zero") {
    std::vector<CooEntry> coo;
    for (Index i = 0; i < 5; ++i) coo.push_back({i, i, 0, double(i + 1)});
    const CoefficientTensor t = validate_tensor(5, 1, coo, {});
    OptOptions opts;
    opts.restarts = 4;
    opts.max_iters = 100;
    const OptResult r = sup_x_expected_norm(t, NormSpec::scalar(), DistSpec::gaussian(), true,
                                            1024, 1000, opts);
    CHECK(r.value == doctest::Approx(0.0));
  }

  SUBCASE("scalar case matches the analytic reduction within 2%") {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const CoefficientTensor t = random_tensor(8, 1, 1100 + s);
      OptOptions opts;
      opts.restarts = 6;
      opts.max_iters = 300;
      const OptResult r = sup_x_expected_norm(t, NormSpec::scalar(), DistSpec::gaussian(), true,
                                              4096, 1200 + s, opts);
      const double analytic =
          std::sqrt(2.0 / std::numbers::pi) * op_norm(t.offdiagonal());
      CHECK(r.value == doctest::Approx(analytic).epsilon(0.02));
      CHECK(r.fresh_value == doctest::Approx(analytic).epsilon(0.02));
      CHECK(!r.overfit);
    }
  }

  SUBCASE("single entry a_121: sup is sqrt(2/pi) at x = e1") {
    std::vector<CooEntry> coo = {{0, 1, 0, 1.0}};
    const CoefficientTensor t = validate_tensor(2, 1, coo, {});
    OptOptions opts;
    opts.restarts = 4;
    opts.max_iters = 200;
    const OptResult r = sup_x_expected_norm(t, NormSpec::scalar(), DistSpec::gaussian(), true,
                                            8192, 1300, opts);
    CHECK(r.value == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(0.03));
    CHECK(std::abs(r.argmax[0]) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("subgaussian parameter tails hold for the built-in families") {
  const std::vector<double> grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  CHECK(subgaussian_tail_ok(DistSpec::gaussian(), 1, 1 << 15, grid));
  CHECK(subgaussian_tail_ok(DistSpec::rademacher(), 2, 1 << 15, grid));
  CHECK(subgaussian_tail_ok(DistSpec::uniform_scaled(), 3, 1 << 15, grid));
  CHECK(subgaussian_tail_ok(DistSpec::truncated_gaussian(), 4, 1 << 15, grid));
  // A deliberately too-small alpha fails the check.
  DistSpec bad = DistSpec::gaussian();
  bad.alpha = 0.4;
  CHECK(!subgaussian_tail_ok(bad, 5, 1 << 15, grid));
}

TEST_CASE("built-in families are mean zero with unit variance") {
  for (const DistSpec& d : {DistSpec::gaussian(), DistSpec::rademacher(),
                            DistSpec::uniform_scaled(), DistSpec::truncated_gaussian()}) {
    double s1 = 0.0, s2 = 0.0;
    const std::int64_t n = 1 << 16;
    for (std::int64_t i = 0; i < n; ++i) {
      SampleRng rng(123, std::uint64_t(i));
      const double x = d.draw(rng);
      s1 += x;
      s2 += x * x;
    }
    s1 /= double(n);
    s2 /= double(n);
    CHECK(std::abs(s1) < 0.02);
    CHECK(s2 == doctest::Approx(1.0).epsilon(0.03));
  }
}
