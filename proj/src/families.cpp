#include "chaosbounds/families.hpp"

#include <cmath>

#include "chaosbounds/rng.hpp"

namespace chaosbounds {

const char* family_name(Family f) {
  switch (f) {
    case Family::Diagonal: return "diagonal";
    case Family::RankOne: return "rank_one";
    case Family::GaussianRandom: return "gaussian_random";
    case Family::Circulant: return "circulant";
    case Family::SparseBernoulli: return "sparse_bernoulli";
    case Family::PaperAdversarial: return "adversarial";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "diagonal") return Family::Diagonal;
  if (name == "rank_one") return Family::RankOne;
  if (name == "gaussian_random") return Family::GaussianRandom;
  if (name == "circulant") return Family::Circulant;
  if (name == "sparse_bernoulli") return Family::SparseBernoulli;
  if (name == "adversarial") return Family::PaperAdversarial;
  throw ValidationError("unknown family: " + name);
}

std::string FamilySpec::label() const {
  return std::string(family_name(family)) + "_n" + std::to_string(n) + "_m" +
         std::to_string(m);
}

namespace {

Vec unit_gaussian(SampleRng& rng, Index n) {
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.gaussian();
  const double nn = v.norm();
  return (nn > 0) ? Vec(v / nn) : Vec(Vec::Unit(n, 0));
}

}  // namespace

CoefficientTensor gen_family(const FamilySpec& spec, std::uint64_t seed) {
  const Index n = spec.n, m = spec.m;
  if (n < 1 || m < 1) throw ValidationError("family dims must be >= 1");
  SampleRng rng(derive_seed(seed, std::uint64_t(spec.family), std::uint64_t(n),
                            std::uint64_t(m)),
                0);
  std::vector<Mat> slices(std::size_t(m), Mat::Zero(n, n));

  switch (spec.family) {
    case Family::Diagonal: {
      for (Index k = 0; k < m; ++k) {
        for (Index i = 0; i < n; ++i) {
          slices[std::size_t(k)](i, i) = spec.unit_entries ? 1.0 : rng.gaussian();
        }
      }
      break;
    }
    case Family::RankOne: {
      const Vec x = unit_gaussian(rng, n);
      for (Index k = 0; k < m; ++k) {
        const Vec y = unit_gaussian(rng, n);
        slices[std::size_t(k)] = 0.5 * (x * y.transpose() + y * x.transpose());
      }
      break;
    }
    case Family::GaussianRandom: {
      for (Index k = 0; k < m; ++k) {
        Mat g(n, n);
        for (Index j = 0; j < n; ++j) {
          for (Index i = 0; i < n; ++i) g(i, j) = rng.gaussian();
        }
        slices[std::size_t(k)] = 0.5 * (g + g.transpose());
      }
      break;
    }
    case Family::Circulant: {
      for (Index k = 0; k < m; ++k) {
        Vec c(n);
        for (Index i = 0; i < n; ++i) c[i] = rng.gaussian();
        Mat g(n, n);
        for (Index i = 0; i < n; ++i) {
          for (Index j = 0; j < n; ++j) g(i, j) = c[((i - j) % n + n) % n];
        }
        slices[std::size_t(k)] = 0.5 * (g + g.transpose());
      }
      break;
    }
    case Family::SparseBernoulli: {
      for (Index k = 0; k < m; ++k) {
        Mat g = Mat::Zero(n, n);
        for (Index j = 0; j < n; ++j) {
          for (Index i = 0; i < n; ++i) {
            if (rng.uniform01() < spec.density) g(i, j) = rng.rademacher();
          }
        }
        slices[std::size_t(k)] = 0.5 * (g + g.transpose());
      }
      break;
    }
    case Family::PaperAdversarial: {
      // Comparable-weight mixture of a diagonal part (drives the sqrt(p)
      // branch) and a rank-one part (drives the p V branch).
      const Vec x = unit_gaussian(rng, n);
      for (Index k = 0; k < m; ++k) {
        Mat d = Mat::Zero(n, n);
        for (Index i = 0; i < n; ++i) d(i, i) = rng.gaussian();
        const double dn = d.norm();
        if (dn > 0) d /= dn;
        slices[std::size_t(k)] = d + x * x.transpose();
      }
      break;
    }
  }

  TensorOptions opts;
  opts.symmetrize = true;  // no-op for already-symmetric draws, exact flags either way
  opts.zero_diag = spec.zero_diag;
  return tensor_from_slices(slices, opts);
}

}  // namespace chaosbounds
