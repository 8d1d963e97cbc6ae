#pragma once

#include <cstdint>
#include <string>

#include "chaosbounds/core.hpp"

namespace chaosbounds {

enum class Family {
  Diagonal,
  RankOne,
  GaussianRandom,
  Circulant,
  SparseBernoulli,
  PaperAdversarial,  // diagonal + rank-one mixture
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct FamilySpec {
  Family family = Family::GaussianRandom;
  Index n = 8;
  Index m = 1;
  NormSpec ns = NormSpec::scalar();
  double density = 0.05;     // SparseBernoulli
  bool unit_entries = false; // Diagonal: a_iik = 1 instead of Gaussian draws
  bool zero_diag = false;

  std::string label() const;
};

/// Generates a symmetric tensor of the requested family. Output always
/// passes validation with symmetric = true; identical (spec, seed) pairs
/// reproduce bit-identical tensors.
CoefficientTensor gen_family(const FamilySpec& spec, std::uint64_t seed);

}  // namespace chaosbounds
