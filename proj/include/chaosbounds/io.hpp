#pragma once

#include <string>

#include <json.hpp>

#include "chaosbounds/core.hpp"

namespace chaosbounds {

using Json = nlohmann::json;

/// A tensor together with the target norm it is meant to be measured in;
/// the on-disk JSON schema carries both.
struct Problem {
  CoefficientTensor tensor;
  NormSpec space;
};

Json normspec_to_json(const NormSpec& ns);
NormSpec normspec_from_json(const Json& j);

/// Schema: {"n", "m", "symmetric", "zero_diagonal", "space": {...},
/// "entries": {"dense": [...] row-major} | {"coo": [[i,j,k,value]...]}}.
/// Indices are 0-based. Dense output is emitted below the dense storage
/// limit, coo above (and always for sparse-stored tensors).
Json tensor_to_json(const CoefficientTensor& t, const NormSpec& ns);
Problem problem_from_json(const Json& j);

Problem load_problem(const std::string& path);
void save_problem(const std::string& path, const CoefficientTensor& t, const NormSpec& ns);

}  // namespace chaosbounds
