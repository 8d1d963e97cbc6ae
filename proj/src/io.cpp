#include "chaosbounds/io.hpp"

#include <fstream>

namespace chaosbounds {

Json normspec_to_json(const NormSpec& ns) {
  Json j;
  j["kind"] = ns.kind_name();
  if (ns.kind == NormKind::Lr) {
    j["r"] = ns.r;
    j["weights"] = std::vector<double>(ns.weights.begin(), ns.weights.end());
  } else if (ns.kind == NormKind::Polytope) {
    Json pts = Json::array();
    for (const Vec& t : ns.points) {
      pts.push_back(std::vector<double>(t.begin(), t.end()));
    }
    j["points"] = pts;
  }
  return j;
}

NormSpec normspec_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return NormSpec::scalar();
  if (kind == "lr") {
    const auto w = j.at("weights").get<std::vector<double>>();
    Vec weights(Index(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) weights[Index(i)] = w[i];
    return NormSpec::lr(j.at("r").get<double>(), std::move(weights));
  }
  if (kind == "polytope") {
    std::vector<Vec> points;
    for (const Json& p : j.at("points")) {
      const auto v = p.get<std::vector<double>>();
      Vec t(Index(v.size()));
      for (std::size_t i = 0; i < v.size(); ++i) t[Index(i)] = v[i];
      points.push_back(std::move(t));
    }
    return NormSpec::polytope(std::move(points));
  }
  throw ValidationError("unknown norm kind: " + kind);
}

Json tensor_to_json(const CoefficientTensor& t, const NormSpec& ns) {
  Json j;
  j["n"] = t.n();
  j["m"] = t.m();
  j["symmetric"] = t.symmetric();
  j["zero_diagonal"] = t.zero_diagonal();
  j["space"] = normspec_to_json(ns);
  if (!t.is_sparse() && t.logical_size() <= kDenseEntryLimit) {
    const Index n = t.n(), m = t.m();
    std::vector<double> dense(static_cast<std::size_t>(n * n * m));
    const Mat& f = t.dense_flat();
    for (Index i = 0; i < n; ++i) {
      for (Index jj = 0; jj < n; ++jj) {
        for (Index k = 0; k < m; ++k) {
          dense[std::size_t((i * n + jj) * m + k)] = f(i + n * jj, k);
        }
      }
    }
    j["entries"] = Json{{"dense", dense}};
  } else {
    Json coo = Json::array();
    for (const CooEntry& e : t.to_coo()) {
      coo.push_back(Json::array({e.i, e.j, e.k, e.value}));
    }
    j["entries"] = Json{{"coo", coo}};
  }
  return j;
}

Problem problem_from_json(const Json& j) {
  const Index n = j.at("n").get<Index>();
  const Index m = j.at("m").get<Index>();
  TensorOptions opts;  // flags in the file describe data, nothing to normalize
  const Json& entries = j.at("entries");

  CoefficientTensor t;
  if (entries.contains("dense")) {
    t = validate_tensor(n, m, entries.at("dense").get<std::vector<double>>(), opts);
  } else if (entries.contains("coo")) {
    std::vector<CooEntry> coo;
    for (const Json& e : entries.at("coo")) {
      if (!e.is_array() || e.size() != 4) throw ValidationError("coo rows must be [i,j,k,value]");
      coo.push_back({e[0].get<Index>(), e[1].get<Index>(), e[2].get<Index>(),
                     e[3].get<double>()});
    }
    t = validate_tensor(n, m, coo, opts);
  } else {
    throw ValidationError("entries must contain 'dense' or 'coo'");
  }

  if (j.contains("symmetric") && j.at("symmetric").get<bool>() && !t.symmetric()) {
    throw ValidationError("file claims symmetric but data is not");
  }
  if (j.contains("zero_diagonal") && j.at("zero_diagonal").get<bool>() && !t.zero_diagonal()) {
    throw ValidationError("file claims zero_diagonal but data is not");
  }

  Problem prob;
  prob.tensor = std::move(t);
  prob.space = j.contains("space") ? normspec_from_json(j.at("space"))
                                   : (m == 1 ? NormSpec::scalar() : NormSpec::lr_unit(2.0, m));
  prob.space.check_compatible(m);
  return prob;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  Json j;
  in >> j;
  return problem_from_json(j);
}

void save_problem(const std::string& path, const CoefficientTensor& t, const NormSpec& ns) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << tensor_to_json(t, ns).dump(2) << "\n";
}

}  // namespace chaosbounds
