// Copyright 2026 The stsvm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stsvm/common.hpp"
#include "stsvm/trainer.hpp"

// Versioned, self-describing model file. Doubles are written with shortest
// round-trip precision, so deserializing reproduces predictions bit-exactly
// and identical models serialize to identical bytes.

namespace stsvm {

namespace detail {

using json = nlohmann::json;

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

inline Vector vector_from_json(const json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline Matrix matrix_from_json(const json& j) {
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  return m;
}

inline KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "gaussian") return KernelKind::Gaussian;
  if (name == "laplacian") return KernelKind::Laplacian;
  if (name == "inv_square_dist") return KernelKind::InvSquareDist;
  if (name == "inv_dist") return KernelKind::InvDist;
  fail(ErrorCode::InvalidArgument, "unknown kernel kind '" + name + "'");
}

inline json kernel_config_to_json(const KernelConfig& config) {
  json families = json::array();
  for (const auto& family : config.families)
    families.push_back({{"kind", kernel_kind_name(family.kind)},
                        {"sigmas", family.sigma_exponents}});
  return {{"families", families}, {"feature_dim", config.feature_dim}};
}

inline KernelConfig kernel_config_from_json(const json& j) {
  KernelConfig config;
  config.feature_dim = j.at("feature_dim").get<int>();
  for (const auto& f : j.at("families")) {
    KernelFamily family;
    family.kind = kernel_kind_from_name(f.at("kind").get<std::string>());
    family.sigma_exponents = f.at("sigmas").get<std::vector<double>>();
    config.families.push_back(std::move(family));
  }
  return config;
}

}  // namespace detail

inline std::string serialize_model(const ModelArtifact& model) {
  using detail::json;
  json j;
  j["format"] = "stsvm-model";
  j["version"] = 1;
  j["variant"] = variant_name(model.variant);
  j["converged"] = model.converged;
  j["kernel"] = detail::kernel_config_to_json(model.kernel);
  j["weights"] = detail::to_json(model.weights.d);
  j["alpha"] = detail::to_json(model.alpha);
  j["bias"] = model.bias;
  j["support"] = detail::to_json(model.support);
  j["labels"] = detail::to_json(model.labels.values);
  j["nt"] = model.labels.nt;
  if (model.standardizer) {
    j["standardizer"] = {{"mean", detail::to_json(model.standardizer->mean)},
                         {"scale", detail::to_json(model.standardizer->scale)}};
  } else {
    j["standardizer"] = nullptr;
  }
  j["config"] = {{"c", model.config.c},
                 {"theta", model.config.theta},
                 {"epsilon", model.config.epsilon},
                 {"lambda", model.config.lambda},
                 {"kernel_count", model.config.kernel_count},
                 {"tol_d", model.config.tol_d},
                 {"max_inner", model.config.max_inner},
                 {"max_outer", model.config.max_outer},
                 {"seed", model.config.seed},
                 {"standardize", model.config.standardize},
                 {"refine", model.config.refine},
                 {"penalty_scope",
                  model.config.penalty_scope == PenaltyScope::Full ? "full" : "target_only"},
                 {"clamp_target", model.config.clamp_target},
                 {"kkt_tol", model.config.kkt_tol},
                 {"max_pair_updates", model.config.max_pair_updates}};
  json log = json::array();
  for (const auto& record : model.log) {
    json inner = json::array();
    for (const auto& it : record.inner)
      inner.push_back({{"d", detail::to_json(it.d)}, {"h", it.h}});
    log.push_back({{"iteration", record.iteration},
                   {"h", record.h_value},
                   {"L_before", record.objective_before_refine},
                   {"L_after", record.objective_after_refine},
                   {"weight_change", record.weight_change},
                   {"flips", record.label_flips},
                   {"inner", std::move(inner)}});
  }
  j["log"] = std::move(log);
  return j.dump(2) + "\n";
}

inline ModelArtifact deserialize_model(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::IoError, std::string("model parse error: ") + e.what());
  }
  require(j.value("format", "") == "stsvm-model", ErrorCode::IoError,
          "not an stsvm model file");
  require(j.value("version", 0) == 1, ErrorCode::IoError, "unsupported model version");

  ModelArtifact model;
  model.variant = variant_from_name(j.at("variant").get<std::string>());
  model.converged = j.at("converged").get<bool>();
  model.kernel = detail::kernel_config_from_json(j.at("kernel"));
  model.weights.d = detail::vector_from_json(j.at("weights"));
  model.alpha = detail::vector_from_json(j.at("alpha"));
  model.bias = j.at("bias").get<double>();
  model.support = detail::matrix_from_json(j.at("support"));
  model.labels.values = detail::vector_from_json(j.at("labels"));
  model.labels.nt = j.at("nt").get<Eigen::Index>();
  if (!j.at("standardizer").is_null()) {
    Standardizer s;
    s.mean = detail::vector_from_json(j.at("standardizer").at("mean"));
    s.scale = detail::vector_from_json(j.at("standardizer").at("scale"));
    model.standardizer = std::move(s);
  }
  const auto& c = j.at("config");
  model.config.c = c.at("c").get<double>();
  model.config.theta = c.at("theta").get<double>();
  model.config.epsilon = c.at("epsilon").get<double>();
  model.config.lambda = c.at("lambda").get<double>();
  model.config.kernel_count = c.at("kernel_count").get<int>();
  model.config.tol_d = c.at("tol_d").get<double>();
  model.config.max_inner = c.at("max_inner").get<int>();
  model.config.max_outer = c.at("max_outer").get<int>();
  model.config.seed = c.at("seed").get<std::uint64_t>();
  model.config.standardize = c.at("standardize").get<bool>();
  model.config.refine = c.at("refine").get<bool>();
  model.config.penalty_scope = c.at("penalty_scope").get<std::string>() == "full"
                                   ? PenaltyScope::Full
                                   : PenaltyScope::TargetOnly;
  model.config.clamp_target = c.at("clamp_target").get<bool>();
  model.config.kkt_tol = c.at("kkt_tol").get<double>();
  model.config.max_pair_updates = c.at("max_pair_updates").get<long>();
  model.config.variant = model.variant;
  for (const auto& r : j.at("log")) {
    OuterRecord record;
    record.iteration = r.at("iteration").get<int>();
    record.h_value = r.at("h").get<double>();
    record.objective_before_refine = r.at("L_before").get<double>();
    record.objective_after_refine = r.at("L_after").get<double>();
    record.weight_change = r.at("weight_change").get<double>();
    record.label_flips = r.at("flips").get<int>();
    for (const auto& it : r.at("inner")) {
      InnerIterate iterate;
      iterate.d = detail::vector_from_json(it.at("d"));
      iterate.h = it.at("h").get<double>();
      record.inner.push_back(std::move(iterate));
    }
    model.log.push_back(std::move(record));
  }
  return model;
}

inline void save_model(const std::filesystem::path& path, const ModelArtifact& model) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  out << serialize_model(model);
  require(out.good(), ErrorCode::IoError, "write failed for " + path.string());
}

inline ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::MissingFile, "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

}  // namespace stsvm
