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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stsvm/common.hpp"
#include "stsvm/dataset.hpp"
#include "stsvm/domain_adaptation.hpp"
#include "stsvm/kernel_bank.hpp"
#include "stsvm/kernel_weight_optimizer.hpp"
#include "stsvm/label_refiner.hpp"
#include "stsvm/svm_dual.hpp"

namespace stsvm {

/// The trainable method variants:
///   Stsvm       full alternation: kernel weights + dual, then label refinement
///   StsvmI      one inner pass on the initial source labels, no refinement
///   DtsvmLike   marginal (label-free) adaptation, target-only risk
///   SvmBaseline uniform kernel weights, target-only dual solve
enum class Variant { Stsvm, StsvmI, DtsvmLike, SvmBaseline };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Stsvm: return "stsvm";
    case Variant::StsvmI: return "stsvm-i";
    case Variant::DtsvmLike: return "dtsvm";
    case Variant::SvmBaseline: return "svm";
  }
  return "unknown";
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "stsvm") return Variant::Stsvm;
  if (name == "stsvm-i") return Variant::StsvmI;
  if (name == "dtsvm") return Variant::DtsvmLike;
  if (name == "svm") return Variant::SvmBaseline;
  fail(ErrorCode::InvalidArgument, "unknown variant '" + name + "'");
}

struct TrainConfig {
  double c = 10.0;
  double theta = 1.0;
  double epsilon = 1e-4;
  double lambda = 1.0;
  int kernel_count = 16;
  double tol_d = 1e-4;
  int max_inner = 100;
  int max_outer = 20;
  Variant variant = Variant::Stsvm;
  std::uint64_t seed = 0;
  bool standardize = false;
  bool refine = true;  // switching this off with max_outer=1 reproduces stsvm-i
  PenaltyScope penalty_scope = PenaltyScope::TargetOnly;
  bool clamp_target = true;
  double kkt_tol = 1e-6;
  long max_pair_updates = 1000000;

  void validate() const {
    require(c > 0.0, ErrorCode::InvalidArgument, "C must be positive");
    require(theta > 0.0, ErrorCode::InvalidArgument, "theta must be positive");
    require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be positive");
    require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
    require(tol_d > 0.0, ErrorCode::InvalidArgument, "tol_d must be positive");
    require(max_inner >= 1 && max_outer >= 1, ErrorCode::InvalidArgument,
            "iteration caps must be at least 1");
    KernelConfig::with_kernel_count(kernel_count, 1);  // validates the count
  }

  SolverOptions solver_options() const {
    SolverOptions opts;
    opts.kkt_tol = kkt_tol;
    opts.max_pair_updates = max_pair_updates;
    return opts;
  }
};

/// One outer iteration of the training loop, kept for diagnostics and the
/// structured training log.
struct OuterRecord {
  int iteration = 0;
  double h_value = 0.0;
  double objective_before_refine = 0.0;
  double objective_after_refine = 0.0;
  double weight_change = 0.0;  // sup-norm change of d across the inner loop
  int label_flips = 0;
  std::vector<InnerIterate> inner;
};

struct ModelArtifact {
  Variant variant = Variant::Stsvm;
  TrainConfig config;
  KernelConfig kernel;
  KernelWeights weights;
  Vector alpha;
  double bias = 0.0;
  Matrix support;      // rows the decision function sums over (post-standardize)
  LabelVector labels;  // hardened labels aligned with support rows
  std::optional<Standardizer> standardizer;
  bool converged = false;
  std::vector<OuterRecord> log;
};

struct Predictions {
  Vector scores;
  IntVector labels;
};

/// Scores every row of `features` with the model's decision function.
/// An empty matrix yields empty output.
inline Predictions predict(const ModelArtifact& model, const Matrix& features) {
  Predictions out;
  if (features.rows() == 0) {
    out.scores.resize(0);
    out.labels.resize(0);
    return out;
  }
  require(features.cols() == model.support.cols(), ErrorCode::DimMismatch,
          "prediction features have dim " + std::to_string(features.cols()) +
              ", model expects " + std::to_string(model.support.cols()));
  const Matrix x = model.standardizer ? model.standardizer->apply(features) : features;
  const Matrix cross = cross_kernel_matrix(model.kernel, model.support, x, model.weights);
  out.scores.resize(features.rows());
  out.labels.resize(features.rows());
  DualSolution dual;
  dual.alpha = model.alpha;
  dual.bias = model.bias;
  dual.signed_labels = (2.0 * model.labels.values.array() - 1.0).matrix();
  for (Eigen::Index t = 0; t < features.rows(); ++t) {
    out.scores[t] = dual.decision_function(cross.col(t));
    out.labels[t] = DualSolution::predict_label(out.scores[t]);
  }
  return out;
}

inline Predictions predict(const ModelArtifact& model, const Dataset& data) {
  return predict(model, data.features);
}

namespace detail {

inline LabelVector target_label_vector(const Dataset& target) {
  require(target.labels.has_value(), ErrorCode::InvalidLabel, "target labels required");
  LabelVector y;
  y.nt = target.n();
  y.values = target.labels->cast<double>();
  int positives = target.labels->sum();
  require(positives > 0, ErrorCode::NoPositiveTargets, "target data has no positive labels");
  require(positives < target.n(), ErrorCode::NoNegativeTargets,
          "target data has no negative labels");
  return y;
}

}  // namespace detail

/// Initial combined labels: target truth stacked over the predictions of a
/// uniform-weight SVM trained on the target block alone.
inline LabelVector init_labels_with_bank(const KernelBank& bank, const LabelVector& target_labels,
                                         const TrainConfig& config) {
  const Eigen::Index nt = bank.nt;
  const Eigen::Index ns = bank.ns;
  const KernelWeights uniform = KernelWeights::uniform(bank.size());
  const Matrix k = combine(bank, uniform);

  LabelVector y_target = target_labels;
  DualSolution dual =
      solve_dual(k.topLeftCorner(nt, nt), y_target, config.c, config.theta,
                 config.solver_options());

  LabelVector y;
  y.nt = nt;
  y.values.resize(nt + ns);
  y.values.head(nt) = target_labels.values;
  const Vector beta = (dual.alpha.array() * dual.signed_labels.array()).matrix();
  for (Eigen::Index i = 0; i < ns; ++i) {
    const double score = k.row(nt + i).head(nt).dot(beta) + dual.bias;
    y.values[nt + i] = DualSolution::predict_label(score);
  }
  return y;
}

/// Spec-level convenience that builds its own bank over the stacked data.
inline LabelVector init_labels(const Dataset& target, const Dataset& source,
                               const TrainConfig& config) {
  const Stacked stacked = stack(target, source);
  const KernelBank bank = build_bank(
      stacked, KernelConfig::with_kernel_count(config.kernel_count,
                                               static_cast<int>(stacked.features.cols())));
  return init_labels_with_bank(bank, detail::target_label_vector(target), config);
}

namespace detail {

inline ModelArtifact train_baseline(const Dataset& target, const TrainConfig& config) {
  ModelArtifact model;
  model.variant = Variant::SvmBaseline;
  model.config = config;
  if (config.standardize) {
    model.standardizer = Standardizer::fit(target.features);
    model.support = model.standardizer->apply(target.features);
  } else {
    model.support = target.features;
  }
  Stacked as_stack;
  as_stack.features = model.support;
  as_stack.nt = target.n();
  as_stack.ns = 0;
  model.kernel =
      KernelConfig::with_kernel_count(config.kernel_count, static_cast<int>(target.dim()));
  const KernelBank bank = build_bank(as_stack, model.kernel);
  model.weights = KernelWeights::uniform(bank.size());
  model.labels = target_label_vector(target);
  const DualSolution dual = solve_dual(combine(bank, model.weights), model.labels, config.c,
                                       config.theta, config.solver_options());
  model.alpha = dual.alpha;
  model.bias = dual.bias;
  model.converged = dual.converged;
  return model;
}

inline ModelArtifact train_dtsvm_like(const Dataset& target, const Dataset& source,
                                      const TrainConfig& config) {
  ModelArtifact model;
  model.variant = Variant::DtsvmLike;
  model.config = config;
  Stacked stacked = stack(target, source);
  if (config.standardize) {
    model.standardizer = Standardizer::fit(stacked.features);
    stacked.features = model.standardizer->apply(stacked.features);
  }
  model.kernel = KernelConfig::with_kernel_count(config.kernel_count,
                                                 static_cast<int>(stacked.features.cols()));
  const KernelBank bank = build_bank(stacked, model.kernel);

  const Vector s = marginal_scaling_vector(stacked.nt, stacked.ns);
  Vector p(bank.size());
  for (int m = 0; m < bank.size(); ++m)
    p[m] = s.dot(bank.kernels[static_cast<std::size_t>(m)] * s);

  MklProblem problem;
  problem.bank = &bank;
  problem.projections = {p};
  problem.risk_labels = target_label_vector(target);
  problem.risk_rows = stacked.nt;
  problem.c = config.c;
  problem.theta = config.theta;
  problem.epsilon = config.epsilon;
  problem.solver = config.solver_options();

  InnerLoopConfig inner_cfg{config.tol_d, config.max_inner};
  OuterRecord record;
  record.iteration = 1;
  const InnerState state =
      run_inner_loop(problem, KernelWeights::uniform(bank.size()), inner_cfg, &record.inner);
  record.h_value = state.h_value;
  record.weight_change =
      record.inner.empty() ? 0.0
                           : (record.inner.back().d - record.inner.front().d).cwiseAbs().maxCoeff();

  model.weights = state.weights;
  model.labels = problem.risk_labels;
  model.support = stacked.features.topRows(stacked.nt);
  model.alpha = state.dual.alpha;
  model.bias = state.dual.bias;
  model.converged = state.converged;
  model.log.push_back(std::move(record));
  return model;
}

}  // namespace detail

/// Trains the requested variant. Non-convergence inside the iteration caps is
/// not an error; the artifact records it.
inline ModelArtifact train(const Dataset& target, const std::optional<Dataset>& source,
                           const TrainConfig& config_in) {
  TrainConfig config = config_in;
  config.variant = config_in.variant;
  config.validate();
  target.validate();
  if (source) source->validate();

  if (config.variant == Variant::SvmBaseline) return detail::train_baseline(target, config);
  require(source.has_value(), ErrorCode::InvalidArgument,
          std::string(variant_name(config.variant)) + " requires source data");
  if (config.variant == Variant::DtsvmLike)
    return detail::train_dtsvm_like(target, *source, config);

  if (config.variant == Variant::StsvmI) {
    config.refine = false;
    config.max_outer = 1;
  }

  ModelArtifact model;
  model.variant = config_in.variant;
  model.config = config;

  Stacked stacked = stack(target, *source);
  if (config.standardize) {
    model.standardizer = Standardizer::fit(stacked.features);
    stacked.features = model.standardizer->apply(stacked.features);
  }
  model.kernel = KernelConfig::with_kernel_count(config.kernel_count,
                                                 static_cast<int>(stacked.features.cols()));
  const KernelBank bank = build_bank(stacked, model.kernel);

  KernelWeights d = KernelWeights::uniform(bank.size());
  LabelVector y =
      init_labels_with_bank(bank, detail::target_label_vector(target), config);

  InnerLoopConfig inner_cfg{config.tol_d, config.max_inner};
  bool converged = false;

  for (int outer = 1; outer <= config.max_outer; ++outer) {
    auto [y_hard, counts] = harden_and_repair(y);
    y = y_hard;
    const AdaptationVectors vectors = scaling_vectors(y_hard, counts);
    auto [p_pos, p_neg] = kernel_projections(bank, vectors);

    MklProblem problem;
    problem.bank = &bank;
    problem.projections = {p_pos, p_neg};
    problem.risk_labels = y_hard;
    problem.risk_rows = stacked.n();
    problem.c = config.c;
    problem.theta = config.theta;
    problem.epsilon = config.epsilon;
    problem.solver = config.solver_options();

    OuterRecord record;
    record.iteration = outer;
    const InnerState state = run_inner_loop(problem, d, inner_cfg, &record.inner);
    record.h_value = state.h_value;
    record.weight_change = (state.weights.d - d.d).cwiseAbs().maxCoeff();
    d = state.weights;

    RefinementProblem ref;
    ref.kernel = combine(bank, d);
    ref.alpha = state.dual.alpha;
    ref.theta = config.theta;
    ref.lambda = config.lambda;
    ref.reference.nt = stacked.nt;
    ref.reference.values = Vector::Zero(stacked.n());
    ref.reference.values.head(stacked.nt) = y_hard.values.head(stacked.nt);
    ref.counts = counts;
    ref.scope = config.penalty_scope;

    int flips = 0;
    if (config.refine) {
      RefinerConfig ref_cfg;
      ref_cfg.clamp_target = config.clamp_target;
      const RefineResult refined = refine_labels(ref, y_hard, ref_cfg);
      record.objective_before_refine = refined.objective_before;
      record.objective_after_refine = refined.objective_after;
      flips = refined.flips;
      y = refined.labels;
    } else {
      const double value = objective_L(y_hard, ref);
      record.objective_before_refine = value;
      record.objective_after_refine = value;
    }
    record.label_flips = flips;
    model.log.push_back(std::move(record));

    if (model.log.back().weight_change < config.tol_d && flips == 0) {
      converged = true;
      break;
    }
  }

  const LabelVector y_final = harden_and_repair(y).first;
  const DualSolution dual = solve_dual(combine(bank, d), y_final, config.c, config.theta,
                                       config.solver_options());
  model.weights = d;
  model.labels = y_final;
  model.support = stacked.features;
  model.alpha = dual.alpha;
  model.bias = dual.bias;
  model.converged = converged;
  return model;
}

}  // namespace stsvm
