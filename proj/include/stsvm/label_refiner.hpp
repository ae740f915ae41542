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

#include <cmath>
#include <utility>

#include "stsvm/common.hpp"
#include "stsvm/domain_adaptation.hpp"
#include "stsvm/svm_dual.hpp"

namespace stsvm {

/// Whether the label-anchoring penalty covers only the target block or the
/// full vector (which additionally pulls source labels toward 0).
enum class PenaltyScope { TargetOnly, Full };

/// Everything held fixed during one label-refinement solve: the combined
/// kernel at the current weights, the dual variables, and the class counts
/// (frozen so the objective stays quadratic in the labels).
struct RefinementProblem {
  Matrix kernel;         // combined Gram over the stacked set
  Vector alpha;          // dual variables, fixed
  double theta = 1.0;
  double lambda = 1.0;
  double c = 10.0;       // box constraint, for re-maximized acceptance checks
  LabelVector reference; // target truth stacked over zeros
  ClassCounts counts;
  PenaltyScope scope = PenaltyScope::TargetOnly;
  SolverOptions solver;

  void validate() const {
    require(kernel.rows() == kernel.cols() && kernel.rows() == reference.n(),
            ErrorCode::DimMismatch, "kernel/reference dimension mismatch");
    require(alpha.size() == reference.n(), ErrorCode::LengthMismatch,
            "alpha length mismatch");
    for (Eigen::Index i = reference.nt; i < reference.n(); ++i)
      require(reference.values[i] == 0.0, ErrorCode::InvalidArgument,
              "reference source block must be zero");
    require(counts.nt_pos >= 1 && counts.nt_neg >= 1 && counts.ns_pos >= 1 &&
                counts.ns_neg >= 1,
            ErrorCode::InvalidArgument, "refinement needs all class counts >= 1");
  }
};

/// Adaptation term + theta-weighted dual value + anchoring penalty, all as a
/// function of the (possibly soft) label vector with frozen counts.
inline double objective_L(const LabelVector& y, const RefinementProblem& prob) {
  require(y.n() == prob.reference.n() && y.nt == prob.reference.nt,
          ErrorCode::DimMismatch, "label vector shape mismatch");
  const AdaptationVectors v = scaling_vectors(y, prob.counts);
  const double adaptation = adaptation_term(prob.kernel, v);

  const Vector u = 2.0 * y.values.array() - 1.0;
  const Vector beta = (prob.alpha.array() * u.array()).matrix();
  const double risk = prob.theta * (prob.alpha.sum() - 0.5 * beta.dot(prob.kernel * beta));

  double penalty = 0.0;
  const Eigen::Index penalty_end = prob.scope == PenaltyScope::Full ? y.n() : y.nt;
  for (Eigen::Index i = 0; i < penalty_end; ++i) {
    const double diff = y.values[i] - prob.reference.values[i];
    penalty += diff * diff;
  }
  return adaptation + risk + prob.lambda * penalty;
}

namespace detail {

inline Vector objective_gradient(const LabelVector& y, const RefinementProblem& prob) {
  const AdaptationVectors v = scaling_vectors(y, prob.counts);
  const Vector k_pos = prob.kernel * v.s_pos;
  const Vector k_neg = prob.kernel * v.s_neg;
  const Vector u = 2.0 * y.values.array() - 1.0;
  const Vector k_beta = prob.kernel * (prob.alpha.array() * u.array()).matrix();

  Vector grad(y.n());
  for (Eigen::Index i = 0; i < y.n(); ++i) {
    const bool is_target = i < y.nt;
    const double ds_pos = is_target ? 1.0 / prob.counts.nt_pos : -1.0 / prob.counts.ns_pos;
    const double ds_neg = is_target ? -1.0 / prob.counts.nt_neg : 1.0 / prob.counts.ns_neg;
    double g = 2.0 * k_pos[i] * ds_pos + 2.0 * k_neg[i] * ds_neg;
    g += -2.0 * prob.theta * prob.alpha[i] * k_beta[i];
    if (is_target || prob.scope == PenaltyScope::Full)
      g += 2.0 * prob.lambda * (y.values[i] - prob.reference.values[i]);
    grad[i] = g;
  }
  return grad;
}

}  // namespace detail

struct RefinerConfig {
  bool clamp_target = true;
  double grad_tol = 1e-6;  // sup-norm of the unit-step gradient mapping
  int max_iter = 500;
  bool exact_acceptance = true;  // gate candidates on the re-maximized dual
};

struct RefineResult {
  LabelVector labels;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int flips = 0;
};

namespace detail {

// Objective with the dual re-maximized for the candidate labels and the
// counts recomputed. The fixed-alpha surrogate descended below is only a
// lower bound on this value (the risk term is concave in the labels), so
// spectacular surrogate decreases can be spurious; candidates are accepted
// against this exact value instead.
inline double remaximized_objective(const LabelVector& y_hard, const RefinementProblem& prob) {
  const ClassCounts counts = class_counts(y_hard);
  const AdaptationVectors v = scaling_vectors(y_hard, counts);
  const DualSolution dual =
      solve_dual(prob.kernel, y_hard, prob.c, prob.theta, prob.solver);
  double penalty = 0.0;
  const Eigen::Index penalty_end =
      prob.scope == PenaltyScope::Full ? y_hard.n() : y_hard.nt;
  for (Eigen::Index i = 0; i < penalty_end; ++i) {
    const double diff = y_hard.values[i] - prob.reference.values[i];
    penalty += diff * diff;
  }
  return adaptation_term(prob.kernel, v) + dual.objective + prob.lambda * penalty;
}

}  // namespace detail

/// Projected gradient descent on the label objective over [0,1] for the free
/// coordinates, hardening candidate iterates at 0.5. A candidate replaces
/// y_init only when it does not worsen the fixed-alpha objective and (by
/// default) also lowers the re-maximized objective, so the returned labeling
/// never has a higher objective than y_init.
inline RefineResult refine_labels(const RefinementProblem& prob, const LabelVector& y_init,
                                  const RefinerConfig& config = {}) {
  prob.validate();
  y_init.validate();
  require(y_init.n() == prob.reference.n() && y_init.nt == prob.reference.nt,
          ErrorCode::DimMismatch, "initial labels shape mismatch");

  const double objective_init = objective_L(y_init, prob);
  LabelVector y = y_init;
  double objective_current = objective_init;

  auto clamp_free = [&](Vector values, const Vector& grad, double step) {
    const Eigen::Index first_free = config.clamp_target ? y.nt : 0;
    for (Eigen::Index i = first_free; i < values.size(); ++i)
      values[i] = std::clamp(values[i] - step * grad[i], 0.0, 1.0);
    return values;
  };

  auto hardened_copy = [&](const LabelVector& soft) {
    LabelVector hard = soft;
    for (Eigen::Index i = 0; i < soft.n(); ++i)
      hard.values[i] = soft.values[i] >= 0.5 ? 1.0 : 0.0;
    if (config.clamp_target) hard.values.head(soft.nt) = y_init.values.head(soft.nt);
    return hard;
  };

  // Hardened snapshots taken along the descent path (geometrically spaced,
  // plus the stationary point). The cascade driven by the concave risk term
  // tends to ruin late iterates, so early snapshots often carry the signal.
  std::vector<LabelVector> snapshots;
  int accepted_steps = 0;
  int next_snapshot = 1;

  for (int iter = 0; iter < config.max_iter; ++iter) {
    const Vector grad = detail::objective_gradient(y, prob);
    LabelVector probe = y;
    probe.values = clamp_free(y.values, grad, 1.0);
    if ((probe.values - y.values).cwiseAbs().maxCoeff() < config.grad_tol) break;

    bool moved = false;
    for (double step = 1.0; step >= 1e-12; step *= 0.5) {
      LabelVector candidate = y;
      candidate.values = clamp_free(y.values, grad, step);
      const double value = objective_L(candidate, prob);
      if (value < objective_current) {
        y = std::move(candidate);
        objective_current = value;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    ++accepted_steps;
    if (accepted_steps == next_snapshot) {
      snapshots.push_back(hardened_copy(y));
      next_snapshot *= 2;
    }
  }
  snapshots.push_back(hardened_copy(y));

  RefineResult result;
  result.labels = y_init;
  result.objective_before = objective_init;
  result.objective_after = objective_init;

  const double exact_init =
      config.exact_acceptance ? detail::remaximized_objective(y_init, prob) : 0.0;
  double exact_best = exact_init;

  for (const auto& snapshot : snapshots) {
    if (snapshot.source_flips(result.labels) == 0) continue;
    LabelVector candidate = snapshot;
    if (candidate.ns() >= 1) candidate = harden_and_repair(candidate).first;
    const double surrogate = objective_L(candidate, prob);
    if (surrogate > objective_init + 1e-9) continue;
    if (config.exact_acceptance) {
      const double exact = detail::remaximized_objective(candidate, prob);
      if (exact >= exact_best) continue;
      exact_best = exact;
    }
    result.labels = candidate;
    result.objective_after = surrogate;
  }
  result.flips = result.labels.source_flips(y_init);
  return result;
}

}  // namespace stsvm
