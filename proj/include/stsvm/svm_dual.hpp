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
#include <limits>
#include <string>
#include <vector>

#include "stsvm/common.hpp"
#include "stsvm/domain_adaptation.hpp"

namespace stsvm {

/// Solution of the box- and equality-constrained dual
///   max  theta * (sum(alpha) - 1/2 (alpha.u)' K (alpha.u))
///   s.t. 0 <= alpha <= C,  alpha'u = 0,   u = 2y - 1.
struct DualSolution {
  Vector alpha;
  double bias = 0.0;
  double objective = 0.0;   // value of the (theta-scaled) dual at alpha
  Vector signed_labels;     // u = 2y - 1
  bool no_support_vectors = false;
  double kkt_violation = 0.0;
  bool converged = false;

  /// Decision score for one point given its combined kernel values against
  /// the training rows. Label rule: score >= 0 predicts class 1.
  double decision_function(const Eigen::Ref<const Vector>& cross_values) const {
    require(cross_values.size() == alpha.size(), ErrorCode::LengthMismatch,
            "cross-kernel vector length mismatch");
    return (alpha.array() * signed_labels.array() * cross_values.array()).sum() + bias;
  }

  static int predict_label(double score) { return score >= 0.0 ? 1 : 0; }
};

struct SolverOptions {
  double kkt_tol = 1e-6;
  long max_pair_updates = 1000000;
  const Vector* warm_start = nullptr;       // previous alpha for the same labels
  std::vector<double>* objective_trace = nullptr;  // running dual value per update
};

namespace detail {

// Bias bounds at a dual point: lower constraints come from rows whose alpha
// can still move up the signed direction, upper constraints from the rest.
// Free support vectors constrain both sides.
struct BiasBounds {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_count = 0;
};

inline BiasBounds bias_bounds(const Vector& alpha, const Vector& u, const Vector& f,
                              double c) {
  const double edge = 1e-9 * std::max(1.0, c);
  BiasBounds b;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double r = u[i] - f[i];  // bias making this row's margin exactly 1
    const bool at_zero = alpha[i] <= edge;
    const bool at_c = alpha[i] >= c - edge;
    if (!at_zero && !at_c) {
      b.free_sum += r;
      b.free_count += 1;
      b.lower = std::max(b.lower, r);
      b.upper = std::min(b.upper, r);
    } else if ((at_zero && u[i] > 0.0) || (at_c && u[i] < 0.0)) {
      b.lower = std::max(b.lower, r);
    } else {
      b.upper = std::min(b.upper, r);
    }
  }
  return b;
}

}  // namespace detail

/// Bias rule: mean over free support vectors of the per-row exact-margin
/// bias; with no free support vectors, the midpoint of the feasible interval
/// from the bound rows. alpha == 0 yields bias 0 and sets the warning flag.
inline double compute_bias(const Vector& alpha, const Matrix& k, const Vector& signed_labels,
                           double c, bool* no_support_vectors = nullptr) {
  const double edge = 1e-9 * std::max(1.0, c);
  if (no_support_vectors) *no_support_vectors = false;
  if ((alpha.array() <= edge).all()) {
    if (no_support_vectors) *no_support_vectors = true;
    return 0.0;
  }
  const Vector f = k * (alpha.array() * signed_labels.array()).matrix();
  const auto b = detail::bias_bounds(alpha, signed_labels, f, c);
  if (b.free_count > 0) return b.free_sum / b.free_count;
  return 0.5 * (b.lower + b.upper);
}

/// Worst complementary-slackness violation, in margin units, of (alpha, bias).
inline double kkt_violation(const Vector& alpha, const Matrix& k, const Vector& signed_labels,
                            double c, double bias) {
  const double edge = 1e-9 * std::max(1.0, c);
  const Vector f = k * (alpha.array() * signed_labels.array()).matrix();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    const double margin = signed_labels[i] * (f[i] + bias);
    if (alpha[i] <= edge) {
      worst = std::max(worst, 1.0 - margin);
    } else if (alpha[i] >= c - edge) {
      worst = std::max(worst, margin - 1.0);
    } else {
      worst = std::max(worst, std::abs(margin - 1.0));
    }
  }
  return std::max(0.0, worst);
}

/// Pairwise coordinate ascent on the dual (maximal-violating-pair selection).
/// Pair updates preserve the equality constraint exactly, so no projection is
/// ever needed. K is symmetrized on entry; curvature below -1e-6 along any
/// selected pair direction is treated as a PSD violation and raised, never
/// clipped away.
inline DualSolution solve_dual(const Matrix& kernel, const LabelVector& labels, double c,
                               double theta = 1.0, const SolverOptions& options = {}) {
  const Eigen::Index n = labels.n();
  require(kernel.rows() == n && kernel.cols() == n, ErrorCode::DimMismatch,
          "kernel size does not match label count");
  require(kernel.allFinite(), ErrorCode::NonFiniteFeature, "kernel has non-finite entries");
  require(c >= 0.0, ErrorCode::InvalidArgument, "C must be nonnegative");
  require(theta > 0.0, ErrorCode::InvalidArgument, "theta must be positive");

  const Matrix k = 0.5 * (kernel + kernel.transpose());
  LabelVector hard = labels.hardened();
  Vector u(n);
  int positives = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = 2.0 * hard.values[i] - 1.0;
    if (u[i] > 0.0) ++positives;
  }
  require(positives > 0 && positives < n, ErrorCode::SingleClass,
          "dual solve requires both classes");
  require((k.diagonal().array() >= -1e-6).all(), ErrorCode::PsdViolation,
          "kernel diagonal is negative beyond tolerance");

  DualSolution sol;
  sol.signed_labels = u;

  if (c == 0.0) {  // degenerate box: alpha is identically zero
    sol.alpha = Vector::Zero(n);
    sol.no_support_vectors = true;
    sol.converged = true;
    return sol;
  }

  Vector alpha = Vector::Zero(n);
  Vector f = Vector::Zero(n);  // K (alpha.u), decision values without bias
  if (options.warm_start && options.warm_start->size() == n) {
    Vector w = options.warm_start->cwiseMax(0.0).cwiseMin(c);
    if (std::abs(w.dot(u)) <= 1e-9 * std::max(1.0, c * static_cast<double>(n))) {
      alpha = std::move(w);
      f = k * (alpha.array() * u.array()).matrix();
    }
  }

  double running_objective = alpha.sum() - 0.5 * (alpha.array() * u.array()).matrix().dot(f);
  const double stop_tol = options.kkt_tol;
  long updates = 0;
  bool resumed = false;

  while (true) {
    // Maximal violating pair: i can absorb a positive step along u_i,
    // j along -u_j. Ties resolve to the lowest index.
    Eigen::Index best_i = -1, best_j = -1;
    double max_up = -std::numeric_limits<double>::infinity();
    double min_down = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double r = u[t] - f[t];
      const bool can_up = (u[t] > 0.0 && alpha[t] < c) || (u[t] < 0.0 && alpha[t] > 0.0);
      const bool can_down = (u[t] > 0.0 && alpha[t] > 0.0) || (u[t] < 0.0 && alpha[t] < c);
      if (can_up && r > max_up) {
        max_up = r;
        best_i = t;
      }
      if (can_down && r < min_down) {
        min_down = r;
        best_j = t;
      }
    }
    const double violation = max_up - min_down;
    if (best_i < 0 || best_j < 0 || violation <= stop_tol) {
      if (!resumed) {
        // One exact refresh of the cached decision values guards the
        // reported KKT numbers against incremental drift.
        resumed = true;
        f = k * (alpha.array() * u.array()).matrix();
        continue;
      }
      break;
    }

    if (updates >= options.max_pair_updates) {
      fail(ErrorCode::SolverFailure,
           "dual solver hit the pair-update cap with KKT violation " +
               std::to_string(violation));
    }
    ++updates;

    const Eigen::Index i = best_i, j = best_j;
    const double curvature = k(i, i) + k(j, j) - 2.0 * k(i, j);
    require(curvature >= -1e-6, ErrorCode::PsdViolation,
            "negative curvature along a working pair: kernel is not PSD");

    const double room_i = u[i] > 0.0 ? c - alpha[i] : alpha[i];
    const double room_j = u[j] > 0.0 ? alpha[j] : c - alpha[j];
    double step = std::min(room_i, room_j);
    if (curvature > 1e-12) step = std::min(step, violation / curvature);

    alpha[i] += u[i] * step;
    alpha[j] -= u[j] * step;
    // Snap to the box to stop drift from accumulating across updates.
    const double snap = 1e-12 * std::max(1.0, c);
    for (Eigen::Index t : {i, j}) {
      if (alpha[t] < snap) alpha[t] = 0.0;
      if (alpha[t] > c - snap) alpha[t] = c;
    }
    f += step * (k.col(i) - k.col(j));

    if (options.objective_trace) {
      running_objective += step * violation - 0.5 * step * step * curvature;
      options.objective_trace->push_back(running_objective);
    }
  }

  sol.alpha = alpha;
  sol.bias = compute_bias(alpha, k, u, c, &sol.no_support_vectors);
  sol.kkt_violation = kkt_violation(alpha, k, u, c, sol.bias);
  sol.converged = sol.kkt_violation <= options.kkt_tol;
  const Vector beta = (alpha.array() * u.array()).matrix();
  sol.objective = theta * (alpha.sum() - 0.5 * beta.dot(k * beta));
  return sol;
}

}  // namespace stsvm
