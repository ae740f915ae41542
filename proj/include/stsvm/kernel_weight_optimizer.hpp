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

#include <algorithm>
#include <numeric>
#include <utility>
#include <vector>

#include "stsvm/common.hpp"
#include "stsvm/domain_adaptation.hpp"
#include "stsvm/kernel_bank.hpp"
#include "stsvm/svm_dual.hpp"

namespace stsvm {

/// Euclidean projection onto {x >= 0, sum(x) = 1} (sort-and-threshold).
inline Vector project_to_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  require(m >= 1, ErrorCode::InvalidArgument, "cannot project an empty vector");
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0;
  double threshold = sorted[0] - 1.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    cumulative += sorted[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) threshold = candidate;
  }
  return (v.array() - threshold).max(0.0);
}

/// One simplex-projected reduced-gradient trial point.
inline Vector simplex_step(const Vector& d, const Vector& direction, double eta) {
  return project_to_simplex(d - eta * direction);
}

/// The minimization problem over kernel weights for fixed labels: a sum of
/// rank-one adaptation terms plus the (theta-weighted) dual risk value. The
/// dual is solved over the leading `risk_rows` of the stacked set, which is
/// the whole set for the full method and the target block for the marginal
/// ablation.
struct MklProblem {
  const KernelBank* bank = nullptr;
  std::vector<Vector> projections;  // one entry per scaling vector
  LabelVector risk_labels;          // hardened labels over the risk rows
  Eigen::Index risk_rows = 0;
  double c = 10.0;
  double theta = 1.0;
  double epsilon = 1e-4;
  SolverOptions solver;

  Matrix combined_risk_block(const Vector& d) const {
    Matrix k = Matrix::Zero(risk_rows, risk_rows);
    for (int m = 0; m < bank->size(); ++m)
      k += d[m] * bank->kernels[static_cast<std::size_t>(m)].topLeftCorner(risk_rows, risk_rows);
    return k;
  }

  DualSolution solve_at(const Vector& d, const Vector* warm = nullptr) const {
    SolverOptions opts = solver;
    opts.warm_start = warm;
    return solve_dual(combined_risk_block(d), risk_labels, c, theta, opts);
  }

  /// Quadratic part: sum_v 1/2 (d'p_v)^2 plus one 1/2 eps ||d||^2 per vector.
  double quadratic_value(const Vector& d) const {
    double value = 0.0;
    for (const Vector& p : projections) {
      const double dp = d.dot(p);
      value += 0.5 * dp * dp + 0.5 * epsilon * d.squaredNorm();
    }
    return value;
  }

  double objective_value(const Vector& d, const DualSolution& dual) const {
    return quadratic_value(d) + dual.objective;
  }
};

/// Analytic gradient and Hessian of the weight objective at a dual maximizer.
/// The risk part enters the gradient only (envelope of the inner max); its
/// component m is -(theta/2) beta' k_m beta with beta = alpha.u.
inline std::pair<Vector, Matrix> grad_and_hessian(const Vector& d,
                                                  const std::vector<Vector>& projections,
                                                  const Vector& beta, const KernelBank& bank,
                                                  Eigen::Index risk_rows, double theta,
                                                  double epsilon) {
  const Eigen::Index m = d.size();
  Vector grad = Vector::Zero(m);
  Matrix hess = Matrix::Zero(m, m);
  for (const Vector& p : projections) {
    require(p.size() == m, ErrorCode::LengthMismatch, "projection length mismatch");
    grad += p * p.dot(d) + epsilon * d;
    hess += p * p.transpose();
    hess.diagonal().array() += epsilon;
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& k = bank.kernels[static_cast<std::size_t>(j)];
    grad[j] += -0.5 * theta * beta.dot(k.topLeftCorner(risk_rows, risk_rows) * beta);
  }
  return {std::move(grad), std::move(hess)};
}

struct InnerIterate {
  Vector d;
  double h = 0.0;
};

struct InnerState {
  KernelWeights weights;
  DualSolution dual;
  double h_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct InnerLoopConfig {
  double tol_d = 1e-4;
  int max_inner = 100;
  double min_step = 1e-10;  // line-search floor on eta
};

/// Alternates the dual solve with damped-Newton reduced-gradient updates of
/// the weights until they stabilize. Every trial point is projected back to
/// the simplex and accepted only if the objective strictly decreases, so the
/// recorded h sequence is nonincreasing by construction.
inline InnerState run_inner_loop(const MklProblem& problem, const KernelWeights& d0,
                                 const InnerLoopConfig& config = {},
                                 std::vector<InnerIterate>* trace = nullptr) {
  d0.validate();
  require(problem.bank != nullptr, ErrorCode::InvalidArgument, "inner loop needs a kernel bank");
  require(d0.size() == problem.bank->size(), ErrorCode::LengthMismatch,
          "weight/bank size mismatch");

  InnerState state;
  state.weights = d0;
  state.dual = problem.solve_at(d0.d);
  state.h_value = problem.objective_value(d0.d, state.dual);
  if (trace) trace->push_back({d0.d, state.h_value});

  for (int iter = 0; iter < config.max_inner; ++iter) {
    const Vector beta =
        (state.dual.alpha.array() * state.dual.signed_labels.array()).matrix();
    auto [grad, hess] = grad_and_hessian(state.weights.d, problem.projections, beta,
                                         *problem.bank, problem.risk_rows, problem.theta,
                                         problem.epsilon);
    const Vector direction = hess.ldlt().solve(grad);

    bool accepted = false;
    Vector d_next;
    DualSolution dual_next;
    double h_next = 0.0;
    for (double eta = 1.0; eta >= config.min_step; eta *= 0.5) {
      Vector candidate = simplex_step(state.weights.d, direction, eta);
      if ((candidate - state.weights.d).cwiseAbs().maxCoeff() == 0.0) break;
      DualSolution dual_candidate = problem.solve_at(candidate, &state.dual.alpha);
      const double h_candidate = problem.objective_value(candidate, dual_candidate);
      if (h_candidate < state.h_value) {
        d_next = std::move(candidate);
        dual_next = std::move(dual_candidate);
        h_next = h_candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) {  // stationary for the line search: weights have settled
      state.converged = true;
      break;
    }

    const double change = (d_next - state.weights.d).cwiseAbs().maxCoeff();
    state.weights.d = std::move(d_next);
    state.dual = std::move(dual_next);
    state.h_value = h_next;
    state.iterations = iter + 1;
    if (trace) trace->push_back({state.weights.d, state.h_value});
    if (change < config.tol_d) {
      state.converged = true;
      break;
    }
  }
  return state;
}

}  // namespace stsvm
