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

// Test-only reference implementations. Each one recomputes a quantity the
// library produces, along an independent route: direct mean-difference
// expansion, active-set QP enumeration, finite differences, and exhaustive
// labeling search. They are deliberately slow and simple.

#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stsvm/domain_adaptation.hpp"
#include "stsvm/kernel_bank.hpp"
#include "stsvm/kernel_weight_optimizer.hpp"
#include "stsvm/label_refiner.hpp"
#include "stsvm/svm_dual.hpp"

namespace stsvm::oracle {

/// Class-conditional mean discrepancy expanded directly into kernel sums,
/// without forming any scaling vector: for each class, the squared distance
/// between the target-class mean and the source-class mean in feature space.
inline double conditional_discrepancy_direct(const Matrix& k, const LabelVector& y,
                                             const ClassCounts& counts) {
  const Eigen::Index nt = y.nt;
  const Eigen::Index n = y.n();
  auto weight = [&](Eigen::Index i, bool positive) {
    const double yi = y.values[i];
    return positive ? yi : 1.0 - yi;
  };
  double total = 0.0;
  for (bool positive : {true, false}) {
    const double wt = positive ? counts.nt_pos : counts.nt_neg;
    const double ws = positive ? counts.ns_pos : counts.ns_neg;
    double tt = 0.0, ts = 0.0, ss = 0.0;
    for (Eigen::Index i = 0; i < nt; ++i)
      for (Eigen::Index j = 0; j < nt; ++j)
        tt += weight(i, positive) * weight(j, positive) * k(i, j);
    for (Eigen::Index i = 0; i < nt; ++i)
      for (Eigen::Index j = nt; j < n; ++j)
        ts += weight(i, positive) * weight(j, positive) * k(i, j);
    for (Eigen::Index i = nt; i < n; ++i)
      for (Eigen::Index j = nt; j < n; ++j)
        ss += weight(i, positive) * weight(j, positive) * k(i, j);
    total += tt / (wt * wt) - 2.0 * ts / (wt * ws) + ss / (ws * ws);
  }
  return total;
}

/// Globally optimal value of the dual by enumerating every {zero, cap, free}
/// activity pattern and solving the stationarity system of each. Concavity
/// makes any feasible stationary point a global maximizer, so the best
/// feasible candidate is the optimum. Exponential in n; keep n <= 8.
inline double brute_force_dual_objective(const Matrix& k, const Vector& u, double c,
                                         double feas_tol = 1e-6) {
  const int n = static_cast<int>(u.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pattern(static_cast<std::size_t>(n));  // 0 zero, 1 cap, 2 free

  long total_patterns = 1;
  for (int i = 0; i < n; ++i) total_patterns *= 3;

  for (long code = 0; code < total_patterns; ++code) {
    long rest = code;
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i) {
      pattern[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3);
      rest /= 3;
      if (pattern[static_cast<std::size_t>(i)] == 2) free_idx.push_back(i);
    }
    const int nf = static_cast<int>(free_idx.size());

    Vector alpha = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
      if (pattern[static_cast<std::size_t>(i)] == 1) alpha[i] = c;

    double cap_balance = 0.0;  // sum of u over capped entries, times C
    for (int i = 0; i < n; ++i)
      if (pattern[static_cast<std::size_t>(i)] == 1) cap_balance += c * u[i];

    double bias = 0.0;
    if (nf > 0) {
      // Unknowns: q_j = u_j alpha_j on the free set, plus the bias.
      Matrix sys = Matrix::Zero(nf + 1, nf + 1);
      Vector rhs(nf + 1);
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[static_cast<std::size_t>(a)];
        for (int b = 0; b < nf; ++b) sys(a, b) = k(i, free_idx[static_cast<std::size_t>(b)]);
        sys(a, nf) = 1.0;
        double capped = 0.0;
        for (int j = 0; j < n; ++j)
          if (pattern[static_cast<std::size_t>(j)] == 1) capped += k(i, j) * u[j] * c;
        rhs[a] = u[i] - capped;
      }
      for (int b = 0; b < nf; ++b) sys(nf, b) = 1.0;
      sys(nf, nf) = 0.0;
      rhs[nf] = -cap_balance;

      const Vector sol = sys.fullPivLu().solve(rhs);
      if (((sys * sol) - rhs).cwiseAbs().maxCoeff() > 1e-7) continue;
      bool in_box = true;
      for (int a = 0; a < nf; ++a) {
        const int i = free_idx[static_cast<std::size_t>(a)];
        alpha[i] = u[i] * sol[a];
        if (alpha[i] < -feas_tol || alpha[i] > c + feas_tol) in_box = false;
        alpha[i] = std::min(std::max(alpha[i], 0.0), c);
      }
      if (!in_box) continue;
      bias = sol[nf];
    } else {
      if (std::abs(cap_balance) > feas_tol * std::max(1.0, c)) continue;
      // Bias only has to satisfy the inequality conditions below; pick the
      // interval midpoint when it exists.
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      const Vector f = k * (alpha.array() * u.array()).matrix();
      for (int i = 0; i < n; ++i) {
        const double r = u[i] - f[i];
        const bool lower = (pattern[static_cast<std::size_t>(i)] == 0 && u[i] > 0) ||
                           (pattern[static_cast<std::size_t>(i)] == 1 && u[i] < 0);
        if (lower)
          lo = std::max(lo, r);
        else
          hi = std::min(hi, r);
      }
      if (lo > hi + feas_tol) continue;
      bias = 0.5 * (lo + hi);
      if (!std::isfinite(bias)) bias = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
    }

    // Inequality conditions on the bound entries.
    const Vector f = k * (alpha.array() * u.array()).matrix();
    bool feasible = true;
    for (int i = 0; i < n && feasible; ++i) {
      const double margin = u[i] * (f[i] + bias);
      if (pattern[static_cast<std::size_t>(i)] == 0 && margin < 1.0 - feas_tol) feasible = false;
      if (pattern[static_cast<std::size_t>(i)] == 1 && margin > 1.0 + feas_tol) feasible = false;
    }
    if (!feasible) continue;

    const Vector beta = (alpha.array() * u.array()).matrix();
    const double value = alpha.sum() - 0.5 * beta.dot(k * beta);
    if (value > best) best = value;
  }
  return best;
}

/// Exhaustive minimum of the refinement objective over every hardened source
/// labeling. Exponential in ns; keep ns <= 10.
inline double enumerate_label_objective_min(const RefinementProblem& prob,
                                            const LabelVector& y_template) {
  const Eigen::Index nt = y_template.nt;
  const Eigen::Index ns = y_template.ns();
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << ns); ++mask) {
    LabelVector y = y_template;
    for (Eigen::Index i = 0; i < ns; ++i)
      y.values[nt + i] = (mask >> i) & 1 ? 1.0 : 0.0;
    best = std::min(best, objective_L(y, prob));
  }
  return best;
}

/// Central finite differences of the weight objective, re-solving the dual
/// at every probe point.
inline Vector finite_difference_gradient(const MklProblem& problem, const Vector& d,
                                         double step = 1e-5) {
  Vector grad(d.size());
  for (Eigen::Index m = 0; m < d.size(); ++m) {
    Vector plus = d, minus = d;
    plus[m] += step;
    minus[m] -= step;
    const double h_plus = problem.objective_value(plus, problem.solve_at(plus));
    const double h_minus = problem.objective_value(minus, problem.solve_at(minus));
    grad[m] = (h_plus - h_minus) / (2.0 * step);
  }
  return grad;
}

/// Random PSD matrix with unit diagonal (a normalized Gram matrix).
inline Matrix random_psd(int n, std::mt19937_64& rng, double ridge = 0.05) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Matrix k = a * a.transpose();
  k.diagonal().array() += ridge;
  Vector inv_sqrt = k.diagonal().array().rsqrt();
  return inv_sqrt.asDiagonal() * k * inv_sqrt.asDiagonal();
}

/// Hardened labels with every class/domain cell occupied.
inline LabelVector random_label_vector(Eigen::Index nt, Eigen::Index ns,
                                       std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  LabelVector y;
  y.nt = nt;
  y.values.resize(nt + ns);
  while (true) {
    for (Eigen::Index i = 0; i < nt + ns; ++i) y.values[i] = coin(rng) ? 1.0 : 0.0;
    const double tp = y.values.head(nt).sum();
    const double sp = y.values.tail(ns).sum();
    if (tp > 0 && tp < static_cast<double>(nt) && sp > 0 && sp < static_cast<double>(ns)) break;
  }
  return y;
}

}  // namespace stsvm::oracle
