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

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "stsvm/kernel_weight_optimizer.hpp"

using namespace stsvm;

namespace {

Stacked gaussian_stacked(int nt, int ns, std::uint64_t seed, double spread = 1.5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, spread);
  Stacked s;
  s.nt = nt;
  s.ns = ns;
  s.features.resize(nt + ns, 2);
  for (Eigen::Index i = 0; i < s.features.size(); ++i) s.features.data()[i] = gauss(rng);
  return s;
}

MklProblem conditional_problem(const KernelBank& bank, const LabelVector& y) {
  AdaptationVectors v = scaling_vectors(y, class_counts(y));
  auto [p_pos, p_neg] = kernel_projections(bank, v);
  MklProblem problem;
  problem.bank = &bank;
  problem.projections = {p_pos, p_neg};
  problem.risk_labels = y;
  problem.risk_rows = bank.n();
  return problem;
}

}  // namespace

TEST_CASE("simplex projection basics", "[kernel_weight_optimizer]") {
  REQUIRE(project_to_simplex(Vector{{0.1, 0.9}}).isApprox(Vector{{0.1, 0.9}}));
  REQUIRE(project_to_simplex(Vector{{0.6, 0.6}}).isApprox(Vector{{0.5, 0.5}}));
  REQUIRE(project_to_simplex(Vector{{1.5, -0.5}}).isApprox(Vector{{1.0, 0.0}}));

  std::mt19937_64 rng(13);
  std::normal_distribution<double> gauss(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector v(8);
    for (int i = 0; i < 8; ++i) v[i] = gauss(rng);
    Vector p = project_to_simplex(v);
    REQUIRE((p.array() >= 0.0).all());
    REQUIRE(std::abs(p.sum() - 1.0) <= 1e-12);
    // Uniform shifts of the input do not move the projection.
    Vector q = project_to_simplex((v.array() + 3.7).matrix());
    REQUIRE((p - q).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("projected step on a hand-checked case", "[kernel_weight_optimizer]") {
  Vector d{{0.5, 0.5}};
  Vector g{{0.4, -0.4}};
  Vector next = simplex_step(d, g, 1.0);
  REQUIRE(next.isApprox(Vector{{0.1, 0.9}}, 1e-12));

  // A constant direction is normal to the simplex and must not move d.
  Vector flat = simplex_step(d, Vector{{0.3, 0.3}}, 1.0);
  REQUIRE((flat - d).cwiseAbs().maxCoeff() <= 1e-12);

  // Zero direction is a fixed point.
  REQUIRE((simplex_step(d, Vector::Zero(2), 1.0) - d).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gradient and hessian reduce to the ridge term at zero data",
          "[kernel_weight_optimizer]") {
  Stacked s = gaussian_stacked(3, 3, 2);
  KernelBank bank = build_bank(s, KernelConfig::with_kernel_count(4, 2));
  const double epsilon = 1e-4;
  Vector d = Vector::Constant(4, 0.25);
  std::vector<Vector> zero_projections{Vector::Zero(4), Vector::Zero(4)};
  Vector beta = Vector::Zero(6);
  auto [grad, hess] = grad_and_hessian(d, zero_projections, beta, bank, 6, 1.0, epsilon);
  REQUIRE((grad - 2.0 * epsilon * d).cwiseAbs().maxCoeff() <= 1e-18);
  REQUIRE((hess - 2.0 * epsilon * Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-18);
}

TEST_CASE("risk part of the gradient is never positive", "[kernel_weight_optimizer]") {
  std::mt19937_64 rng(3);
  Stacked s = gaussian_stacked(6, 6, 4);
  KernelBank bank = build_bank(s, KernelConfig::with_kernel_count(4, 2));
  LabelVector y = oracle::random_label_vector(6, 6, rng);
  MklProblem problem = conditional_problem(bank, y);
  problem.epsilon = 1e-4;
  DualSolution dual = problem.solve_at(Vector::Constant(4, 0.25));
  Vector beta = (dual.alpha.array() * dual.signed_labels.array()).matrix();

  auto [grad_full, hess] =
      grad_and_hessian(Vector::Constant(4, 0.25), problem.projections, beta, bank, 12, 1.0, 1e-4);
  auto [grad_no_risk, hess2] = grad_and_hessian(Vector::Constant(4, 0.25), problem.projections,
                                                Vector::Zero(12), bank, 12, 1.0, 1e-4);
  Vector risk_part = grad_full - grad_no_risk;
  REQUIRE((risk_part.array() <= 1e-12).all());
  REQUIRE((hess - hess2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradient matches finite differences", "[kernel_weight_optimizer]") {
  std::mt19937_64 rng(2025);
  std::uniform_real_distribution<double> uni(0.1, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Stacked s = gaussian_stacked(5, 5, 100 + static_cast<std::uint64_t>(trial));
    KernelBank bank = build_bank(s, KernelConfig::with_kernel_count(4, 2));
    LabelVector y = oracle::random_label_vector(5, 5, rng);
    MklProblem problem = conditional_problem(bank, y);
    problem.theta = 1.0;
    problem.epsilon = 1e-4;
    problem.solver.kkt_tol = 1e-10;

    Vector raw(4);
    for (int m = 0; m < 4; ++m) raw[m] = uni(rng);
    Vector d = raw / raw.sum();

    DualSolution dual = problem.solve_at(d);
    Vector beta = (dual.alpha.array() * dual.signed_labels.array()).matrix();
    auto [grad, hess] = grad_and_hessian(d, problem.projections, beta, *problem.bank,
                                         problem.risk_rows, problem.theta, problem.epsilon);
    Vector fd = oracle::finite_difference_gradient(problem, d);
    const double scale = std::max(1e-8, grad.cwiseAbs().maxCoeff());
    REQUIRE((grad - fd).cwiseAbs().maxCoeff() / scale <= 1e-4);
  }
}

TEST_CASE("one-kernel problems converge in a single dual solve",
          "[kernel_weight_optimizer]") {
  Stacked s = gaussian_stacked(4, 4, 9);
  KernelConfig config;
  config.feature_dim = 2;
  config.families = {{KernelKind::Gaussian, {2.0}}};
  KernelBank bank = build_bank(s, config);
  std::mt19937_64 rng(11);
  LabelVector y = oracle::random_label_vector(4, 4, rng);
  MklProblem problem = conditional_problem(bank, y);

  InnerState state = run_inner_loop(problem, KernelWeights::uniform(1));
  REQUIRE(state.converged);
  REQUIRE(state.iterations == 0);
  REQUIRE(state.weights.d[0] == 1.0);
  REQUIRE(state.dual.alpha.size() == 8);
}

TEST_CASE("identical domains reduce the objective to ridge plus risk",
          "[kernel_weight_optimizer]") {
  // Source duplicates the target exactly, so the adaptation projections
  // vanish and the inner loop minimizes the ridge-plus-risk profile alone;
  // a fine grid over the two-kernel simplex provides the reference minimum.
  std::mt19937_64 rng(15);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix pts(8, 2);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = gauss(rng);
  Stacked s;
  s.nt = 8;
  s.ns = 8;
  s.features.resize(16, 2);
  s.features.topRows(8) = pts;
  s.features.bottomRows(8) = pts;

  KernelConfig config;
  config.feature_dim = 2;
  config.families = {{KernelKind::Gaussian, {2.0, 3.5}}};
  KernelBank bank = build_bank(s, config);

  LabelVector y;
  y.nt = 8;
  y.values.resize(16);
  for (int i = 0; i < 8; ++i) {
    y.values[i] = i % 2;
    y.values[8 + i] = i % 2;
  }
  MklProblem problem = conditional_problem(bank, y);
  REQUIRE(problem.projections[0].cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(problem.projections[1].cwiseAbs().maxCoeff() <= 1e-12);

  InnerState state = run_inner_loop(problem, KernelWeights::uniform(2));

  double grid_best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 1000; ++i) {
    Vector d(2);
    d << i / 1000.0, 1.0 - i / 1000.0;
    const double value = problem.objective_value(d, problem.solve_at(d));
    grid_best = std::min(grid_best, value);
  }
  REQUIRE(state.h_value <= grid_best + 1e-6);
}

TEST_CASE("inner loop keeps iterates on the simplex with nonincreasing objective",
          "[kernel_weight_optimizer]") {
  std::mt19937_64 rng(19);
  Stacked s = gaussian_stacked(8, 20, 77);
  s.features.bottomRows(20).array() += 0.8;  // shift the source block
  KernelBank bank = build_bank(s, KernelConfig::defaults(2));
  LabelVector y = oracle::random_label_vector(8, 20, rng);
  MklProblem problem = conditional_problem(bank, y);

  std::vector<InnerIterate> trace;
  InnerState state = run_inner_loop(problem, KernelWeights::uniform(16), {}, &trace);
  REQUIRE(trace.size() >= 1);
  for (const auto& it : trace) {
    REQUIRE((it.d.array() >= 0.0).all());
    REQUIRE(std::abs(it.d.sum() - 1.0) <= 1e-9);
  }
  for (std::size_t i = 1; i < trace.size(); ++i)
    REQUIRE(trace[i].h <= trace[i - 1].h + 1e-9);
  REQUIRE(state.h_value == trace.back().h);
}

TEST_CASE("a stationary start terminates without movement", "[kernel_weight_optimizer]") {
  // Re-running from a converged point must converge immediately.
  std::mt19937_64 rng(23);
  Stacked s = gaussian_stacked(6, 10, 99);
  KernelBank bank = build_bank(s, KernelConfig::with_kernel_count(4, 2));
  LabelVector y = oracle::random_label_vector(6, 10, rng);
  MklProblem problem = conditional_problem(bank, y);

  InnerState first = run_inner_loop(problem, KernelWeights::uniform(4));
  REQUIRE(first.converged);
  InnerState second = run_inner_loop(problem, first.weights);
  REQUIRE(second.converged);
  REQUIRE((second.weights.d - first.weights.d).cwiseAbs().maxCoeff() <= 1e-4);
}
