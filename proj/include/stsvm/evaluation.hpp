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
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stsvm/common.hpp"
#include "stsvm/dataset.hpp"
#include "stsvm/trainer.hpp"

namespace stsvm {

struct ConfusionCounts {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const { return tp + fp + tn + fn; }
};

inline ConfusionCounts confusion(const IntVector& truth, const IntVector& predicted) {
  require(truth.size() == predicted.size(), ErrorCode::LengthMismatch,
          "truth/prediction length mismatch");
  ConfusionCounts c;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1)
      (predicted[i] == 1 ? c.tp : c.fn)++;
    else
      (predicted[i] == 1 ? c.fp : c.tn)++;
  }
  return c;
}

/// Accuracy, true rates and their geometric mean. A class absent from the
/// evaluated set makes its rate degenerate: the value is reported as 0 with
/// the corresponding flag set rather than raising an error, because tiny
/// positive sets legitimately produce all-negative predictions.
struct Metrics {
  double accuracy = 0.0;
  double gmean = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  bool tpr_degenerate = false;
  bool tnr_degenerate = false;
};

inline Metrics metrics(const ConfusionCounts& c) {
  require(c.total() >= 1, ErrorCode::InvalidArgument, "no evaluated samples");
  Metrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  if (c.tp + c.fn > 0) {
    m.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  } else {
    m.tpr_degenerate = true;
  }
  if (c.tn + c.fp > 0) {
    m.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  } else {
    m.tnr_degenerate = true;
  }
  m.gmean = std::sqrt(m.tpr * m.tnr);
  return m;
}

/// A repeatable synthetic experiment: cloud specs for the three datasets plus
/// the training configuration. Per-trial seeds replace the specs' seeds.
struct ScenarioSpec {
  std::string name;
  SynthSpec target;
  SynthSpec source;
  SynthSpec test;
  int max_positives = 14;
  TrainConfig train;
};

/// Few labeled target points, many source points drawn from class clouds
/// shifted off the target clouds, test points from the target distribution.
inline ScenarioSpec make_figure2_scenario() {
  ScenarioSpec s;
  s.name = "figure2";
  s.target.mean_neg = {0.0, 0.0};
  s.target.mean_pos = {2.5, 0.0};
  s.target.stddev_neg = s.target.stddev_pos = 0.6;
  s.target.count_neg = s.target.count_pos = 5;
  s.source.mean_neg = {0.8, 1.2};
  s.source.mean_pos = {3.3, 1.2};
  s.source.stddev_neg = s.source.stddev_pos = 0.6;
  s.source.count_neg = s.source.count_pos = 200;
  s.test = s.target;
  s.test.count_neg = s.test.count_pos = 50;
  return s;
}

/// Positive-count sweep setting: a handful of positives against a fixed
/// negative block, smaller source set, balanced test set.
inline ScenarioSpec make_figure5_scenario() {
  ScenarioSpec s = make_figure2_scenario();
  s.name = "figure5";
  s.target.count_neg = 10;
  s.target.count_pos = 5;  // replaced by the sweep
  s.source.count_neg = s.source.count_pos = 100;
  s.max_positives = 14;
  return s;
}

inline ScenarioSpec scenario_by_name(const std::string& name) {
  if (name == "figure2") return make_figure2_scenario();
  if (name == "figure5") return make_figure5_scenario();
  fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

inline double mean_of(const std::vector<double>& values) {
  require(!values.empty(), ErrorCode::InvalidArgument, "mean of empty set");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

inline double sample_stddev(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

/// Per-seed metrics for one variant under one scenario. The fingerprint
/// covers the scenario and seed schedule but not the variant, so equal
/// fingerprints across reports certify a paired comparison.
struct TrialReport {
  std::string fingerprint;
  Variant variant = Variant::Stsvm;
  std::vector<std::uint64_t> seeds;
  std::vector<Metrics> per_seed;

  std::vector<double> accuracies() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.accuracy);
    return v;
  }
  std::vector<double> gmeans() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.gmean);
    return v;
  }
  std::vector<double> tprs() const {
    std::vector<double> v;
    for (const auto& m : per_seed) v.push_back(m.tpr);
    return v;
  }
  double mean_accuracy() const { return mean_of(accuracies()); }
  double mean_gmean() const { return mean_of(gmeans()); }
  double mean_tpr() const { return mean_of(tprs()); }
};

namespace detail {

inline std::string scenario_fingerprint(const ScenarioSpec& scenario, int n_trials,
                                        std::uint64_t base_seed) {
  std::ostringstream out;
  auto cloud = [&](const char* tag, const SynthSpec& s) {
    out << tag << ":(" << s.mean_neg.x() << ',' << s.mean_neg.y() << ")/("
        << s.mean_pos.x() << ',' << s.mean_pos.y() << ")sd" << s.stddev_neg << ','
        << s.stddev_pos << "n" << s.count_neg << ',' << s.count_pos << ';';
  };
  out << scenario.name << ';';
  cloud("t", scenario.target);
  cloud("s", scenario.source);
  cloud("e", scenario.test);
  out << "C=" << scenario.train.c << ";theta=" << scenario.train.theta
      << ";eps=" << scenario.train.epsilon << ";lambda=" << scenario.train.lambda
      << ";kernels=" << scenario.train.kernel_count << ";trials=" << n_trials
      << ";base=" << base_seed;
  return out.str();
}

struct TrialData {
  Dataset target;
  Dataset source;
  Dataset test;
};

inline TrialData make_trial_data(const ScenarioSpec& scenario, std::uint64_t seed) {
  std::mt19937_64 seeder(seed);
  SynthSpec target = scenario.target;
  SynthSpec source = scenario.source;
  SynthSpec test = scenario.test;
  target.seed = seeder();
  source.seed = seeder();
  test.seed = seeder();
  return {generate_clouds(target, DatasetRole::Target),
          generate_clouds(source, DatasetRole::Source),
          generate_clouds(test, DatasetRole::Test)};
}

}  // namespace detail

/// Trains the variant on freshly generated data for each seed in
/// base_seed..base_seed+n_trials-1 and evaluates on the held-out test set.
/// Identical seeds across variants make the comparisons paired.
inline TrialReport run_trials(const ScenarioSpec& scenario, Variant variant, int n_trials,
                              std::uint64_t base_seed) {
  require(n_trials >= 1, ErrorCode::InvalidArgument, "n_trials must be >= 1");
  TrialReport report;
  report.fingerprint = detail::scenario_fingerprint(scenario, n_trials, base_seed);
  report.variant = variant;
  for (int t = 0; t < n_trials; ++t) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(t);
    const auto data = detail::make_trial_data(scenario, seed);
    TrainConfig config = scenario.train;
    config.variant = variant;
    config.seed = seed;
    std::optional<Dataset> source;
    if (variant != Variant::SvmBaseline) source = data.source;
    const ModelArtifact model = train(data.target, source, config);
    const Predictions pred = predict(model, data.test);
    report.seeds.push_back(seed);
    report.per_seed.push_back(metrics(confusion(*data.test.labels, pred.labels)));
  }
  return report;
}

/// Mean TPR as a function of the number of positive target samples.
inline std::vector<std::pair<int, TrialReport>> tpr_curve(const ScenarioSpec& scenario,
                                                          const std::vector<int>& positive_counts,
                                                          int n_trials,
                                                          std::uint64_t base_seed,
                                                          Variant variant = Variant::Stsvm) {
  std::vector<std::pair<int, TrialReport>> out;
  for (int n_pos : positive_counts) {
    require(n_pos >= 1, ErrorCode::InvalidArgument, "positive count must be >= 1");
    require(n_pos <= scenario.max_positives, ErrorCode::InsufficientPositives,
            "positive count " + std::to_string(n_pos) + " exceeds the scenario cap of " +
                std::to_string(scenario.max_positives));
    ScenarioSpec sized = scenario;
    sized.target.count_pos = n_pos;
    sized.test = scenario.test;
    out.emplace_back(n_pos, run_trials(sized, variant, n_trials, base_seed));
  }
  return out;
}

/// Accuracy/gmean reports under the cumulative kernel subsets.
inline std::vector<std::pair<int, TrialReport>> kernel_sweep(const ScenarioSpec& scenario,
                                                             const std::vector<int>& kernel_counts,
                                                             int n_trials,
                                                             std::uint64_t base_seed,
                                                             Variant variant = Variant::Stsvm) {
  std::vector<std::pair<int, TrialReport>> out;
  for (int count : kernel_counts) {
    KernelConfig::with_kernel_count(count, 1);  // validates against {4,8,12,16}
    ScenarioSpec sized = scenario;
    sized.train.kernel_count = count;
    out.emplace_back(count, run_trials(sized, variant, n_trials, base_seed));
  }
  return out;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, ErrorCode::LengthMismatch,
          "spearman needs two equal-length series");
  auto ranks = [](const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double ma = mean_of(ra);
  const double mb = mean_of(rb);
  double num = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return num / std::sqrt(va * vb);
}

}  // namespace stsvm
