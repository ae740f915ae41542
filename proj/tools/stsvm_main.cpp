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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stsvm/stsvm.hpp"

namespace {

using nlohmann::json;
using namespace stsvm;

void emit_error(const std::string& code, const std::string& message) {
  json record{{"error", code}, {"message", message}};
  std::cerr << record.dump() << "\n";
}

void emit_event(const json& record) { std::cerr << record.dump() << "\n"; }

json report_to_json(const std::string& scenario, int count_key, const TrialReport& report) {
  auto block = [](const std::vector<double>& values) {
    return json{{"mean", mean_of(values)},
                {"std", sample_stddev(values)},
                {"per_seed", values}};
  };
  json j{{"event", "trial_report"},
         {"scenario", scenario},
         {"variant", variant_name(report.variant)},
         {"seeds", report.seeds},
         {"fingerprint", report.fingerprint},
         {"accuracy", block(report.accuracies())},
         {"gmean", block(report.gmeans())},
         {"tpr", block(report.tprs())}};
  if (count_key >= 0) j["count"] = count_key;
  return j;
}

struct TrainFlags {
  std::string target_path;
  std::string source_path;
  std::string out_path;
  std::string variant = "stsvm";
  TrainConfig config;
};

int run_train(const TrainFlags& flags) {
  const Variant variant = variant_from_name(flags.variant);
  TrainConfig config = flags.config;
  config.variant = variant;
  config.validate();

  Dataset target = load_csv(flags.target_path, DatasetRole::Target);
  std::optional<Dataset> source;
  if (variant == Variant::SvmBaseline) {
    if (!flags.source_path.empty())
      emit_event({{"event", "warning"},
                  {"message", "baseline ignores --source; training on target only"}});
  } else {
    require(!flags.source_path.empty(), ErrorCode::InvalidArgument,
            std::string(variant_name(variant)) + " requires --source");
    source = load_csv(flags.source_path, DatasetRole::Source);
  }

  ModelArtifact model = train(target, source, config);
  for (const auto& record : model.log)
    emit_event({{"event", "outer"},
                {"iteration", record.iteration},
                {"h", record.h_value},
                {"L_before", record.objective_before_refine},
                {"L_after", record.objective_after_refine},
                {"weight_change", record.weight_change},
                {"flips", record.label_flips},
                {"inner_steps", record.inner.size()}});
  emit_event({{"event", "trained"},
              {"variant", variant_name(model.variant)},
              {"converged", model.converged},
              {"outer_iterations", model.log.size()}});
  save_model(flags.out_path, model);
  return 0;
}

int run_predict(const std::string& model_path, const std::string& data_path,
                const std::string& out_path) {
  ModelArtifact model = load_model(model_path);
  Dataset data = load_csv(data_path, DatasetRole::Test);
  Predictions pred = predict(model, data);
  std::ofstream out(out_path);
  require(out.good(), ErrorCode::IoError, "cannot write " + out_path);
  out << "score,label\n";
  for (Eigen::Index i = 0; i < pred.scores.size(); ++i)
    out << detail::format_double(pred.scores[i]) << ',' << pred.labels[i] << '\n';
  require(out.good(), ErrorCode::IoError, "write failed for " + out_path);
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path) {
  ModelArtifact model = load_model(model_path);
  Dataset data = load_csv(data_path, DatasetRole::Test);
  require(data.labels.has_value(), ErrorCode::InvalidLabel,
          "eval needs a labeled dataset (no `label` column found)");
  Predictions pred = predict(model, data);
  Metrics m = metrics(confusion(*data.labels, pred.labels));
  json out{{"accuracy", m.accuracy}, {"gmean", m.gmean}, {"tpr", m.tpr}, {"tnr", m.tnr},
           {"tpr_degenerate", m.tpr_degenerate}, {"tnr_degenerate", m.tnr_degenerate}};
  std::cout << out.dump() << "\n";
  return 0;
}

struct SynthFlags {
  std::vector<double> mean_neg{0.0, 0.0};
  std::vector<double> mean_pos{3.0, 0.0};
  double std_neg = 0.5;
  double std_pos = 0.5;
  int count_neg = 5;
  int count_pos = 5;
  std::uint64_t seed = 0;
  std::string role = "target";
  std::string out_path;
};

int run_synth(const SynthFlags& flags) {
  SynthSpec spec;
  spec.mean_neg = {flags.mean_neg[0], flags.mean_neg[1]};
  spec.mean_pos = {flags.mean_pos[0], flags.mean_pos[1]};
  spec.stddev_neg = flags.std_neg;
  spec.stddev_pos = flags.std_pos;
  spec.count_neg = flags.count_neg;
  spec.count_pos = flags.count_pos;
  spec.seed = flags.seed;
  DatasetRole role = DatasetRole::Target;
  if (flags.role == "source") role = DatasetRole::Source;
  else if (flags.role == "test") role = DatasetRole::Test;
  else require(flags.role == "target", ErrorCode::InvalidArgument,
               "role must be target, source or test");
  Dataset ds = generate_clouds(spec, role);
  write_csv(flags.out_path, ds);
  return 0;
}

struct TrialFlags {
  std::string scenario = "figure2";
  int n_trials = 10;
  std::uint64_t seed = 7;
  std::vector<std::string> variants{"stsvm", "stsvm-i", "svm"};
  double lambda = 1.0;
};

int run_trials_cmd(const TrialFlags& flags) {
  ScenarioSpec scenario = scenario_by_name(flags.scenario);
  scenario.train.lambda = flags.lambda;
  std::vector<TrialReport> reports;
  for (const auto& name : flags.variants) {
    const Variant variant = variant_from_name(name);
    TrialReport report = run_trials(scenario, variant, flags.n_trials, flags.seed);
    std::cout << report_to_json(flags.scenario, -1, report).dump() << "\n";
    reports.push_back(std::move(report));
  }
  std::cerr << "variant        accuracy        gmean           tpr\n";
  for (const auto& r : reports) {
    std::fprintf(stderr, "%-12s  %.4f +- %.4f  %.4f +- %.4f  %.4f\n",
                 variant_name(r.variant), r.mean_accuracy(),
                 sample_stddev(r.accuracies()), r.mean_gmean(),
                 sample_stddev(r.gmeans()), r.mean_tpr());
  }
  return 0;
}

struct SweepFlags {
  std::vector<int> kernel_counts{4, 8, 12, 16};
  std::string scenario = "figure2";
  int n_trials = 10;
  std::uint64_t seed = 7;
  std::string variant = "stsvm";
};

int run_sweep(const SweepFlags& flags) {
  ScenarioSpec scenario = scenario_by_name(flags.scenario);
  auto sweep = kernel_sweep(scenario, flags.kernel_counts, flags.n_trials, flags.seed,
                            variant_from_name(flags.variant));
  std::cerr << "kernels  accuracy  gmean\n";
  for (const auto& [count, report] : sweep) {
    std::cout << report_to_json(flags.scenario, count, report).dump() << "\n";
    std::fprintf(stderr, "%-7d  %.4f    %.4f\n", count, report.mean_accuracy(),
                 report.mean_gmean());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-taught transfer SVM: training, prediction and experiment harness"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* cmd_train = app.add_subcommand("train", "Train a model from CSV data");
  cmd_train->add_option("--target", train_flags.target_path, "Labeled target CSV")->required();
  cmd_train->add_option("--source", train_flags.source_path, "Unlabeled source CSV");
  cmd_train->add_option("--variant", train_flags.variant, "stsvm|stsvm-i|dtsvm|svm")
      ->check(CLI::IsMember({"stsvm", "stsvm-i", "dtsvm", "svm"}));
  cmd_train->add_option("--c", train_flags.config.c, "Box constraint");
  cmd_train->add_option("--theta", train_flags.config.theta, "Risk weight");
  cmd_train->add_option("--lambda", train_flags.config.lambda, "Label anchoring weight");
  cmd_train->add_option("--epsilon", train_flags.config.epsilon, "Weight ridge");
  cmd_train->add_option("--kernels", train_flags.config.kernel_count, "Base kernel count")
      ->check(CLI::IsMember({4, 8, 12, 16}));
  cmd_train->add_option("--seed", train_flags.config.seed, "Recorded experiment seed");
  cmd_train->add_flag("--standardize", train_flags.config.standardize,
                      "Standardize features (fit on target+source)");
  cmd_train->add_option("--max-outer", train_flags.config.max_outer, "Outer iteration cap");
  cmd_train->add_option("--max-inner", train_flags.config.max_inner, "Inner iteration cap");
  cmd_train->add_option("--out", train_flags.out_path, "Model file to write")->required();

  std::string model_path, data_path, out_path;
  auto* cmd_predict = app.add_subcommand("predict", "Score a CSV with a trained model");
  cmd_predict->add_option("--model", model_path, "Model file")->required();
  cmd_predict->add_option("--data", data_path, "CSV to score")->required();
  cmd_predict->add_option("--out", out_path, "Output CSV (score,label)")->required();

  auto* cmd_eval = app.add_subcommand("eval", "Evaluate a model on labeled CSV data");
  cmd_eval->add_option("--model", model_path, "Model file")->required();
  cmd_eval->add_option("--data", data_path, "Labeled CSV")->required();

  SynthFlags synth_flags;
  auto* cmd_synth = app.add_subcommand("synth", "Generate two Gaussian class clouds");
  cmd_synth->add_option("--mean-neg", synth_flags.mean_neg, "Negative cloud mean x,y")
      ->delimiter(',')->expected(2);
  cmd_synth->add_option("--mean-pos", synth_flags.mean_pos, "Positive cloud mean x,y")
      ->delimiter(',')->expected(2);
  cmd_synth->add_option("--std-neg", synth_flags.std_neg, "Negative cloud stddev");
  cmd_synth->add_option("--std-pos", synth_flags.std_pos, "Positive cloud stddev");
  cmd_synth->add_option("--count-neg", synth_flags.count_neg, "Negative samples");
  cmd_synth->add_option("--count-pos", synth_flags.count_pos, "Positive samples");
  cmd_synth->add_option("--seed", synth_flags.seed, "Generator seed");
  cmd_synth->add_option("--role", synth_flags.role, "target|source|test")
      ->check(CLI::IsMember({"target", "source", "test"}));
  cmd_synth->add_option("--out", synth_flags.out_path, "Output CSV")->required();

  TrialFlags trial_flags;
  auto* cmd_trials = app.add_subcommand("trials", "Repeated paired experiment runs");
  cmd_trials->add_option("--scenario", trial_flags.scenario, "figure2|figure5")
      ->check(CLI::IsMember({"figure2", "figure5"}));
  cmd_trials->add_option("--n", trial_flags.n_trials, "Trials per variant")
      ->check(CLI::PositiveNumber);
  cmd_trials->add_option("--seed", trial_flags.seed, "Base seed");
  cmd_trials->add_option("--variants", trial_flags.variants, "Variants to compare")
      ->delimiter(',');
  cmd_trials->add_option("--lambda", trial_flags.lambda, "Label anchoring weight");

  SweepFlags sweep_flags;
  auto* cmd_sweep = app.add_subcommand("sweep", "Accuracy/gmean under kernel subsets");
  cmd_sweep->add_option("--kernels-list", sweep_flags.kernel_counts, "Subset sizes")
      ->delimiter(',');
  cmd_sweep->add_option("--scenario", sweep_flags.scenario, "figure2|figure5")
      ->check(CLI::IsMember({"figure2", "figure5"}));
  cmd_sweep->add_option("--n", sweep_flags.n_trials, "Trials per size")
      ->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--seed", sweep_flags.seed, "Base seed");
  cmd_sweep->add_option("--variant", sweep_flags.variant, "Variant to sweep")
      ->check(CLI::IsMember({"stsvm", "stsvm-i", "dtsvm", "svm"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("UsageError", e.what());
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_train)) return run_train(train_flags);
    if (app.got_subcommand(cmd_predict)) return run_predict(model_path, data_path, out_path);
    if (app.got_subcommand(cmd_eval)) return run_eval(model_path, data_path);
    if (app.got_subcommand(cmd_synth)) return run_synth(synth_flags);
    if (app.got_subcommand(cmd_trials)) return run_trials_cmd(trial_flags);
    if (app.got_subcommand(cmd_sweep)) return run_sweep(sweep_flags);
  } catch (const Error& e) {
    emit_error(e.code_name(), e.what());
    // Config/flag violations are usage errors; everything else is runtime.
    return e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::InvalidKernelCount
               ? 2
               : 1;
  } catch (const std::exception& e) {
    emit_error("Internal", e.what());
    return 1;
  }
  return 0;
}
