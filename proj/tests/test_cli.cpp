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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "stsvm_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = work_dir() / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = work_dir() / ("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(STSVM_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

void make_standard_files() {
  static bool done = false;
  if (done) return;
  done = true;
  REQUIRE(run_cli("synth --mean-neg 0,0 --mean-pos 3,0 --std-neg 0.5 --std-pos 0.5 "
                  "--count-neg 5 --count-pos 5 --seed 11 --role target --out " +
                  path_of("target.csv"))
              .exit_code == 0);
  REQUIRE(run_cli("synth --mean-neg 0.4,0.8 --mean-pos 3.4,0.8 --std-neg 0.5 --std-pos 0.5 "
                  "--count-neg 15 --count-pos 15 --seed 12 --role source --out " +
                  path_of("source.csv"))
              .exit_code == 0);
  REQUIRE(run_cli("synth --mean-neg 0,0 --mean-pos 3,0 --std-neg 0.5 --std-pos 0.5 "
                  "--count-neg 10 --count-pos 10 --seed 13 --role test --out " +
                  path_of("test.csv"))
              .exit_code == 0);
}

}  // namespace

TEST_CASE("synth writes deterministic CSV files", "[cli]") {
  const std::string flags =
      "synth --mean-neg 1,2 --mean-pos 4,5 --count-neg 4 --count-pos 6 --seed 99 "
      "--role target --out ";
  REQUIRE(run_cli(flags + path_of("synth_a.csv")).exit_code == 0);
  REQUIRE(run_cli(flags + path_of("synth_b.csv")).exit_code == 0);
  const std::string a = slurp(path_of("synth_a.csv"));
  REQUIRE(a == slurp(path_of("synth_b.csv")));
  REQUIRE(a.rfind("f1,f2,label\n", 0) == 0);
  REQUIRE(std::count(a.begin(), a.end(), '\n') == 11);  // header + 10 rows
}

TEST_CASE("train, predict and eval round out the basic flow", "[cli]") {
  make_standard_files();
  CliResult trained = run_cli("train --target " + path_of("target.csv") + " --source " +
                              path_of("source.csv") + " --seed 5 --out " +
                              path_of("model.json"));
  REQUIRE(trained.exit_code == 0);
  REQUIRE(trained.err.find("\"event\":\"trained\"") != std::string::npos);
  REQUIRE(fs::exists(path_of("model.json")));

  CliResult predicted = run_cli("predict --model " + path_of("model.json") + " --data " +
                                path_of("test.csv") + " --out " + path_of("pred.csv"));
  REQUIRE(predicted.exit_code == 0);
  const std::string pred = slurp(path_of("pred.csv"));
  REQUIRE(pred.rfind("score,label\n", 0) == 0);
  REQUIRE(std::count(pred.begin(), pred.end(), '\n') == 21);

  CliResult evaluated =
      run_cli("eval --model " + path_of("model.json") + " --data " + path_of("test.csv"));
  REQUIRE(evaluated.exit_code == 0);
  json m = json::parse(evaluated.out);
  REQUIRE(m["accuracy"].get<double>() >= 0.0);
  REQUIRE(m["accuracy"].get<double>() <= 1.0);
  REQUIRE(m.contains("gmean"));
  REQUIRE(m.contains("tpr"));
  REQUIRE(m.contains("tnr"));
}

TEST_CASE("baseline eval on its own training data is perfect", "[cli]") {
  make_standard_files();
  REQUIRE(run_cli("train --target " + path_of("target.csv") + " --variant svm --out " +
                  path_of("baseline.json"))
              .exit_code == 0);
  CliResult evaluated = run_cli("eval --model " + path_of("baseline.json") + " --data " +
                                path_of("target.csv"));
  REQUIRE(evaluated.exit_code == 0);
  REQUIRE(json::parse(evaluated.out)["accuracy"].get<double>() == 1.0);
}

TEST_CASE("training is byte-deterministic for a fixed seed", "[cli]") {
  make_standard_files();
  const std::string base = "train --target " + path_of("target.csv") + " --source " +
                           path_of("source.csv") + " --seed 17 --out ";
  REQUIRE(run_cli(base + path_of("det_a.json")).exit_code == 0);
  REQUIRE(run_cli(base + path_of("det_b.json")).exit_code == 0);
  REQUIRE(slurp(path_of("det_a.json")) == slurp(path_of("det_b.json")));
}

TEST_CASE("usage errors exit with code 2", "[cli]") {
  make_standard_files();
  CliResult bad_kernels = run_cli("train --target " + path_of("target.csv") + " --source " +
                                  path_of("source.csv") + " --kernels 7 --out " +
                                  path_of("x.json"));
  REQUIRE(bad_kernels.exit_code == 2);
  REQUIRE(bad_kernels.err.find("UsageError") != std::string::npos);

  REQUIRE(run_cli("train --bogus-flag 1").exit_code == 2);
  REQUIRE(run_cli("").exit_code == 2);
  REQUIRE(run_cli("trials --scenario nope").exit_code == 2);
}

TEST_CASE("runtime errors exit with code 1 and a parseable record", "[cli]") {
  make_standard_files();
  CliResult missing = run_cli("train --target /nonexistent.csv --variant svm --out " +
                              path_of("y.json"));
  REQUIRE(missing.exit_code == 1);
  json record = json::parse(missing.err.substr(0, missing.err.find('\n')));
  REQUIRE(record["error"] == "MissingFile");

  // Model trained on 2-d data, scored against 3-d data.
  REQUIRE(run_cli("train --target " + path_of("target.csv") + " --variant svm --out " +
                  path_of("dim.json"))
              .exit_code == 0);
  std::ofstream wide(path_of("wide.csv"));
  wide << "a,b,c\n1,2,3\n";
  wide.close();
  CliResult mismatch = run_cli("predict --model " + path_of("dim.json") + " --data " +
                               path_of("wide.csv") + " --out " + path_of("z.csv"));
  REQUIRE(mismatch.exit_code == 1);
  REQUIRE(mismatch.err.find("DimMismatch") != std::string::npos);
}

TEST_CASE("baseline warns when source data is supplied", "[cli]") {
  make_standard_files();
  CliResult warned = run_cli("train --target " + path_of("target.csv") + " --source " +
                             path_of("source.csv") + " --variant svm --out " +
                             path_of("warn.json"));
  REQUIRE(warned.exit_code == 0);
  REQUIRE(warned.err.find("\"event\":\"warning\"") != std::string::npos);
}

TEST_CASE("trials emits one structured report per variant", "[cli]") {
  CliResult trials =
      run_cli("trials --scenario figure5 --n 1 --seed 3 --variants svm,stsvm-i");
  REQUIRE(trials.exit_code == 0);
  std::istringstream lines(trials.out);
  std::string line;
  int reports = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json record = json::parse(line);
    REQUIRE(record["event"] == "trial_report");
    REQUIRE(record["accuracy"]["per_seed"].size() == 1);
    ++reports;
  }
  REQUIRE(reports == 2);
}
