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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stsvm/common.hpp"

namespace stsvm {

enum class DatasetRole { Target, Source, Test };

inline const char* role_name(DatasetRole role) {
  switch (role) {
    case DatasetRole::Target: return "target";
    case DatasetRole::Source: return "source";
    case DatasetRole::Test: return "test";
  }
  return "unknown";
}

/// A sample matrix (one row per sample) with optional {0,1} labels.
/// Target data always carries labels, source data never does.
struct Dataset {
  Matrix features;                    // n x dim
  std::optional<IntVector> labels;    // per-row 0/1 when present
  DatasetRole role = DatasetRole::Target;
  std::vector<std::string> feature_names;  // header names, label column excluded

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  void validate() const {
    require(n() >= 1, ErrorCode::EmptyDataset, "dataset has no rows");
    require(dim() >= 1, ErrorCode::EmptyDataset, "dataset has no feature columns");
    require(features.allFinite(), ErrorCode::NonFiniteFeature,
            "dataset contains non-finite feature values");
    if (role == DatasetRole::Target) {
      require(labels.has_value(), ErrorCode::InvalidLabel,
              "target dataset requires labels");
    }
    if (role == DatasetRole::Source) {
      require(!labels.has_value(), ErrorCode::InvalidLabel,
              "source dataset must be unlabeled");
    }
    if (labels) {
      require(labels->size() == n(), ErrorCode::LengthMismatch,
              "label count does not match row count");
      for (Eigen::Index i = 0; i < labels->size(); ++i) {
        require((*labels)[i] == 0 || (*labels)[i] == 1, ErrorCode::InvalidLabel,
                "labels must be 0 or 1");
      }
    }
  }
};

namespace detail {

inline double parse_cell(const std::string& cell, const std::string& where) {
  std::string trimmed = cell;
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  trimmed.erase(trimmed.begin(), std::find_if(trimmed.begin(), trimmed.end(), not_space));
  trimmed.erase(std::find_if(trimmed.rbegin(), trimmed.rend(), not_space).base(), trimmed.end());
  require(!trimmed.empty(), ErrorCode::NonNumericCell, "empty cell at " + where);
  double value = 0.0;
  const char* first = trimmed.data();
  const char* last = first + trimmed.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    // from_chars accepts "nan"/"inf"; anything it rejects is non-numeric.
    fail(ErrorCode::NonNumericCell, "non-numeric cell '" + cell + "' at " + where);
  }
  require(std::isfinite(value), ErrorCode::NonFiniteFeature,
          "non-finite value '" + cell + "' at " + where);
  return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Loads a comma-delimited file with a header row. A column named `label`
/// supplies labels; it is excluded from the feature columns regardless of role.
inline Dataset load_csv(const std::filesystem::path& path, DatasetRole role) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::MissingFile, "cannot open " + path.string());

  std::string line;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  int label_col = -1;
  std::vector<double> label_values;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (header.empty()) {
      header = cells;
      for (std::size_t j = 0; j < header.size(); ++j) {
        std::string name = header[j];
        name.erase(std::remove_if(name.begin(), name.end(),
                                  [](unsigned char c) { return std::isspace(c); }),
                   name.end());
        header[j] = name;
        if (name == "label") label_col = static_cast<int>(j);
      }
      continue;
    }
    require(cells.size() == header.size(), ErrorCode::RaggedRows,
            "row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                " cells, expected " + std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string where = "row " + std::to_string(line_no) + ", column " + header[j];
      const double v = detail::parse_cell(cells[j], where);
      if (static_cast<int>(j) == label_col) {
        label_values.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  require(!header.empty(), ErrorCode::EmptyFile, "empty file " + path.string());
  require(!rows.empty(), ErrorCode::EmptyDataset, "no data rows in " + path.string());

  Dataset ds;
  ds.role = role;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != label_col) ds.feature_names.push_back(header[j]);

  if (role == DatasetRole::Target) {
    require(label_col >= 0, ErrorCode::InvalidLabel,
            "target file " + path.string() + " has no `label` column");
  }
  const bool keep_labels =
      label_col >= 0 && role != DatasetRole::Source;  // source drops any label column
  if (keep_labels) {
    IntVector labels(static_cast<Eigen::Index>(label_values.size()));
    for (std::size_t i = 0; i < label_values.size(); ++i) {
      const double v = label_values[i];
      require(v == 0.0 || v == 1.0, ErrorCode::InvalidLabel,
              "label " + detail::format_double(v) + " outside {0,1}");
      labels[static_cast<Eigen::Index>(i)] = static_cast<int>(v);
    }
    ds.labels = std::move(labels);
  }
  ds.validate();
  return ds;
}

/// Writes the dataset back out in the same format load_csv reads. Values are
/// printed with shortest round-trip precision.
inline void write_csv(const std::filesystem::path& path, const Dataset& ds) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot write " + path.string());
  for (Eigen::Index j = 0; j < ds.dim(); ++j) {
    if (j > 0) out << ',';
    out << (static_cast<std::size_t>(j) < ds.feature_names.size()
                ? ds.feature_names[static_cast<std::size_t>(j)]
                : "f" + std::to_string(j + 1));
  }
  if (ds.labels) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      if (j > 0) out << ',';
      out << detail::format_double(ds.features(i, j));
    }
    if (ds.labels) out << ',' << (*ds.labels)[i];
    out << '\n';
  }
  require(out.good(), ErrorCode::IoError, "write failed for " + path.string());
}

/// Two isotropic Gaussian clouds in the plane, one per class.
/// The same seed always reproduces the same matrix.
struct SynthSpec {
  Eigen::Vector2d mean_neg{0.0, 0.0};
  Eigen::Vector2d mean_pos{3.0, 0.0};
  double stddev_neg = 0.5;
  double stddev_pos = 0.5;
  int count_neg = 5;
  int count_pos = 5;
  std::uint64_t seed = 0;

  void validate() const {
    require(stddev_neg > 0.0 && stddev_pos > 0.0, ErrorCode::InvalidArgument,
            "cloud standard deviation must be positive");
    require(count_neg >= 1 && count_pos >= 1, ErrorCode::InvalidArgument,
            "cloud sample counts must be at least 1");
  }
};

/// Draws negative-class samples first, then positive-class samples.
/// Labels are attached for Target/Test roles and withheld for Source.
inline Dataset generate_clouds(const SynthSpec& spec, DatasetRole role) {
  spec.validate();
  const int total = spec.count_neg + spec.count_pos;
  Dataset ds;
  ds.role = role;
  ds.features.resize(total, 2);
  ds.feature_names = {"f1", "f2"};

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw_cloud = [&](int offset, int count, const Eigen::Vector2d& mean, double sd) {
    for (int i = 0; i < count; ++i) {
      ds.features(offset + i, 0) = mean.x() + sd * gauss(rng);
      ds.features(offset + i, 1) = mean.y() + sd * gauss(rng);
    }
  };
  draw_cloud(0, spec.count_neg, spec.mean_neg, spec.stddev_neg);
  draw_cloud(spec.count_neg, spec.count_pos, spec.mean_pos, spec.stddev_pos);

  if (role != DatasetRole::Source) {
    IntVector labels(total);
    labels.head(spec.count_neg).setZero();
    labels.tail(spec.count_pos).setOnes();
    ds.labels = std::move(labels);
  }
  ds.validate();
  return ds;
}

/// Target rows first, source rows second; every index into the combined
/// matrix below `nt` refers to a target sample.
struct Stacked {
  Matrix features;
  Eigen::Index nt = 0;
  Eigen::Index ns = 0;

  Eigen::Index n() const { return nt + ns; }
};

inline Stacked stack(const Dataset& target, const Dataset& source) {
  require(target.n() >= 1, ErrorCode::EmptyDataset, "target dataset is empty");
  require(source.n() >= 1, ErrorCode::EmptyDataset, "source dataset is empty");
  require(target.dim() == source.dim(), ErrorCode::DimMismatch,
          "target dim " + std::to_string(target.dim()) + " != source dim " +
              std::to_string(source.dim()));
  Stacked out;
  out.nt = target.n();
  out.ns = source.n();
  out.features.resize(out.nt + out.ns, target.dim());
  out.features.topRows(out.nt) = target.features;
  out.features.bottomRows(out.ns) = source.features;
  return out;
}

/// Per-feature affine map to zero mean and unit variance.
struct Standardizer {
  Vector mean;
  Vector scale;  // 1/stddev, 1.0 for constant features

  static Standardizer fit(const Matrix& features) {
    Standardizer s;
    s.mean = features.colwise().mean();
    Matrix centered = features.rowwise() - s.mean.transpose();
    Vector var = centered.array().square().colwise().mean();
    s.scale.resize(var.size());
    for (Eigen::Index j = 0; j < var.size(); ++j)
      s.scale[j] = var[j] > 0.0 ? 1.0 / std::sqrt(var[j]) : 1.0;
    return s;
  }

  Matrix apply(const Matrix& features) const {
    require(features.cols() == mean.size(), ErrorCode::DimMismatch,
            "standardizer dimensionality mismatch");
    return (features.rowwise() - mean.transpose()).array().rowwise() *
           scale.transpose().array();
  }
};

}  // namespace stsvm
