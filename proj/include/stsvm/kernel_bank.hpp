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
#include <string>
#include <utility>
#include <vector>

#include "stsvm/common.hpp"
#include "stsvm/dataset.hpp"

namespace stsvm {

// All four kinds evaluate to 1 at zero distance and decay toward 0,
// so every Gram matrix has a unit diagonal.
enum class KernelKind { Gaussian, Laplacian, InvSquareDist, InvDist };

inline const char* kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::Laplacian: return "laplacian";
    case KernelKind::InvSquareDist: return "inv_square_dist";
    case KernelKind::InvDist: return "inv_dist";
  }
  return "unknown";
}

struct KernelFamily {
  KernelKind kind;
  std::vector<double> sigma_exponents;  // width exponent grid, ascending
};

/// Which base kernels make up the bank. The width parameter of kernel m is
/// gamma = 1.2^sigma / feature_dim, so the grid adapts to dimensionality.
struct KernelConfig {
  std::vector<KernelFamily> families;
  int feature_dim = 1;

  /// Full 16-kernel bank: 4 kinds x 4 widths.
  static KernelConfig defaults(int feature_dim) {
    return with_kernel_count(16, feature_dim);
  }

  /// Cumulative subsets in kind order: 4 = Gaussian only, 8 = +Laplacian,
  /// 12 = +InvSquareDist, 16 = +InvDist.
  static KernelConfig with_kernel_count(int count, int feature_dim) {
    require(count == 4 || count == 8 || count == 12 || count == 16,
            ErrorCode::InvalidKernelCount,
            "kernel count must be one of {4, 8, 12, 16}, got " + std::to_string(count));
    require(feature_dim >= 1, ErrorCode::InvalidArgument, "feature_dim must be >= 1");
    const std::vector<double> gaussian_grid{2.0, 2.5, 3.0, 3.5};
    const std::vector<double> other_grid{3.0, 3.5, 4.0, 4.5};
    KernelConfig config;
    config.feature_dim = feature_dim;
    config.families.push_back({KernelKind::Gaussian, gaussian_grid});
    if (count >= 8) config.families.push_back({KernelKind::Laplacian, other_grid});
    if (count >= 12) config.families.push_back({KernelKind::InvSquareDist, other_grid});
    if (count >= 16) config.families.push_back({KernelKind::InvDist, other_grid});
    return config;
  }

  int kernel_count() const {
    int m = 0;
    for (const auto& family : families) m += static_cast<int>(family.sigma_exponents.size());
    return m;
  }

  /// Flattened (kind, gamma) list in deterministic order: kind-major,
  /// width exponent ascending.
  std::vector<std::pair<KernelKind, double>> entries() const {
    std::vector<std::pair<KernelKind, double>> out;
    for (const auto& family : families)
      for (double sigma : family.sigma_exponents)
        out.emplace_back(family.kind, std::pow(1.2, sigma) / feature_dim);
    return out;
  }
};

namespace detail {

inline double kernel_from_sqdist(KernelKind kind, double gamma, double sqdist) {
  switch (kind) {
    case KernelKind::Gaussian: return std::exp(-gamma * sqdist);
    case KernelKind::Laplacian: return std::exp(-std::sqrt(gamma * sqdist));
    case KernelKind::InvSquareDist: return 1.0 / (gamma * sqdist + 1.0);
    case KernelKind::InvDist: return 1.0 / (std::sqrt(gamma * sqdist) + 1.0);
  }
  return 0.0;
}

}  // namespace detail

inline double base_kernel_value(KernelKind kind, double gamma,
                                const Eigen::Ref<const Vector>& a,
                                const Eigen::Ref<const Vector>& b) {
  require(gamma > 0.0, ErrorCode::InvalidArgument, "kernel gamma must be positive");
  require(a.size() == b.size(), ErrorCode::DimMismatch,
          "kernel arguments have different dimensionality");
  return detail::kernel_from_sqdist(kind, gamma, (a - b).squaredNorm());
}

/// Simplex-constrained coefficients over the base kernels.
struct KernelWeights {
  Vector d;

  static KernelWeights uniform(int m) {
    KernelWeights w;
    w.d = Vector::Constant(m, 1.0 / m);
    return w;
  }

  int size() const { return static_cast<int>(d.size()); }

  void validate() const {
    require(d.size() >= 1, ErrorCode::InvalidArgument, "empty kernel weights");
    require((d.array() >= 0.0).all(), ErrorCode::InvalidArgument,
            "kernel weights must be nonnegative");
    require(std::abs(d.sum() - 1.0) <= 1e-9, ErrorCode::InvalidArgument,
            "kernel weights must sum to 1");
  }
};

/// The base Gram matrices over one stacked sample set, in config order.
struct KernelBank {
  std::vector<Matrix> kernels;
  KernelConfig config;
  Eigen::Index nt = 0;
  Eigen::Index ns = 0;

  int size() const { return static_cast<int>(kernels.size()); }
  Eigen::Index n() const { return kernels.empty() ? 0 : kernels.front().rows(); }
};

/// Builds all base Gram matrices. Squared distances are computed once per
/// pair and shared across the bank; the upper triangle is mirrored so each
/// matrix is exactly symmetric.
inline KernelBank build_bank(const Stacked& data, const KernelConfig& config) {
  const Eigen::Index n = data.features.rows();
  require(n >= 1, ErrorCode::EmptyDataset, "cannot build kernels over an empty sample set");
  require(config.feature_dim == data.features.cols(), ErrorCode::DimMismatch,
          "kernel config feature_dim does not match the data");

  Matrix sqdist(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sqdist(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (data.features.row(i) - data.features.row(j)).squaredNorm();
      sqdist(i, j) = d2;
      sqdist(j, i) = d2;
    }
  }

  KernelBank bank;
  bank.config = config;
  bank.nt = data.nt;
  bank.ns = data.ns;
  for (const auto& [kind, gamma] : config.entries()) {
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) = 1.0;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double v = detail::kernel_from_sqdist(kind, gamma, sqdist(i, j));
        k(i, j) = v;
        k(j, i) = v;
      }
    }
    bank.kernels.push_back(std::move(k));
  }
  return bank;
}

/// K = sum_m d_m k_m. Convex combination of PSD matrices, so PSD.
inline Matrix combine(const KernelBank& bank, const KernelWeights& weights) {
  require(weights.size() == bank.size(), ErrorCode::LengthMismatch,
          "weight count " + std::to_string(weights.size()) + " != kernel count " +
              std::to_string(bank.size()));
  Matrix k = Matrix::Zero(bank.n(), bank.n());
  for (int m = 0; m < bank.size(); ++m) k += weights.d[m] * bank.kernels[static_cast<std::size_t>(m)];
  return k;
}

/// Combined kernel values between every training row and one test row.
inline Vector cross_kernel(const KernelConfig& config, const Matrix& train_rows,
                           const Eigen::Ref<const Vector>& test_row,
                           const KernelWeights& weights) {
  require(train_rows.rows() >= 1, ErrorCode::EmptyDataset, "no training rows");
  require(train_rows.cols() == test_row.size(), ErrorCode::DimMismatch,
          "test row dimensionality mismatch");
  const auto entries = config.entries();
  require(static_cast<int>(entries.size()) == weights.size(), ErrorCode::LengthMismatch,
          "weight count does not match kernel config");
  Vector out = Vector::Zero(train_rows.rows());
  for (Eigen::Index i = 0; i < train_rows.rows(); ++i) {
    const double d2 = (train_rows.row(i).transpose() - test_row).squaredNorm();
    double acc = 0.0;
    for (std::size_t m = 0; m < entries.size(); ++m)
      acc += weights.d[static_cast<Eigen::Index>(m)] *
             detail::kernel_from_sqdist(entries[m].first, entries[m].second, d2);
    out[i] = acc;
  }
  return out;
}

/// Batch form: column t holds the combined kernel values against test row t.
inline Matrix cross_kernel_matrix(const KernelConfig& config, const Matrix& train_rows,
                                  const Matrix& test_rows, const KernelWeights& weights) {
  require(train_rows.cols() == test_rows.cols(), ErrorCode::DimMismatch,
          "test rows dimensionality mismatch");
  Matrix out(train_rows.rows(), test_rows.rows());
  for (Eigen::Index t = 0; t < test_rows.rows(); ++t)
    out.col(t) = cross_kernel(config, train_rows, test_rows.row(t).transpose(), weights);
  return out;
}

}  // namespace stsvm
