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

#include <string>
#include <utility>

#include "stsvm/common.hpp"
#include "stsvm/kernel_bank.hpp"

namespace stsvm {

/// Combined label vector over the stacked sample set: the first `nt` entries
/// are ground-truth target labels (exactly 0 or 1), the remaining `ns`
/// entries are latent source labels relaxed to [0,1].
struct LabelVector {
  Vector values;
  Eigen::Index nt = 0;

  Eigen::Index n() const { return values.size(); }
  Eigen::Index ns() const { return values.size() - nt; }

  auto target() const { return values.head(nt); }
  auto source() const { return values.tail(ns()); }

  void validate() const {
    require(nt >= 1 && ns() >= 0, ErrorCode::InvalidArgument,
            "label vector needs at least one target entry");
    for (Eigen::Index i = 0; i < nt; ++i)
      require(values[i] == 0.0 || values[i] == 1.0, ErrorCode::InvalidLabel,
              "target labels must be exactly 0 or 1");
    for (Eigen::Index i = nt; i < n(); ++i)
      require(values[i] >= 0.0 && values[i] <= 1.0, ErrorCode::InvalidLabel,
              "source labels must lie in [0,1]");
  }

  /// Thresholds the source block at 0.5 (ties round up). Target entries are
  /// already hard and stay untouched.
  LabelVector hardened() const {
    LabelVector out = *this;
    for (Eigen::Index i = nt; i < n(); ++i) out.values[i] = values[i] >= 0.5 ? 1.0 : 0.0;
    return out;
  }

  /// Number of source entries whose hardened label differs from `other`'s.
  int source_flips(const LabelVector& other) const {
    require(n() == other.n() && nt == other.nt, ErrorCode::LengthMismatch,
            "label vectors have different shapes");
    int flips = 0;
    for (Eigen::Index i = nt; i < n(); ++i) {
      const double a = values[i] >= 0.5 ? 1.0 : 0.0;
      const double b = other.values[i] >= 0.5 ? 1.0 : 0.0;
      if (a != b) ++flips;
    }
    return flips;
  }
};

struct ClassCounts {
  int nt_pos = 0;
  int nt_neg = 0;
  int ns_pos = 0;
  int ns_neg = 0;
};

/// Hardens the labels and repairs an empty source class: when thresholding
/// leaves no positive (negative) source entry, the source entry with the
/// highest (lowest) soft value is reassigned, lowest index winning ties.
/// An empty target class cannot be repaired (ground truth) and is an error.
inline std::pair<LabelVector, ClassCounts> harden_and_repair(const LabelVector& y) {
  require(y.nt >= 1, ErrorCode::InvalidArgument, "no target entries");
  require(y.ns() >= 1, ErrorCode::InvalidArgument, "no source entries");
  LabelVector hard = y.hardened();

  ClassCounts counts;
  for (Eigen::Index i = 0; i < y.nt; ++i) (hard.values[i] == 1.0 ? counts.nt_pos : counts.nt_neg)++;
  require(counts.nt_pos >= 1, ErrorCode::NoPositiveTargets, "target data has no positive labels");
  require(counts.nt_neg >= 1, ErrorCode::NoNegativeTargets, "target data has no negative labels");

  for (Eigen::Index i = y.nt; i < y.n(); ++i) (hard.values[i] == 1.0 ? counts.ns_pos : counts.ns_neg)++;
  if (counts.ns_pos == 0 || counts.ns_neg == 0) {
    const bool need_pos = counts.ns_pos == 0;
    Eigen::Index best = y.nt;
    for (Eigen::Index i = y.nt + 1; i < y.n(); ++i) {
      if (need_pos ? y.values[i] > y.values[best] : y.values[i] < y.values[best]) best = i;
    }
    hard.values[best] = need_pos ? 1.0 : 0.0;
    counts.ns_pos += need_pos ? 1 : -1;
    counts.ns_neg += need_pos ? -1 : 1;
  }
  return {std::move(hard), counts};
}

/// Class counts from thresholded labels, with the source repair applied.
inline ClassCounts class_counts(const LabelVector& y) {
  return harden_and_repair(y).second;
}

/// The positive- and negative-class scaling vectors whose quadratic forms
/// give the class-conditional mean discrepancy. Entry layout, with the
/// frozen counts as denominators:
///   s_pos: y_i/nt_pos on target rows, -y_i/ns_pos on source rows
///   s_neg: (1-y_i)/nt_neg on target rows, -(1-y_i)/ns_neg on source rows
struct AdaptationVectors {
  Vector s_pos;
  Vector s_neg;
};

inline AdaptationVectors scaling_vectors(const LabelVector& y, const ClassCounts& counts) {
  require(counts.nt_pos >= 1 && counts.nt_neg >= 1 && counts.ns_pos >= 1 && counts.ns_neg >= 1,
          ErrorCode::InvalidArgument,
          "scaling vectors need at least one sample per class per domain");
  AdaptationVectors v;
  v.s_pos.resize(y.n());
  v.s_neg.resize(y.n());
  for (Eigen::Index i = 0; i < y.n(); ++i) {
    const double yi = y.values[i];
    if (i < y.nt) {
      v.s_pos[i] = yi / counts.nt_pos;
      v.s_neg[i] = (1.0 - yi) / counts.nt_neg;
    } else {
      v.s_pos[i] = -yi / counts.ns_pos;
      v.s_neg[i] = -(1.0 - yi) / counts.ns_neg;
    }
  }
  return v;
}

/// s_pos'·K·s_pos + s_neg'·K·s_neg. Nonnegative for PSD K. The rank-one
/// trace forms are never materialized as matrices.
inline double adaptation_term(const Matrix& k, const AdaptationVectors& v) {
  require(k.rows() == k.cols() && k.rows() == v.s_pos.size() && k.rows() == v.s_neg.size(),
          ErrorCode::DimMismatch, "kernel/vector dimension mismatch");
  return v.s_pos.dot(k * v.s_pos) + v.s_neg.dot(k * v.s_neg);
}

/// Per-base-kernel quadratic forms: p_m(+/-) = s(+/-)' k_m s(+/-).
/// Combining with weights d reproduces adaptation_term of the combined kernel.
inline std::pair<Vector, Vector> kernel_projections(const KernelBank& bank,
                                                    const AdaptationVectors& v) {
  require(bank.n() == v.s_pos.size(), ErrorCode::DimMismatch,
          "bank/vector dimension mismatch");
  Vector p_pos(bank.size());
  Vector p_neg(bank.size());
  for (int m = 0; m < bank.size(); ++m) {
    const Matrix& k = bank.kernels[static_cast<std::size_t>(m)];
    p_pos[m] = v.s_pos.dot(k * v.s_pos);
    p_neg[m] = v.s_neg.dot(k * v.s_neg);
  }
  return {std::move(p_pos), std::move(p_neg)};
}

/// Label-free mean-difference vector: 1/nt on target rows, -1/ns on source
/// rows. This is the marginal (standard) discrepancy used by the ablation.
inline Vector marginal_scaling_vector(Eigen::Index nt, Eigen::Index ns) {
  require(nt >= 1 && ns >= 1, ErrorCode::InvalidArgument,
          "marginal scaling needs nonempty target and source");
  Vector s(nt + ns);
  s.head(nt).setConstant(1.0 / static_cast<double>(nt));
  s.tail(ns).setConstant(-1.0 / static_cast<double>(ns));
  return s;
}

}  // namespace stsvm
