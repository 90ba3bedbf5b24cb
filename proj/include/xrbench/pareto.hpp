#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

/**
 * @file pareto.hpp
 * @brief Min-max normalization, weighted objective scores and Pareto fronts.
 *
 * Every objective lives in a higher-is-better space. Raw metric columns are
 * min-max normalized across all model-device pairs; lower-better columns use
 * the inverted form (max - v) / (max - min). A constant column maps to 0.5.
 * An objective score is the weighted sum of the normalized metrics of one pair.
 *
 * Vector a dominates b when a >= b in every objective and a > b in at least one.
 */

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "xrbench/errors.hpp"

namespace xrbench {

enum class Orientation { HigherBetter, LowerBetter };

inline const char* to_string(Orientation o) {
  return o == Orientation::HigherBetter ? "higher" : "lower";
}

template <typename Scalar>
using Column = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct MetricColumn {
  std::string name;
  Orientation orientation = Orientation::HigherBetter;
  Column<Scalar> values;  // one raw value per pair
};

/// Normalized values in [0, 1], higher-better. `degenerate` is set when max == min.
template <typename Derived>
Column<typename Derived::Scalar> normalize(const Eigen::MatrixBase<Derived>& values, Orientation orientation,
                                           bool* degenerate = nullptr) {
  using Scalar = typename Derived::Scalar;
  if (degenerate) *degenerate = false;
  if (values.size() == 0) return Column<Scalar>();
  if (!values.allFinite()) throw ValidationError("metric column holds a non-finite value");
  const Scalar lo = values.minCoeff();
  const Scalar hi = values.maxCoeff();
  if (hi == lo) {
    if (degenerate) *degenerate = true;
    return Column<Scalar>::Constant(values.size(), Scalar(0.5));
  }
  const Scalar range = hi - lo;
  if (orientation == Orientation::HigherBetter) return ((values.array() - lo) / range).matrix();
  return ((hi - values.array()) / range).matrix();
}

template <typename Scalar>
Column<Scalar> normalize(const MetricColumn<Scalar>& col, bool* degenerate = nullptr) {
  try {
    return normalize(col.values, col.orientation, degenerate);
  } catch (const ValidationError&) {
    throw ValidationError("metric '" + col.name + "' holds a non-finite value");
  }
}

struct WeightedMetric {
  std::string metric;
  Orientation orientation = Orientation::HigherBetter;
  double weight = 0;
};

struct ObjectiveConfig {
  std::string name;  // quality, performance or stability
  std::vector<WeightedMetric> metrics;

  /// Throws ValidationError unless all weights are positive and sum to 1 within 1e-9.
  void validate() const {
    if (metrics.empty()) throw ValidationError("objective '" + name + "' has no metrics");
    double sum = 0;
    for (const auto& m : metrics) {
      if (!(m.weight > 0))
        throw ValidationError("objective '" + name + "': weight of '" + m.metric + "' must be positive");
      sum += m.weight;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError("objective '" + name + "': weights sum to " + std::to_string(sum) + ", not 1");
  }

  template <typename Scalar = double>
  Column<Scalar> weights() const {
    Column<Scalar> w(static_cast<Eigen::Index>(metrics.size()));
    for (std::size_t i = 0; i < metrics.size(); ++i) w(static_cast<Eigen::Index>(i)) = static_cast<Scalar>(metrics[i].weight);
    return w;
  }
};

/// f_o for one pair: weights . normalized metric values, clamped to [0, 1].
template <typename Derived>
typename Derived::Scalar objective_score(const ObjectiveConfig& cfg, const Eigen::MatrixBase<Derived>& normalized) {
  using Scalar = typename Derived::Scalar;
  if (normalized.size() != static_cast<Eigen::Index>(cfg.metrics.size()))
    throw DimensionMismatch("objective '" + cfg.name + "' expects " + std::to_string(cfg.metrics.size()) +
                            " metrics, got " + std::to_string(normalized.size()));
  if (!normalized.allFinite())
    throw ValidationError("objective '" + cfg.name + "': incomplete pair (missing metric)");
  const Scalar s = cfg.weights<Scalar>().dot(normalized);
  return std::clamp(s, Scalar(0), Scalar(1));
}

/// Scores for every pair at once. `normalized` is pairs x metrics, columns in cfg order.
template <typename Derived>
Column<typename Derived::Scalar> objective_scores(const ObjectiveConfig& cfg, const Eigen::MatrixBase<Derived>& normalized) {
  using Scalar = typename Derived::Scalar;
  if (normalized.cols() != static_cast<Eigen::Index>(cfg.metrics.size()))
    throw DimensionMismatch("objective '" + cfg.name + "' metric count mismatch");
  Column<Scalar> s = normalized * cfg.weights<Scalar>();
  return s.cwiseMax(Scalar(0)).cwiseMin(Scalar(1));
}

struct PairId {
  std::string model_id;
  std::string device_id;

  std::string str() const { return model_id + "@" + device_id; }
  friend auto operator<=>(const PairId&, const PairId&) = default;
};

template <typename Scalar = double>
struct ObjectiveVector {
  PairId pair;
  Column<Scalar> scores;
};

template <typename DerivedA, typename DerivedB>
bool dominates(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("objective vectors of size " + std::to_string(a.size()) + " and " +
                            std::to_string(b.size()));
  return (a.array() >= b.array()).all() && (a.array() > b.array()).any();
}

template <typename Scalar>
bool dominates(const ObjectiveVector<Scalar>& a, const ObjectiveVector<Scalar>& b) {
  return dominates(a.scores, b.scores);
}

struct ParetoResult {
  std::vector<std::size_t> front;  // ascending input indices
  std::map<std::size_t, std::vector<std::size_t>> dominated_by;  // front members dominating each other point

  bool on_front(std::size_t i) const { return std::binary_search(front.begin(), front.end(), i); }
};

/// Pareto front of the rows of `points` (pairs x objectives).
///
/// Rows are visited in descending (sum, lexicographic) order, which places every
/// dominator before the points it dominates, so each row only has to be checked
/// against the front found so far.
template <typename Derived>
ParetoResult pareto_front(const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const auto n = static_cast<std::size_t>(points.rows());
  ParetoResult out;
  if (n == 0) return out;
  if (!points.allFinite()) throw ValidationError("objective scores must be finite");

  const Column<Scalar> sums = points.rowwise().sum();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    if (sums(ia) != sums(ib)) return sums(ia) > sums(ib);
    for (Eigen::Index k = 0; k < points.cols(); ++k)
      if (points(ia, k) != points(ib, k)) return points(ia, k) > points(ib, k);
    return a < b;
  });

  std::vector<std::size_t> front;
  for (std::size_t idx : order) {
    const auto row = points.row(static_cast<Eigen::Index>(idx));
    std::vector<std::size_t> witnesses;
    for (std::size_t f : front)
      if (dominates(points.row(static_cast<Eigen::Index>(f)), row)) witnesses.push_back(f);
    if (witnesses.empty()) {
      front.push_back(idx);
    } else {
      std::sort(witnesses.begin(), witnesses.end());
      out.dominated_by.emplace(idx, std::move(witnesses));
    }
  }
  std::sort(front.begin(), front.end());
  out.front = std::move(front);
  return out;
}

template <typename Scalar>
ParetoResult pareto_front(std::span<const ObjectiveVector<Scalar>> vectors) {
  if (vectors.empty()) return {};
  const auto dims = vectors.front().scores.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> points(static_cast<Eigen::Index>(vectors.size()), dims);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].scores.size() != dims) throw DimensionMismatch("objective vectors differ in dimension");
    points.row(static_cast<Eigen::Index>(i)) = vectors[i].scores.transpose();
  }
  return pareto_front(points);
}

template <typename Scalar>
ParetoResult pareto_front(const std::vector<ObjectiveVector<Scalar>>& vectors) {
  return pareto_front(std::span<const ObjectiveVector<Scalar>>(vectors));
}

}  // namespace xrbench
