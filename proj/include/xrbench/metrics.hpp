#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

/**
 * @file metrics.hpp
 * @brief Speed, stability and perplexity metrics.
 *
 * A single measurement ("run") consists of five instantaneous speeds L/t.
 * The run is gated on the coefficient of variation of those five speeds:
 * cv < 0.33 keeps the run and its mean becomes the consistent speed,
 * cv >= 0.33 marks it unstable and it only counts as an error.
 *
 * All standard deviations are population (divide by n).
 * Every function here is pure and header-only, templated on the scalar type.
 */

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xrbench/errors.hpp"

namespace xrbench {

enum class Phase { PromptProcessing, TokenGeneration };

inline const char* to_string(Phase p) {
  return p == Phase::PromptProcessing ? "pp" : "tg";
}

enum class RunStatus { Consistent, Unstable };

/// Samples per gated run.
inline constexpr std::size_t kGateSamples = 5;
/// A run whose cv reaches this value is unstable.
inline constexpr double kUnstableCv = 0.33;

template <typename Scalar = double>
struct TimingSample {
  std::int64_t string_length = 0;  // tokens
  Scalar elapsed = 0;              // seconds
  Phase kind = Phase::PromptProcessing;
};

template <typename Scalar = double>
struct GatedSpeed {
  Eigen::Matrix<Scalar, static_cast<int>(kGateSamples), 1> samples;
  Scalar mean = 0;
  Scalar std_dev = 0;
  Scalar cv = 0;
  RunStatus status = RunStatus::Consistent;

  bool consistent() const { return status == RunStatus::Consistent; }
};

template <typename Scalar = double>
struct SpeedSummary {
  Scalar mu = 0;
  Scalar sigma = 0;
  Scalar cv = 0;
  Scalar max_speed = 0;
  Scalar min_speed = 0;
};

template <typename Scalar = double>
struct ConsistencyStats {
  std::vector<Scalar> run_means;  // consistent runs only, submission order
  std::optional<SpeedSummary<Scalar>> summary;  // empty when every run was unstable
  std::size_t error_count = 0;
  std::size_t total_runs = 0;

  bool all_errors() const { return !summary.has_value(); }
};

inline RunStatus classify_cv(double cv) {
  return cv >= kUnstableCv ? RunStatus::Unstable : RunStatus::Consistent;
}

template <typename Scalar>
Scalar instantaneous_speed(const TimingSample<Scalar>& sample) {
  if (!(sample.elapsed > Scalar(0)) || !std::isfinite(static_cast<double>(sample.elapsed)))
    throw InvalidSample("timing sample has non-positive elapsed time");
  if (sample.string_length <= 0)
    throw InvalidSample("timing sample has non-positive string length");
  return static_cast<Scalar>(sample.string_length) / sample.elapsed;
}

// Mean and population standard deviation of a dense vector expression.
template <typename Derived>
auto population_moments(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar mean = v.mean();
  const Scalar var = (v.array() - mean).square().sum() / static_cast<Scalar>(v.size());
  return std::pair<Scalar, Scalar>{mean, std::sqrt(var)};
}

template <typename Scalar>
GatedSpeed<Scalar> gate_speed(std::span<const Scalar> speeds) {
  if (speeds.size() != kGateSamples)
    throw ArityError("speed gate needs exactly " + std::to_string(kGateSamples) +
                     " samples, got " + std::to_string(speeds.size()));
  GatedSpeed<Scalar> g;
  for (std::size_t i = 0; i < kGateSamples; ++i) {
    if (!(speeds[i] > Scalar(0)) || !std::isfinite(static_cast<double>(speeds[i])))
      throw InvalidSample("speed samples must be finite and positive");
    g.samples(static_cast<Eigen::Index>(i)) = speeds[i];
  }
  auto [mean, sd] = population_moments(g.samples);
  g.mean = mean;
  g.std_dev = sd;
  g.cv = sd / mean;
  g.status = classify_cv(static_cast<double>(g.cv));
  return g;
}

template <typename Scalar>
GatedSpeed<Scalar> gate_speed(const std::vector<Scalar>& speeds) {
  return gate_speed(std::span<const Scalar>(speeds));
}

template <typename Scalar>
ConsistencyStats<Scalar> consistency_stats(std::span<const GatedSpeed<Scalar>> runs) {
  if (runs.empty()) throw ArityError("consistency statistics need at least one run");
  ConsistencyStats<Scalar> out;
  out.total_runs = runs.size();
  for (const auto& r : runs) {
    if (r.consistent())
      out.run_means.push_back(r.mean);
    else
      ++out.error_count;
  }
  if (out.run_means.empty()) return out;

  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> means(
      out.run_means.data(), static_cast<Eigen::Index>(out.run_means.size()));
  auto [mu, sigma] = population_moments(means);
  out.summary = SpeedSummary<Scalar>{mu, sigma, sigma / mu, means.maxCoeff(), means.minCoeff()};
  return out;
}

template <typename Scalar>
ConsistencyStats<Scalar> consistency_stats(const std::vector<GatedSpeed<Scalar>>& runs) {
  return consistency_stats(std::span<const GatedSpeed<Scalar>>(runs));
}

/// exp of the negative mean natural log-probability.
template <typename Scalar>
Scalar perplexity(std::span<const Scalar> probs) {
  if (probs.empty()) throw ArityError("perplexity of an empty sequence");
  Scalar log_sum = 0;
  for (Scalar p : probs) {
    if (!(p > Scalar(0)) || p > Scalar(1))
      throw DomainError("token probability outside (0, 1]");
    log_sum += std::log(p);
  }
  return std::exp(-log_sum / static_cast<Scalar>(probs.size()));
}

template <typename Scalar>
Scalar perplexity(const std::vector<Scalar>& probs) {
  return perplexity(std::span<const Scalar>(probs));
}

}  // namespace xrbench
