#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace xrbench {

struct QualityRecord {
  std::string model_id;
  double hellaswag = 0;   // accuracy, percent
  double mmlu = 0;
  double arc = 0;
  double truthfulqa = 0;
  double winogrande = 0;
  double wikitext2_perplexity = 1;
};

// Names of the six quality metrics, in the order quality_metric_vector uses.
inline const std::array<std::string, 6> kQualityMetricNames = {
    "hellaswag", "mmlu", "arc", "truthfulqa", "winogrande", "inv_perplexity"};

/// One JSON object per line. Throws ValidationError naming the field and line
/// for out-of-range values, DuplicateKeyError for a repeated model_id.
std::vector<QualityRecord> load_quality_table(const std::string& path);
std::vector<QualityRecord> parse_quality_table(const std::string& text, const std::string& source = "<input>");

void validate(const QualityRecord& rec);

/// Five accuracies followed by 1/perplexity; every slot is higher-better.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 6, 1> quality_metric_vector(const QualityRecord& rec) {
  Eigen::Matrix<Scalar, 6, 1> v;
  v << rec.hellaswag, rec.mmlu, rec.arc, rec.truthfulqa, rec.winogrande,
      Scalar(1) / static_cast<Scalar>(rec.wikitext2_perplexity);
  return v;
}

}  // namespace xrbench
