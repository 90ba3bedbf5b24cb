// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <doctest.h>

#include "support.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/quality.hpp"

using namespace xrbench;

namespace {

std::string row(const std::string& id, double acc = 50, double ppl = 10) {
  return "{\"model_id\":\"" + id + "\",\"hellaswag\":" + std::to_string(acc) +
         ",\"mmlu\":40,\"arc\":45,\"truthfulqa\":42,\"winogrande\":60,\"wikitext2_perplexity\":" +
         std::to_string(ppl) + "}\n";
}

}  // namespace

TEST_CASE("bundled quality table loads seventeen models") {
  auto recs = load_quality_table(XRBENCH_SOURCE_DIR "/data/quality_example.jsonl");
  CHECK(recs.size() == 17);
  CHECK(recs.front().model_id == "m1");
}

TEST_CASE("out-of-range accuracy names field and line") {
  try {
    parse_quality_table(row("m1") + row("m2", 101), "q.jsonl");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("hellaswag") != std::string::npos);
    CHECK(msg.find("q.jsonl:2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_quality_table(row("m1", -1)), ValidationError);
  CHECK_THROWS_AS(parse_quality_table(row("m1", 50, 0)), ValidationError);
  CHECK_THROWS_AS(parse_quality_table("{\"model_id\":\"m1\"}\n"), ValidationError);
  CHECK_THROWS_AS(parse_quality_table("not json\n"), ValidationError);
}

TEST_CASE("duplicate model ids are rejected") {
  CHECK_THROWS_AS(parse_quality_table(row("m3") + row("m3")), DuplicateKeyError);
}

TEST_CASE("metric vector passes accuracies through and inverts perplexity") {
  QualityRecord r{"m1", 50, 40, 45, 42, 60, 2.0};
  auto v = quality_metric_vector(r);
  CHECK(v(0) == 50);
  CHECK(v(1) == 40);
  CHECK(v(2) == 45);
  CHECK(v(3) == 42);
  CHECK(v(4) == 60);
  CHECK(v(5) == 0.5);
  r.wikitext2_perplexity = 1.0;
  CHECK(quality_metric_vector(r)(5) == 1.0);
  CHECK(quality_metric_vector<float>(r)(5) == 1.0f);
}

TEST_CASE("metric vector is monotone in perplexity") {
  QualityRecord a{"m1", 50, 40, 45, 42, 60, 3.0};
  QualityRecord b = a;
  for (double p = 3.0; p > 1.0; p -= 0.25) {
    b.wikitext2_perplexity = p;
    CHECK(quality_metric_vector(b)(5) >= quality_metric_vector(a)(5));
    a = b;
  }
}
