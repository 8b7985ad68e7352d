// Copyright 2026 The hbench Authors. All Rights Reserved.
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

#include "hbench/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_util.hpp"

namespace hbench {
namespace {

constexpr AceValue kU = std::nullopt;

Homography translation(double tx, double ty) {
  return Homography::from_matrix({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

TEST(AceTest, IdenticalHomographiesGiveZero) {
  Rng rng(1);
  const auto corners = PatchCorners::square(50, 40, 128);
  for (int t = 0; t < 20; ++t) {
    const auto h = Homography::from_matrix(testing::random_matrix(rng));
    EXPECT_EQ(ace(h, h, corners), 0.0);
  }
}

TEST(AceTest, TranslationComposedEqualsMagnitude) {
  Rng rng(2);
  const auto corners = PatchCorners::square(50, 40, 128);
  // Dyadic entries keep every product exact.
  const auto affine = Homography::from_matrix({1.25, 0.5, 7, -0.25, 0.75, 3, 0, 0, 1});
  EXPECT_EQ(ace(affine, compose(translation(3, 0), affine), corners), 3.0);
  EXPECT_EQ(ace(affine, compose(translation(3, 4), affine), corners), 5.0);
  for (int t = 0; t < 20; ++t) {
    const auto h = Homography::from_matrix(testing::random_matrix(rng));
    EXPECT_NEAR(ace(h, compose(translation(3, 4), h), corners), 5.0, 1e-9);
  }
}

TEST(AceTest, MatchesDirectCornerLoopAndIsSymmetric) {
  Rng rng(3);
  const auto corners = PatchCorners::square(10, 20, 128);
  for (int t = 0; t < 50; ++t) {
    const auto ma = testing::random_matrix(rng), mb = testing::random_matrix(rng);
    const auto a = Homography::from_matrix(ma), b = Homography::from_matrix(mb);
    double ref = 0.0;
    for (const auto& c : corners.c) {
      const Point2 p = testing::project(ma, c.u, c.v), q = testing::project(mb, c.u, c.v);
      ref += std::sqrt((p.u - q.u) * (p.u - q.u) + (p.v - q.v) * (p.v - q.v));
    }
    EXPECT_NEAR(ace(a, b, corners), ref / 4.0, 1e-9);
    EXPECT_NEAR(ace(a, b, corners), ace(b, a, corners), 1e-12);
  }
}

TEST(AceTest, DivergenceIsUndefined) {
  const auto corners = PatchCorners::square(0, 0, 128);
  // Sends the corner (127, 127) to infinity.
  const auto h = Homography::from_matrix({1, 0, 0, 0, 1, 0, -1.0 / 254, -1.0 / 254, 1});
  EXPECT_FALSE(try_ace(Homography{}, h, corners).has_value());
  EXPECT_HBENCH_ERROR(ace(Homography{}, h, corners), ErrorCode::kProjectiveDivergence);
}

TEST(MedianTest, Rules) {
  EXPECT_EQ(median_ace(std::vector<AceValue>{1.0, 2.0, 3.0}), 2.0);
  EXPECT_EQ(median_ace(std::vector<AceValue>{3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median_ace(std::vector<AceValue>{1.0, 2.0, 3.0, 4.0}), 2.5);
  EXPECT_TRUE(std::isnan(median_ace(std::vector<AceValue>{1.0, kU, kU})));
  EXPECT_TRUE(std::isnan(median_ace(std::vector<AceValue>{1.0, kU})));
  EXPECT_EQ(median_ace(std::vector<AceValue>{1.0, 2.0, kU}), 2.0);
  EXPECT_EQ(median_ace(std::vector<AceValue>{70.0, kU, 1.0, 2.0, 3.0}), 3.0);
  EXPECT_HBENCH_ERROR(median_ace(std::vector<AceValue>{}), ErrorCode::kEmptyInput);
}

TEST(MedianTest, FiniteBelowHalfUndefined) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    const int n = static_cast<int>(rng.uniform_int(1, 30));
    const int undefined = (n - 1) / 2;
    std::vector<AceValue> v;
    for (int i = 0; i < n; ++i) v.push_back(i < undefined ? kU : AceValue(rng.uniform(0, 100)));
    EXPECT_TRUE(std::isfinite(median_ace(v))) << n;
  }
}

TEST(OutlierRatioTest, Counts) {
  EXPECT_EQ(outlier_ratio(std::vector<AceValue>{1.0, 1.0, 1.0}), 0.0);
  EXPECT_EQ(outlier_ratio(std::vector<AceValue>{kU, kU}), 1.0);
  EXPECT_EQ(outlier_ratio(std::vector<AceValue>{10.0, 60.0, kU, 20.0}), 0.5);
  EXPECT_EQ(outlier_ratio(std::vector<AceValue>{50.0, 50.0000001}), 0.5);
  EXPECT_HBENCH_ERROR(outlier_ratio(std::vector<AceValue>{}), ErrorCode::kEmptyInput);
}

TEST(OutlierRatioTest, MonotoneUnderUndefinedExtension) {
  Rng rng(5);
  std::vector<AceValue> v;
  for (int i = 0; i < 20; ++i) v.push_back(rng.uniform(0, 100));
  double prev = outlier_ratio(v);
  for (int i = 0; i < 20; ++i) {
    v.push_back(kU);
    const double r = outlier_ratio(v);
    EXPECT_GE(r, prev);
    prev = r;
  }
}

TEST(SortedCurveTest, Ordering) {
  const auto c = sorted_curve(std::vector<AceValue>{3.0, 1.0, 2.0});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].percentile, 0.0);
  EXPECT_EQ(*c[0].ace, 1.0);
  EXPECT_EQ(c[1].percentile, 0.5);
  EXPECT_EQ(*c[1].ace, 2.0);
  EXPECT_EQ(c[2].percentile, 1.0);
  EXPECT_EQ(*c[2].ace, 3.0);

  const auto single = sorted_curve(std::vector<AceValue>{7.0});
  EXPECT_EQ(single[0].percentile, 0.0);

  const auto flat = sorted_curve(std::vector<AceValue>{2.0, 2.0, 2.0, 2.0});
  for (const auto& p : flat) EXPECT_EQ(*p.ace, 2.0);

  const auto mixed = sorted_curve(std::vector<AceValue>{kU, 5.0, kU, 1.0});
  EXPECT_EQ(*mixed[0].ace, 1.0);
  EXPECT_EQ(*mixed[1].ace, 5.0);
  EXPECT_FALSE(mixed[2].ace.has_value());
  EXPECT_FALSE(mixed[3].ace.has_value());
  EXPECT_HBENCH_ERROR(sorted_curve(std::vector<AceValue>{}), ErrorCode::kEmptyInput);
}

std::vector<AceRecord> sample_records() {
  std::vector<AceRecord> r;
  auto add = [&](const char* id, const char* m, CorruptionKind k, double mag, AceValue a) {
    CorruptionSpec s;
    s.kind = k;
    s.magnitude = mag;
    r.push_back({id, m, s, a});
  };
  add("img0", "dh", CorruptionKind::kNone, 0, 1.5);
  add("img1", "dh", CorruptionKind::kNone, 0, 2.5);
  add("img0", "classical", CorruptionKind::kNoise, 0.1, kU);
  add("img1", "classical", CorruptionKind::kNoise, 0.1, 0.25);
  add("img0", "classical", CorruptionKind::kNoise, 0.3, 80.0);
  return r;
}

TEST(SummaryTest, GroupsAndOrdersRows) {
  const auto rows = summarize(sample_records());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].method, "classical");
  EXPECT_EQ(rows[0].magnitude, 0.1);
  EXPECT_TRUE(std::isnan(rows[0].median_ace));
  EXPECT_EQ(rows[0].outlier_ratio, 0.5);
  EXPECT_EQ(rows[0].n, 2u);
  EXPECT_EQ(rows[1].magnitude, 0.3);
  EXPECT_EQ(rows[1].outlier_ratio, 1.0);
  EXPECT_EQ(rows[2].method, "dh");
  EXPECT_EQ(rows[2].median_ace, 2.0);
}

TEST(CsvTest, RecordsRoundTrip) {
  const auto recs = sample_records();
  std::stringstream ss;
  write_records_csv(ss, recs);
  const std::string text = ss.str();
  EXPECT_TRUE(text.starts_with("sample_id,method,corruption_kind,magnitude,ace\n"));
  EXPECT_NE(text.find("img0,classical,noise,0.1,undefined\n"), std::string::npos);
  const auto back = read_records_csv(ss);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    EXPECT_EQ(back[i].sample_id, recs[i].sample_id);
    EXPECT_EQ(back[i].corruption.kind, recs[i].corruption.kind);
    EXPECT_EQ(back[i].ace.has_value(), recs[i].ace.has_value());
    if (recs[i].ace) EXPECT_NEAR(*back[i].ace, *recs[i].ace, 1e-6);
  }
}

TEST(CsvTest, SummaryRoundTripAndSchema) {
  const auto rows = summarize(sample_records());
  std::stringstream ss;
  write_summary_csv(ss, rows);
  EXPECT_TRUE(ss.str().starts_with("method,corruption_kind,magnitude,median_ace,outlier_ratio,n\n"));
  EXPECT_NE(ss.str().find("classical,noise,0.1,NAN,0.500000,2\n"), std::string::npos);
  const auto back = read_summary_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  EXPECT_TRUE(std::isnan(back[0].median_ace));
  EXPECT_EQ(back[2].median_ace, 2.0);

  std::stringstream bad_header("method,kind\n");
  EXPECT_HBENCH_ERROR(read_summary_csv(bad_header), ErrorCode::kSchemaError);
  std::stringstream bad_row(
      "method,corruption_kind,magnitude,median_ace,outlier_ratio,n\ndh,noise,0.1,1.0,1.5,3\n");
  EXPECT_HBENCH_ERROR(read_summary_csv(bad_row), ErrorCode::kSchemaError);
  std::stringstream bad_kind(
      "method,corruption_kind,magnitude,median_ace,outlier_ratio,n\ndh,fog,0.1,1.0,0.5,3\n");
  EXPECT_HBENCH_ERROR(read_summary_csv(bad_kind), ErrorCode::kSchemaError);
}

TEST(CsvTest, CurvesPerGroup) {
  std::stringstream ss;
  write_curves_csv(ss, sample_records());
  const std::string text = ss.str();
  EXPECT_TRUE(text.starts_with("method,corruption_kind,magnitude,percentile,ace\n"));
  EXPECT_NE(text.find("classical,noise,0.1,0.000000,0.250000\n"), std::string::npos);
  EXPECT_NE(text.find("classical,noise,0.1,1.000000,undefined\n"), std::string::npos);
  EXPECT_NE(text.find("dh,none,0,1.000000,2.500000\n"), std::string::npos);
}

}  // namespace
}  // namespace hbench
