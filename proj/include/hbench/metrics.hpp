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

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbench/geometry.hpp"
#include "hbench/synth.hpp"

namespace hbench {

// An ACE value; empty means the estimator produced no homography (or the
// corner map diverged) and the sample counts as undefined.
using AceValue = std::optional<double>;

struct AceRecord {
  std::string sample_id;
  std::string method;
  CorruptionSpec corruption;
  AceValue ace;
};

struct SummaryRow {
  std::string method;
  CorruptionKind kind = CorruptionKind::kNone;
  double magnitude = 0.0;
  double median_ace = 0.0;  // NaN when the median lands on an undefined record
  double outlier_ratio = 0.0;
  std::size_t n = 0;
};

struct CurvePoint {
  double percentile = 0.0;
  AceValue ace;
};

inline constexpr double kOutlierAce = 50.0;

// Mean corner distance (1/4) sum |h_target c_i - h_output c_i|.
double ace(const Homography& h_target, const Homography& h_output, const PatchCorners& corners);
// As ace(), with kProjectiveDivergence mapped to an undefined value.
AceValue try_ace(const Homography& h_target, const Homography& h_output,
                 const PatchCorners& corners);

// Undefined values rank above every finite one; even counts average the two
// middle values. Throws kEmptyInput.
double median_ace(std::span<const AceValue> values);
// Fraction of values that are undefined or exceed `threshold`.
double outlier_ratio(std::span<const AceValue> values, double threshold = kOutlierAce);
// Ascending values, undefined last; percentile = rank / (n - 1).
std::vector<CurvePoint> sorted_curve(std::span<const AceValue> values);

std::vector<AceValue> ace_values(std::span<const AceRecord> records);

// One row per (method, kind, magnitude), ordered by method name, then kind,
// then magnitude.
std::vector<SummaryRow> summarize(std::span<const AceRecord> records);

// CSV schemas:
//   records: sample_id,method,corruption_kind,magnitude,ace   (ace may be "undefined")
//   summary: method,corruption_kind,magnitude,median_ace,outlier_ratio,n
//   curves:  method,corruption_kind,magnitude,percentile,ace
void write_records_csv(std::ostream& os, std::span<const AceRecord> records);
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);
void write_curves_csv(std::ostream& os, std::span<const AceRecord> records);

std::vector<AceRecord> read_records_csv(std::istream& is);
// Throws kSchemaError on a bad header or malformed row.
std::vector<SummaryRow> read_summary_csv(std::istream& is);

std::string format_magnitude(double magnitude);

}  // namespace hbench
