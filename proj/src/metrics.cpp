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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "hbench/error.hpp"

namespace hbench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kUndefined = "undefined";

void require_nonempty(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "no ACE records");
}

std::vector<double> ranked(std::span<const AceValue> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& a : values) v.push_back(a ? *a : kInf);
  std::sort(v.begin(), v.end());
  return v;
}

std::string format_double(double x, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  if (s == "NAN" || s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kSchemaError, std::string("bad ") + what + " value '" + s + "'");
  }
}

}  // namespace

double ace(const Homography& h_target, const Homography& h_output, const PatchCorners& corners) {
  double sum = 0.0;
  for (const auto& c : corners.c) {
    const Point2 a = apply_homography(h_target, c);
    const Point2 b = apply_homography(h_output, c);
    sum += std::hypot(a.u - b.u, a.v - b.v);
  }
  return sum / 4.0;
}

AceValue try_ace(const Homography& h_target, const Homography& h_output,
                 const PatchCorners& corners) {
  try {
    const double v = ace(h_target, h_output, corners);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kProjectiveDivergence) return std::nullopt;
    throw;
  }
}

double median_ace(std::span<const AceValue> values) {
  require_nonempty(values.size());
  const auto v = ranked(values);
  const std::size_t n = v.size();
  const double m = n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return std::isinf(m) ? std::numeric_limits<double>::quiet_NaN() : m;
}

double outlier_ratio(std::span<const AceValue> values, double threshold) {
  require_nonempty(values.size());
  std::size_t outliers = 0;
  for (const auto& a : values) outliers += !a || *a > threshold;
  return static_cast<double>(outliers) / static_cast<double>(values.size());
}

std::vector<CurvePoint> sorted_curve(std::span<const AceValue> values) {
  require_nonempty(values.size());
  const auto v = ranked(values);
  std::vector<CurvePoint> out;
  out.reserve(v.size());
  const double denom = v.size() > 1 ? static_cast<double>(v.size() - 1) : 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    CurvePoint p;
    p.percentile = v.size() > 1 ? static_cast<double>(i) / denom : 0.0;
    if (!std::isinf(v[i])) p.ace = v[i];
    out.push_back(p);
  }
  return out;
}

std::vector<AceValue> ace_values(std::span<const AceRecord> records) {
  std::vector<AceValue> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.ace);
  return out;
}

namespace {

using GroupKey = std::tuple<std::string, int, double>;

std::map<GroupKey, std::vector<AceValue>> group(std::span<const AceRecord> records) {
  std::map<GroupKey, std::vector<AceValue>> groups;
  for (const auto& r : records) {
    groups[{r.method, static_cast<int>(r.corruption.kind), r.corruption.magnitude}].push_back(
        r.ace);
  }
  return groups;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const AceRecord> records) {
  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : group(records)) {
    SummaryRow row;
    row.method = std::get<0>(key);
    row.kind = static_cast<CorruptionKind>(std::get<1>(key));
    row.magnitude = std::get<2>(key);
    row.median_ace = median_ace(values);
    row.outlier_ratio = outlier_ratio(values);
    row.n = values.size();
    rows.push_back(row);
  }
  return rows;
}

std::string format_magnitude(double magnitude) { return format_double(magnitude, "%g"); }

void write_records_csv(std::ostream& os, std::span<const AceRecord> records) {
  os << "sample_id,method,corruption_kind,magnitude,ace\n";
  for (const auto& r : records) {
    os << r.sample_id << ',' << r.method << ',' << corruption_kind_name(r.corruption.kind) << ','
       << format_magnitude(r.corruption.magnitude) << ','
       << (r.ace ? format_double(*r.ace, "%.6f") : kUndefined) << '\n';
  }
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
  os << "method,corruption_kind,magnitude,median_ace,outlier_ratio,n\n";
  for (const auto& r : rows) {
    os << r.method << ',' << corruption_kind_name(r.kind) << ',' << format_magnitude(r.magnitude)
       << ',' << (std::isnan(r.median_ace) ? "NAN" : format_double(r.median_ace, "%.6f")) << ','
       << format_double(r.outlier_ratio, "%.6f") << ',' << r.n << '\n';
  }
}

void write_curves_csv(std::ostream& os, std::span<const AceRecord> records) {
  os << "method,corruption_kind,magnitude,percentile,ace\n";
  for (const auto& [key, values] : group(records)) {
    for (const auto& p : sorted_curve(values)) {
      os << std::get<0>(key) << ','
         << corruption_kind_name(static_cast<CorruptionKind>(std::get<1>(key))) << ','
         << format_magnitude(std::get<2>(key)) << ',' << format_double(p.percentile, "%.6f") << ','
         << (p.ace ? format_double(*p.ace, "%.6f") : kUndefined) << '\n';
    }
  }
}

std::vector<AceRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      split_csv_line(line) !=
          std::vector<std::string>{"sample_id", "method", "corruption_kind", "magnitude", "ace"}) {
    throw Error(ErrorCode::kSchemaError, "unexpected records CSV header");
  }
  std::vector<AceRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw Error(ErrorCode::kSchemaError, "records row needs 5 fields");
    AceRecord r;
    r.sample_id = f[0];
    r.method = f[1];
    try {
      r.corruption.kind = parse_corruption_kind(f[2]);
    } catch (const Error&) {
      throw Error(ErrorCode::kSchemaError, "unknown corruption kind '" + f[2] + "'");
    }
    r.corruption.magnitude = parse_double(f[3], "magnitude");
    if (f[4] != kUndefined) r.ace = parse_double(f[4], "ace");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) ||
      split_csv_line(line) != std::vector<std::string>{"method", "corruption_kind", "magnitude",
                                                       "median_ace", "outlier_ratio", "n"}) {
    throw Error(ErrorCode::kSchemaError, "unexpected summary CSV header");
  }
  std::vector<SummaryRow> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw Error(ErrorCode::kSchemaError, "summary row needs 6 fields");
    SummaryRow r;
    r.method = f[0];
    try {
      r.kind = parse_corruption_kind(f[1]);
    } catch (const Error&) {
      throw Error(ErrorCode::kSchemaError, "unknown corruption kind '" + f[1] + "'");
    }
    r.magnitude = parse_double(f[2], "magnitude");
    r.median_ace = parse_double(f[3], "median_ace");
    r.outlier_ratio = parse_double(f[4], "outlier_ratio");
    const double n = parse_double(f[5], "n");
    if (!(r.outlier_ratio >= 0.0 && r.outlier_ratio <= 1.0) || !(n >= 0) || n != std::floor(n)) {
      throw Error(ErrorCode::kSchemaError, "summary row out of range");
    }
    r.n = static_cast<std::size_t>(n);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace hbench
