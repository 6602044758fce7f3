// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

// Accuracy, cross-subject summaries and paired Wilcoxon signed-rank tests.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tchgr/tensor.hpp"

namespace tchgr {

// Row-wise argmax of [B×classes] (or [classes]) logits; ties go to the lowest
// class index.
std::vector<int> predict_classes(const Tensor& logits);

// Fraction of predictions equal to labels; UsageError on empty input,
// DimensionError on a length mismatch.
double accuracy(std::span<const int> predictions, std::span<const int> labels);
double accuracy(const Tensor& logits, std::span<const int> labels);

// Linear-interpolation quantile (numpy's default) of unsorted values.
double quantile(std::span<const double> values, double q);

struct EvalReport {
  std::string model_id;
  std::map<int, double> per_subject_accuracy;
  double mean = 0.0;
  double std = 0.0;  // sample STD (n − 1); 0 for one subject
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;

  double iqr() const { return q3 - q1; }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// UsageError when there are no subjects.
EvalReport aggregate(const std::map<int, double>& per_subject,
                     std::string model_id = "model");

enum class WilcoxonMethod { exact, normal_approximation, degenerate };

// automatic picks exact enumeration up to 20 non-zero pairs.
enum class WilcoxonMode { automatic, exact, normal };

inline constexpr std::size_t kWilcoxonExactLimit = 20;

struct WilcoxonResult {
  double statistic = 0.0;  // W = min(W+, W−)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;  // two-sided
  std::size_t n_effective = 0;
  WilcoxonMethod method = WilcoxonMethod::degenerate;
};

std::string to_string(WilcoxonMethod method);

// Paired two-sided test on d = a − b. Zero differences are dropped, tied
// |d| share their average rank. Exact p comes from the full null
// distribution of W+ over all 2^n sign assignments; the normal route uses tie
// and continuity corrections. All-zero differences give p = 1, method
// degenerate.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b,
                                    WilcoxonMode mode = WilcoxonMode::automatic);

// "ns", "*", "**", "***" or "****" with inclusive upper bounds 0.05, 0.01,
// 0.001 and 0.0001. RangeError outside [0, 1].
std::string significance_band(double p);

struct Comparison {
  std::string model_a;
  std::string model_b;
  WilcoxonResult result;
  std::string band;
};

// First report is the baseline; each other report is tested against it.
// Subject sets must be identical, otherwise DataError lists the offenders.
std::vector<Comparison> compare_to_baseline(std::span<const EvalReport> reports);

struct EmittedFiles {
  std::vector<std::filesystem::path> per_subject;
  std::filesystem::path summary;
  std::optional<std::filesystem::path> comparisons;
};

// Writes per_subject_<model_id>.csv (subject,accuracy) for every report,
// summary.csv (model_id,mean,std,median,q1,q3) and, when comparisons is
// non-empty, comparisons.csv (model_a,model_b,W,p,band).
EmittedFiles emit_report(std::span<const EvalReport> reports,
                         std::span<const Comparison> comparisons,
                         const std::filesystem::path& dir);

void write_comparisons_csv(const std::filesystem::path& path,
                           std::span<const Comparison> comparisons);

std::filesystem::path per_subject_csv_path(const std::filesystem::path& dir,
                                           const std::string& model_id);

std::map<int, double> read_per_subject_csv(const std::filesystem::path& path);
std::vector<EvalReport> read_summary_csv(const std::filesystem::path& path);

// Rebuilds a report from its per-subject CSV and cross-checks summary.csv.
EvalReport load_report(const std::filesystem::path& dir, const std::string& model_id);

}  // namespace tchgr
