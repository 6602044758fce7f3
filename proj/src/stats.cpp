// Copyright 2026 The TC-HGR Authors
// SPDX-License-Identifier: Apache-2.0

#include "tchgr/stats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tchgr/error.hpp"
#include "tchgr/training.hpp"

namespace tchgr {

std::vector<int> predict_classes(const Tensor& logits) {
  const std::size_t classes = logits.size(logits.dim() - 1);
  const std::size_t rows = logits.numel() / classes;
  std::vector<int> out(rows);
  const auto z = logits.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = z.data() + r * classes;
    // max_element returns the first maximum.
    out[r] = static_cast<int>(std::max_element(row, row + classes) - row);
  }
  return out;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw UsageError("accuracy of an empty set");
  if (predictions.size() != labels.size()) {
    throw DimensionError("accuracy: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(labels.size()) +
                         " labels");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predictions[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double accuracy(const Tensor& logits, std::span<const int> labels) {
  const auto predicted = predict_classes(logits);
  return accuracy(predicted, labels);
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

EvalReport aggregate(const std::map<int, double>& per_subject, std::string model_id) {
  if (per_subject.empty()) throw UsageError("aggregate needs at least one subject");
  EvalReport report;
  report.model_id = std::move(model_id);
  report.per_subject_accuracy = per_subject;

  std::vector<double> values;
  for (const auto& [subject, acc] : per_subject) values.push_back(acc);
  const double n = static_cast<double>(values.size());
  report.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - report.mean) * (v - report.mean);
    report.std = std::sqrt(ss / (n - 1.0));
  }
  report.median = quantile(values, 0.5);
  report.q1 = quantile(values, 0.25);
  report.q3 = quantile(values, 0.75);
  return report;
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank

std::string to_string(WilcoxonMethod method) {
  switch (method) {
    case WilcoxonMethod::exact: return "exact";
    case WilcoxonMethod::normal_approximation: return "normal-approximation";
    case WilcoxonMethod::degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

// Two-sided exact p. Ranks are doubled so tie-averaged ranks stay integral;
// counts[s] is the number of sign assignments whose doubled W+ equals s.
double exact_p(std::span<const std::uint64_t> doubled_ranks, double w_min) {
  std::uint64_t total = 0;
  for (auto r : doubled_ranks) total += r;
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::uint64_t reach = 0;
  for (auto r : doubled_ranks) {
    reach += r;
    for (std::uint64_t s = reach; s >= r; --s) {
      counts[s] += counts[s - r];
      if (s == r) break;
    }
  }
  const auto threshold = static_cast<std::uint64_t>(std::llround(2.0 * w_min));
  double tail = 0.0;
  for (std::uint64_t s = 0; s <= threshold && s <= total; ++s) tail += counts[s];
  const double p = 2.0 * tail / std::ldexp(1.0, static_cast<int>(doubled_ranks.size()));
  return std::min(1.0, p);
}

double normal_p(std::size_t n, double w_min, double tie_term) {
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  const double z = std::min(0.0, (w_min - mean + 0.5) / std::sqrt(var));
  return std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
}

}  // namespace

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a,
                                    std::span<const double> b, WilcoxonMode mode) {
  if (a.size() != b.size()) {
    throw DimensionError("wilcoxon: paired samples differ in length (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw UsageError("wilcoxon: need at least one pair");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw RangeError("wilcoxon: non-finite difference at index " + std::to_string(i));
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult result;
  result.n_effective = diffs.size();
  if (diffs.empty()) return result;

  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });

  std::vector<std::uint64_t> doubled(n);
  double tie_term = 0.0;
  for (std::size_t start = 0; start < n;) {
    std::size_t stop = start + 1;
    while (stop < n && std::abs(diffs[order[stop]]) == std::abs(diffs[order[start]])) ++stop;
    // Average of ranks start+1..stop, doubled.
    const std::uint64_t rank2 = static_cast<std::uint64_t>(start + 1 + stop);
    for (std::size_t i = start; i < stop; ++i) doubled[order[i]] = rank2;
    const double t = static_cast<double>(stop - start);
    tie_term += t * t * t - t;
    start = stop;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double rank = static_cast<double>(doubled[i]) / 2.0;
    (diffs[i] > 0 ? result.w_plus : result.w_minus) += rank;
  }
  result.statistic = std::min(result.w_plus, result.w_minus);

  const bool use_exact = mode == WilcoxonMode::exact ||
                         (mode == WilcoxonMode::automatic && n <= kWilcoxonExactLimit);
  if (use_exact) {
    if (n > 62) throw UsageError("wilcoxon: exact enumeration limited to 62 pairs");
    result.method = WilcoxonMethod::exact;
    result.p_value = exact_p(doubled, result.statistic);
  } else {
    result.method = WilcoxonMethod::normal_approximation;
    result.p_value = normal_p(n, result.statistic, tie_term);
  }
  return result;
}

std::string significance_band(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw RangeError("p-value " + std::to_string(p) + " outside [0, 1]");
  }
  if (p <= 0.0001) return "****";
  if (p <= 0.001) return "***";
  if (p <= 0.01) return "**";
  if (p <= 0.05) return "*";
  return "ns";
}

std::vector<Comparison> compare_to_baseline(std::span<const EvalReport> reports) {
  if (reports.size() < 2) throw UsageError("comparison needs at least two reports");
  const EvalReport& base = reports.front();
  std::vector<Comparison> out;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const EvalReport& other = reports[i];
    std::vector<int> offenders;
    for (const auto& [subject, acc] : base.per_subject_accuracy) {
      if (!other.per_subject_accuracy.count(subject)) offenders.push_back(subject);
    }
    for (const auto& [subject, acc] : other.per_subject_accuracy) {
      if (!base.per_subject_accuracy.count(subject)) offenders.push_back(subject);
    }
    if (!offenders.empty()) {
      std::sort(offenders.begin(), offenders.end());
      std::ostringstream msg;
      msg << "subject sets of '" << base.model_id << "' and '" << other.model_id
          << "' differ; offending subjects:";
      for (int s : offenders) msg << ' ' << s;
      throw DataError(msg.str());
    }
    std::vector<double> a, b;
    for (const auto& [subject, acc] : base.per_subject_accuracy) {
      a.push_back(acc);
      b.push_back(other.per_subject_accuracy.at(subject));
    }
    Comparison c{base.model_id, other.model_id, wilcoxon_signed_rank(a, b), ""};
    c.band = significance_band(c.result.p_value);
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError(path.string() + ":" + std::to_string(line) +
                      ": cannot parse '" + text + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw FormatError(path.string() + ": expected header '" + header + "'");
  }
  const std::size_t columns = split_row(header).size();
  std::vector<std::vector<std::string>> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != columns) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": expected " +
                        std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

void check_model_id(const std::string& id) {
  if (id.empty() || id.find_first_of("/\\,\n") != std::string::npos) {
    throw UsageError("model id '" + id + "' must be non-empty without '/', '\\' or ','");
  }
}

}  // namespace

std::filesystem::path per_subject_csv_path(const std::filesystem::path& dir,
                                           const std::string& model_id) {
  check_model_id(model_id);
  return dir / ("per_subject_" + model_id + ".csv");
}

void write_comparisons_csv(const std::filesystem::path& path,
                           std::span<const Comparison> comparisons) {
  auto out = open_csv(path);
  out << "model_a,model_b,W,p,band\n";
  for (const Comparison& c : comparisons) {
    out << c.model_a << ',' << c.model_b << ',' << format_double(c.result.statistic)
        << ',' << format_double(c.result.p_value) << ',' << c.band << '\n';
  }
  check_written(out, path);
}

EmittedFiles emit_report(std::span<const EvalReport> reports,
                         std::span<const Comparison> comparisons,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  EmittedFiles files;
  for (const EvalReport& r : reports) {
    const auto path = per_subject_csv_path(dir, r.model_id);
    auto out = open_csv(path);
    out << "subject,accuracy\n";
    for (const auto& [subject, acc] : r.per_subject_accuracy) {
      out << subject << ',' << format_double(acc) << '\n';
    }
    check_written(out, path);
    files.per_subject.push_back(path);
  }

  files.summary = dir / "summary.csv";
  {
    auto out = open_csv(files.summary);
    out << "model_id,mean,std,median,q1,q3\n";
    for (const EvalReport& r : reports) {
      out << r.model_id << ',' << format_double(r.mean) << ',' << format_double(r.std)
          << ',' << format_double(r.median) << ',' << format_double(r.q1) << ','
          << format_double(r.q3) << '\n';
    }
    check_written(out, files.summary);
  }

  if (!comparisons.empty()) {
    files.comparisons = dir / "comparisons.csv";
    write_comparisons_csv(*files.comparisons, comparisons);
  }
  return files;
}

std::map<int, double> read_per_subject_csv(const std::filesystem::path& path) {
  std::map<int, double> out;
  std::size_t line = 1;
  for (const auto& row : read_csv(path, "subject,accuracy")) {
    ++line;
    const int subject = parse_number<int>(row[0], path, line);
    const double acc = parse_number<double>(row[1], path, line);
    if (!out.emplace(subject, acc).second) {
      throw DataError(path.string() + ": duplicate subject " + std::to_string(subject));
    }
  }
  return out;
}

std::vector<EvalReport> read_summary_csv(const std::filesystem::path& path) {
  std::vector<EvalReport> out;
  std::size_t line = 1;
  for (const auto& row : read_csv(path, "model_id,mean,std,median,q1,q3")) {
    ++line;
    EvalReport r;
    r.model_id = row[0];
    r.mean = parse_number<double>(row[1], path, line);
    r.std = parse_number<double>(row[2], path, line);
    r.median = parse_number<double>(row[3], path, line);
    r.q1 = parse_number<double>(row[4], path, line);
    r.q3 = parse_number<double>(row[5], path, line);
    out.push_back(std::move(r));
  }
  return out;
}

EvalReport load_report(const std::filesystem::path& dir, const std::string& model_id) {
  EvalReport report =
      aggregate(read_per_subject_csv(per_subject_csv_path(dir, model_id)), model_id);
  for (const EvalReport& row : read_summary_csv(dir / "summary.csv")) {
    if (row.model_id != model_id) continue;
    if (row.mean != report.mean || row.std != report.std || row.median != report.median ||
        row.q1 != report.q1 || row.q3 != report.q3) {
      throw DataError("summary.csv row for '" + model_id +
                      "' disagrees with its per-subject accuracies");
    }
    return report;
  }
  throw DataError("summary.csv has no row for model '" + model_id + "'");
}

}  // namespace tchgr
