#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ademiner/corpus.hpp"

namespace ade::eval {

struct ConfusionCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  std::optional<long long> tn;  // classification only
  bool operator==(const ConfusionCounts&) const = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool operator==(const ClassMetrics&) const = default;
};

// tp/(tp+fp), by convention 0 when the denominator vanishes.
double precision(const ConfusionCounts& c);
// tp/(tp+fn), same convention.
double recall(const ConfusionCounts& c);
// Harmonic mean, 0 when p + r = 0.
double f1(double p, double r);

ClassMetrics metrics_from_counts(const ConfusionCounts& c);

// Half-up rounding at `decimals` places, for display only.
double round_display(double value, int decimals);

enum class SpanMatchMode { Strict, Relaxed };
SpanMatchMode span_mode_from_name(const std::string& name);
const std::string& span_mode_name(SpanMatchMode mode);

struct ClassReport {
  ConfusionCounts counts;
  ClassMetrics metrics;
  bool operator==(const ClassReport&) const = default;
};

struct MetricsReport {
  // "classification" or "spans"; carried through aggregation for shape checks.
  std::string task;
  std::map<std::string, ClassReport> per_class;
  std::optional<std::string> focus_class;   // headline row, e.g. ADE for 1a
  std::optional<ClassReport> micro;          // span tasks
  bool aggregated = false;                   // true => counts are absent
};

// Per-class one-vs-rest scoring. Gold and pred must cover identical id sets.
MetricsReport score_classification(const std::map<std::string, int>& gold,
                                   const std::map<std::string, int>& pred,
                                   corpus::Scheme scheme);

// Greedy one-to-one span matching per tweet: predictions sorted by
// (start, end), deduplicated, each matched to the first unmatched gold span
// with identical boundaries (Strict) or at least one shared character
// position (Relaxed). Micro-aggregated over tweets.
MetricsReport score_spans(const std::vector<corpus::SpanAnnotation>& gold,
                          const std::vector<corpus::SpanAnnotation>& pred, SpanMatchMode mode);

// Element-wise median of stored metrics (never recomputed from counts);
// even-count medians average the two middle values.
MetricsReport median_aggregate(const std::vector<MetricsReport>& reports);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& json_text);
// Aligned text table (display precision: 4 decimals P/R, 2 decimals F1).
std::string report_to_table(const MetricsReport& report);

}  // namespace ade::eval
