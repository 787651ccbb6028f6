#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace ade::corpus {

// Label schemes for the two classification tasks.
enum class Scheme { BinaryAde, TernaryCovid };

const std::vector<std::string>& scheme_labels(Scheme scheme);
const std::string& scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

// Label value -> index within the scheme's label list; throws on unknown.
int label_index(Scheme scheme, const std::string& value);

struct Tweet {
  std::string id;
  std::string text;
  bool operator==(const Tweet&) const = default;
};

// Character indices count Unicode scalar values; end is exclusive.
struct SpanAnnotation {
  std::string tweet_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;
  bool operator==(const SpanAnnotation&) const = default;
};

inline bool spans_overlap(const SpanAnnotation& a, const SpanAnnotation& b) {
  return a.start < b.end && b.start < a.end;
}

struct LabeledDataset {
  Scheme scheme = Scheme::BinaryAde;
  bool has_labels = false;
  std::vector<Tweet> tweets;       // row order of the source file
  std::vector<int> labels;        // parallel to tweets; -1 when unlabeled
  std::vector<SpanAnnotation> spans;  // row order of the span file

  bool operator==(const LabeledDataset&) const = default;

  std::size_t size() const { return tweets.size(); }
  const Tweet* find(const std::string& id) const;
  std::optional<int> label_of(const std::string& id) const;
  std::vector<const SpanAnnotation*> spans_of(const std::string& id) const;
  // id -> label map view (for scoring).
  std::map<std::string, int> label_map() const;
};

struct DatasetSummary {
  std::map<std::string, std::size_t> per_class;  // every scheme class, zeros included
  std::size_t total = 0;
  std::size_t span_count = 0;
  std::size_t tweets_with_spans = 0;
};

// Classification TSV: tweet_id<TAB>text<TAB>label (or two columns when
// unlabeled). UTF-8, LF line endings. header=true skips the first line.
LabeledDataset load_classification_dataset(const std::string& path, Scheme scheme,
                                           bool header = false);

// Two-column tweet_id<TAB>text file (three-column files also accepted; the
// label column is parsed under `scheme`).
LabeledDataset load_tweets(const std::string& path, std::optional<Scheme> scheme,
                           bool header = false);

// Span TSV: tweet_id<TAB>start<TAB>end<TAB>surface. Spans are validated
// against the tweet text (bounds in scalar values, exact surface match).
LabeledDataset load_span_dataset(const std::string& tweets_path, const std::string& spans_path,
                                 std::optional<Scheme> scheme = std::nullopt,
                                 bool header = false);

// Attach externally produced spans to an already loaded dataset, with the
// same validation as load_span_dataset.
void attach_spans(LabeledDataset& dataset, std::vector<SpanAnnotation> spans);

void save_classification_dataset(const LabeledDataset& dataset, const std::string& path);
void save_spans(const std::vector<SpanAnnotation>& spans, const std::string& path);

DatasetSummary summarize(const LabeledDataset& dataset);

// Key-sorted JSON object (per-class counts, total, span fields when present).
std::string summary_to_json(const DatasetSummary& summary, bool has_spans);

struct CleanResult {
  LabeledDataset cleaned;
  std::vector<SpanAnnotation> removed;
};

// Within each tweet drops duplicates and resolves overlaps, keeping the
// longest span of an overlapping group (ties: smaller start, then
// lexicographically smaller surface). Removed spans are returned for audit.
CleanResult clean_overlapping_spans(const LabeledDataset& dataset);

}  // namespace ade::corpus
