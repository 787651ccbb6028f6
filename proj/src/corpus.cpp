#include "ademiner/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ademiner/error.hpp"
#include "ademiner/unicode.hpp"

namespace ade::corpus {

namespace {

const std::vector<std::string> kBinaryLabels = {"ADE", "NoADE"};
const std::vector<std::string> kTernaryLabels = {"LitNews", "NonPersonal", "SelfReport"};
const std::string kBinaryName = "binary-ADE";
const std::string kTernaryName = "ternary-COVID";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(pos));
      return fields;
    }
    fields.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line_no, const std::string& what) {
  fail(path + ":" + std::to_string(line_no) + ": " + what);
}

std::size_t parse_index(const std::string& s, const std::string& path, std::size_t line_no,
                        const char* what) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail_at(path, line_no, std::string("unparsable ") + what + " '" + s + "'");
  return value;
}

// Reads LF-terminated lines; a trailing newline does not produce an empty row.
std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void check_utf8(const std::string& text, const std::string& path, std::size_t line_no) {
  bool ok = false;
  uni::decode_utf8(text, ok);
  if (!ok) fail_at(path, line_no, "invalid UTF-8 in text");
}

LabeledDataset load_rows(const std::string& path, std::optional<Scheme> scheme, bool header,
                         bool require_label) {
  LabeledDataset ds;
  ds.scheme = scheme.value_or(Scheme::BinaryAde);
  std::unordered_set<std::string> seen_ids;
  auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    if (header && i == 0) continue;
    const std::string& line = lines[i];
    if (line.empty()) fail_at(path, line_no, "empty row");
    auto fields = split_tabs(line);
    bool labeled = fields.size() == 3;
    if (require_label && !labeled)
      fail_at(path, line_no,
              "malformed row: expected 3 tab-separated columns, got " +
                  std::to_string(fields.size()));
    if (!labeled && fields.size() != 2)
      fail_at(path, line_no,
              "malformed row: expected 2 or 3 tab-separated columns, got " +
                  std::to_string(fields.size()));
    if (fields[0].empty()) fail_at(path, line_no, "empty tweet id");
    if (fields[1].empty()) fail_at(path, line_no, "empty tweet text");
    check_utf8(fields[1], path, line_no);
    if (!seen_ids.insert(fields[0]).second)
      fail_at(path, line_no, "duplicate tweet id '" + fields[0] + "'");
    ds.tweets.push_back({fields[0], fields[1]});
    int label = -1;
    if (labeled) {
      if (!scheme)
        fail_at(path, line_no, "row carries a label but no label scheme was given");
      const auto& names = scheme_labels(*scheme);
      auto it = std::find(names.begin(), names.end(), fields[2]);
      if (it == names.end())
        fail_at(path, line_no,
                "unknown label '" + fields[2] + "' for scheme " + scheme_name(*scheme));
      label = static_cast<int>(it - names.begin());
      ds.has_labels = true;
    }
    ds.labels.push_back(label);
  }
  if (ds.has_labels) {
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      if (ds.labels[i] < 0)
        fail(path + ": row " + std::to_string(i + 1) + " (id '" + ds.tweets[i].id +
             "') is missing a label while other rows are labeled");
  }
  return ds;
}

}  // namespace

const std::vector<std::string>& scheme_labels(Scheme scheme) {
  return scheme == Scheme::BinaryAde ? kBinaryLabels : kTernaryLabels;
}

const std::string& scheme_name(Scheme scheme) {
  return scheme == Scheme::BinaryAde ? kBinaryName : kTernaryName;
}

Scheme scheme_from_name(const std::string& name) {
  if (name == kBinaryName) return Scheme::BinaryAde;
  if (name == kTernaryName) return Scheme::TernaryCovid;
  fail("unknown label scheme '" + name + "' (expected " + kBinaryName + " or " + kTernaryName +
       ")");
}

int label_index(Scheme scheme, const std::string& value) {
  const auto& names = scheme_labels(scheme);
  auto it = std::find(names.begin(), names.end(), value);
  if (it == names.end())
    fail("unknown label '" + value + "' for scheme " + scheme_name(scheme));
  return static_cast<int>(it - names.begin());
}

const Tweet* LabeledDataset::find(const std::string& id) const {
  for (const auto& t : tweets)
    if (t.id == id) return &t;
  return nullptr;
}

std::optional<int> LabeledDataset::label_of(const std::string& id) const {
  for (std::size_t i = 0; i < tweets.size(); ++i)
    if (tweets[i].id == id && labels[i] >= 0) return labels[i];
  return std::nullopt;
}

std::vector<const SpanAnnotation*> LabeledDataset::spans_of(const std::string& id) const {
  std::vector<const SpanAnnotation*> out;
  for (const auto& s : spans)
    if (s.tweet_id == id) out.push_back(&s);
  return out;
}

std::map<std::string, int> LabeledDataset::label_map() const {
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < tweets.size(); ++i)
    if (labels[i] >= 0) out[tweets[i].id] = labels[i];
  return out;
}

LabeledDataset load_classification_dataset(const std::string& path, Scheme scheme, bool header) {
  return load_rows(path, scheme, header, /*require_label=*/true);
}

LabeledDataset load_tweets(const std::string& path, std::optional<Scheme> scheme, bool header) {
  return load_rows(path, scheme, header, /*require_label=*/false);
}

void attach_spans(LabeledDataset& dataset, std::vector<SpanAnnotation> spans) {
  std::unordered_map<std::string, const Tweet*> by_id;
  for (const auto& t : dataset.tweets) by_id[t.id] = &t;
  for (const auto& s : spans) {
    auto it = by_id.find(s.tweet_id);
    if (it == by_id.end()) fail("span references unknown tweet id '" + s.tweet_id + "'");
    auto scalars = uni::decode_utf8(it->second->text);
    if (s.start >= s.end || s.end > scalars.size())
      fail("span (" + std::to_string(s.start) + "," + std::to_string(s.end) +
           ") out of bounds for tweet '" + s.tweet_id + "' of length " +
           std::to_string(scalars.size()));
    std::string actual = uni::substr_scalars(it->second->text, s.start, s.end);
    if (actual != s.surface)
      fail("span surface mismatch for tweet '" + s.tweet_id + "': file says '" + s.surface +
           "', text has '" + actual + "'");
  }
  dataset.spans = std::move(spans);
}

LabeledDataset load_span_dataset(const std::string& tweets_path, const std::string& spans_path,
                                 std::optional<Scheme> scheme, bool header) {
  LabeledDataset ds = load_rows(tweets_path, scheme, header, /*require_label=*/false);
  std::vector<SpanAnnotation> spans;
  auto lines = read_lines(spans_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::size_t line_no = i + 1;
    if (header && i == 0) continue;
    if (lines[i].empty()) fail_at(spans_path, line_no, "empty row");
    auto fields = split_tabs(lines[i]);
    if (fields.size() != 4)
      fail_at(spans_path, line_no,
              "malformed row: expected 4 tab-separated columns, got " +
                  std::to_string(fields.size()));
    check_utf8(fields[3], spans_path, line_no);
    SpanAnnotation s;
    s.tweet_id = fields[0];
    s.start = parse_index(fields[1], spans_path, line_no, "start offset");
    s.end = parse_index(fields[2], spans_path, line_no, "end offset");
    s.surface = fields[3];
    spans.push_back(std::move(s));
  }
  attach_spans(ds, std::move(spans));
  return ds;
}

void save_classification_dataset(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  const auto& names = scheme_labels(dataset.scheme);
  for (std::size_t i = 0; i < dataset.tweets.size(); ++i) {
    out << dataset.tweets[i].id << '\t' << dataset.tweets[i].text;
    if (dataset.labels[i] >= 0) out << '\t' << names[dataset.labels[i]];
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

void save_spans(const std::vector<SpanAnnotation>& spans, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  for (const auto& s : spans)
    out << s.tweet_id << '\t' << s.start << '\t' << s.end << '\t' << s.surface << '\n';
  if (!out) fail("write failed: " + path);
}

DatasetSummary summarize(const LabeledDataset& dataset) {
  DatasetSummary summary;
  const auto& names = scheme_labels(dataset.scheme);
  if (dataset.has_labels)
    for (const auto& name : names) summary.per_class[name] = 0;
  for (std::size_t i = 0; i < dataset.tweets.size(); ++i)
    if (dataset.labels[i] >= 0) summary.per_class[names[dataset.labels[i]]] += 1;
  summary.total = dataset.tweets.size();
  summary.span_count = dataset.spans.size();
  std::unordered_set<std::string> with_spans;
  for (const auto& s : dataset.spans) with_spans.insert(s.tweet_id);
  summary.tweets_with_spans = with_spans.size();
  return summary;
}

std::string summary_to_json(const DatasetSummary& summary, bool has_spans) {
  // std::map iteration gives the key-sorted order; class names contain no
  // characters needing JSON escapes.
  std::map<std::string, std::size_t> obj(summary.per_class.begin(), summary.per_class.end());
  obj["total"] = summary.total;
  if (has_spans) {
    obj["span_count"] = summary.span_count;
    obj["tweets_with_spans"] = summary.tweets_with_spans;
  }
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (const auto& [key, value] : obj) {
    if (!first) out << ",";
    out << "\"" << key << "\":" << value;
    first = false;
  }
  out << "}";
  return out.str();
}

CleanResult clean_overlapping_spans(const LabeledDataset& dataset) {
  CleanResult result;
  result.cleaned = dataset;
  result.cleaned.spans.clear();

  // Group span indices per tweet, preserving file order within groups.
  std::unordered_map<std::string, std::vector<std::size_t>> by_tweet;
  for (std::size_t i = 0; i < dataset.spans.size(); ++i)
    by_tweet[dataset.spans[i].tweet_id].push_back(i);

  std::vector<bool> keep(dataset.spans.size(), false);
  for (auto& [id, indices] : by_tweet) {
    // Priority: longest first, then smaller start, then lexicographic surface.
    std::vector<std::size_t> order = indices;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& sa = dataset.spans[a];
      const auto& sb = dataset.spans[b];
      std::size_t la = sa.end - sa.start;
      std::size_t lb = sb.end - sb.start;
      if (la != lb) return la > lb;
      if (sa.start != sb.start) return sa.start < sb.start;
      return sa.surface < sb.surface;
    });
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
      bool clashes = false;
      for (std::size_t k : kept)
        if (spans_overlap(dataset.spans[idx], dataset.spans[k])) {
          clashes = true;
          break;
        }
      if (!clashes) {
        kept.push_back(idx);
        keep[idx] = true;
      }
    }
  }
  for (std::size_t i = 0; i < dataset.spans.size(); ++i) {
    if (keep[i])
      result.cleaned.spans.push_back(dataset.spans[i]);
    else
      result.removed.push_back(dataset.spans[i]);
  }
  return result;
}

}  // namespace ade::corpus
