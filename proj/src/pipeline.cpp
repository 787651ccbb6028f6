#include "ademiner/pipeline.hpp"

#include <atomic>
#include <thread>

#include "ademiner/error.hpp"
#include "ademiner/unicode.hpp"

namespace ade::pipeline {

namespace {

constexpr int kAdeLabel = 0;  // binary-ADE scheme order: ADE, NoADE

}  // namespace

AdeExtraction extract_ades(const corpus::Tweet& tweet, const models::Classifier& classifier,
                           const models::Tagger& tagger,
                           const std::optional<norm::NormalizationConfig>& preprocess,
                           const norm::EmojiTable* emoji_table) {
  if (classifier.scheme() != corpus::Scheme::BinaryAde)
    fail("the extraction pipeline requires a binary-ADE classifier");

  corpus::Tweet working = tweet;
  norm::OffsetMap map;
  bool normalized = false;
  if (preprocess) {
    auto result = norm::normalize_tweet(tweet, *preprocess, emoji_table);
    working.text = result.text;
    map = std::move(result.offset_map);
    normalized = true;
  }

  AdeExtraction out;
  out.tweet_id = tweet.id;
  models::Prediction pred;
  try {
    pred = classifier.predict(working);
  } catch (const std::exception& e) {
    fail(std::string("classifier failed on tweet '") + tweet.id + "': " + e.what());
  }
  out.label = pred.label;
  out.scores = std::move(pred.scores);
  if (out.label != kAdeLabel) return out;

  std::vector<corpus::SpanAnnotation> raw;
  try {
    raw = tagger.extract(working);
  } catch (const std::exception& e) {
    fail(std::string("tagger failed on tweet '") + tweet.id + "': " + e.what());
  }

  if (!normalized) {
    for (auto& s : raw) {
      s.tweet_id = tweet.id;
      out.spans.push_back(std::move(s));
    }
    return out;
  }

  // Tagger spans live on the normalized text; map them back to the original.
  norm::OffsetMap back = map.inverted();
  for (const auto& s : raw) {
    auto projection = norm::project_span(back, s);
    if (!projection.span) {
      ++out.spans_dropped;
      continue;
    }
    corpus::SpanAnnotation span = *projection.span;
    span.tweet_id = tweet.id;
    span.surface = uni::substr_scalars(tweet.text, span.start, span.end);
    out.spans.push_back(std::move(span));
  }
  return out;
}

std::pair<std::vector<AdeExtraction>, RunReport> run_batch(
    const corpus::LabeledDataset& dataset, const models::Classifier& classifier,
    const models::Tagger& tagger, const std::optional<norm::NormalizationConfig>& preprocess,
    bool strict, int jobs, const norm::EmojiTable* emoji_table) {
  if (jobs < 1) fail("jobs must be >= 1");
  const std::size_t n = dataset.size();
  std::vector<std::optional<AdeExtraction>> slots(n);
  std::vector<std::string> slot_errors(n);

  auto work = [&](std::size_t i) {
    try {
      slots[i] = extract_ades(dataset.tweets[i], classifier, tagger, preprocess, emoji_table);
    } catch (const std::exception& e) {
      slot_errors[i] = e.what();
    }
  };

  if (jobs == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) {
      work(i);
      if (strict && !slot_errors[i].empty()) fail(slot_errors[i]);
    }
  } else {
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= n) return;
        work(i);
      }
    };
    std::vector<std::thread> pool;
    auto count = static_cast<std::size_t>(jobs);
    for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (strict)
      for (std::size_t i = 0; i < n; ++i)
        if (!slot_errors[i].empty()) fail(slot_errors[i]);
  }

  std::vector<AdeExtraction> results;
  RunReport report;
  results.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!slot_errors[i].empty()) {
      report.errors.push_back(slot_errors[i]);
      ++report.skipped;
      continue;
    }
    AdeExtraction& r = *slots[i];
    if (r.label == kAdeLabel) {
      ++report.ade;
      ++report.tagger_invocations;
    } else {
      ++report.no_ade;
    }
    report.spans_emitted += r.spans.size();
    report.spans_dropped += r.spans_dropped;
    results.push_back(std::move(r));
  }
  return {std::move(results), report};
}

}  // namespace ade::pipeline
