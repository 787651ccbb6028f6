#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ademiner/corpus.hpp"
#include "ademiner/models.hpp"
#include "ademiner/normalize.hpp"

namespace ade::pipeline {

// One classify-then-extract result. Spans are in original-tweet coordinates
// and empty whenever the label is NoADE.
struct AdeExtraction {
  std::string tweet_id;
  int label = 0;
  std::optional<std::vector<double>> scores;
  std::vector<corpus::SpanAnnotation> spans;
  std::size_t spans_dropped = 0;  // failed projection back to the original
};

struct RunReport {
  std::size_t ade = 0;
  std::size_t no_ade = 0;
  std::size_t spans_emitted = 0;
  std::size_t spans_dropped = 0;
  std::size_t tagger_invocations = 0;
  std::size_t skipped = 0;  // lenient mode only
  std::vector<std::string> errors;
};

// Classify the tweet; only when the label is ADE, run the tagger and project
// its spans back through the normalization offset map. No preprocess config
// means the classifier and tagger see the raw tweet.
AdeExtraction extract_ades(const corpus::Tweet& tweet, const models::Classifier& classifier,
                           const models::Tagger& tagger,
                           const std::optional<norm::NormalizationConfig>& preprocess,
                           const norm::EmojiTable* emoji_table = nullptr);

// extract_ades over every tweet in input order. strict=true aborts on the
// first per-tweet error; otherwise the error is recorded and the tweet
// skipped. jobs > 1 fans tweets out across threads; results are merged back
// into input order.
std::pair<std::vector<AdeExtraction>, RunReport> run_batch(
    const corpus::LabeledDataset& dataset, const models::Classifier& classifier,
    const models::Tagger& tagger, const std::optional<norm::NormalizationConfig>& preprocess,
    bool strict = true, int jobs = 1, const norm::EmojiTable* emoji_table = nullptr);

}  // namespace ade::pipeline
