#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ademiner/corpus.hpp"
#include "ademiner/tokenize.hpp"

namespace ade::models {

// ---------------------------------------------------------------------------
// Feature hashing

// Bag of token ids plus adjacent-id bigrams, hashed into feature_dim buckets
// (power of two) with a splitmix64 mixer; counts as values.
struct FeatureVector {
  std::uint32_t feature_dim = 0;
  std::vector<std::pair<std::uint32_t, float>> entries;  // sorted, unique indices
};

std::uint64_t splitmix64(std::uint64_t x);

FeatureVector featurize(const bpe::TokenSequence& seq, std::uint32_t feature_dim);

// ---------------------------------------------------------------------------
// Training configuration (shared by classifier and tagger baselines)

struct TrainConfig {
  int epochs = 5;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 42;
  std::uint32_t feature_dim = 1u << 16;
  int batch_size = 32;
};

void validate_config(const TrainConfig& config);

// ---------------------------------------------------------------------------
// Linear classifier (multinomial logistic regression)

struct LinearModel {
  corpus::Scheme scheme = corpus::Scheme::BinaryAde;
  std::uint32_t feature_dim = 0;
  int num_classes = 0;
  std::vector<double> weights;  // num_classes x feature_dim, row-major
  std::vector<double> bias;     // num_classes
};

// Softmax cross-entropy averaged over the batch plus (l2/2)*||W||^2.
double classifier_loss(const LinearModel& model, const std::vector<FeatureVector>& examples,
                       const std::vector<int>& labels, double l2);

// Analytic gradient of classifier_loss; grad_w/grad_b are resized to match.
void classifier_gradient(const LinearModel& model, const std::vector<FeatureVector>& examples,
                         const std::vector<int>& labels, double l2,
                         std::vector<double>& grad_w, std::vector<double>& grad_b);

// Seeded shuffled mini-batch gradient descent; deterministic given
// (dataset, config). Throws when fewer than two classes are present.
LinearModel train_classifier(const corpus::LabeledDataset& dataset, const bpe::BpeVocab& vocab,
                             const TrainConfig& config);

std::vector<double> predict_scores(const LinearModel& model, const FeatureVector& features);

// Softmax scores and argmax label; ties go to the earlier class in scheme
// order.
std::pair<int, std::vector<double>> predict_label(const LinearModel& model,
                                                  const bpe::TokenSequence& seq);

// ---------------------------------------------------------------------------
// Averaged-perceptron BIO tagger

struct TaggerModel {
  std::uint32_t feature_dim = 0;
  std::vector<double> weights;  // 3 tags x feature_dim (averaged)
};

// Greedy per-token structured perceptron over (current / previous / next
// token id, previous tag) features, weights averaged over updates.
TaggerModel train_tagger(const corpus::LabeledDataset& dataset, const bpe::BpeVocab& vocab,
                         const TrainConfig& config);

std::vector<bpe::BioTag> tag_tokens(const TaggerModel& model, const bpe::TokenSequence& seq);

// Greedy decode with BIO repair (orphan I promoted to B); maximal B I* runs
// become character spans via token byte offsets.
std::vector<corpus::SpanAnnotation> extract_spans(const TaggerModel& model,
                                                  const bpe::TokenSequence& seq,
                                                  const std::string& text);

// ---------------------------------------------------------------------------
// Model persistence (versioned JSON, exact double round-trip)

void save_classifier(const LinearModel& model, const std::string& path);
LinearModel load_classifier(const std::string& path);
void save_tagger(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

// ---------------------------------------------------------------------------
// Predictions, prediction files, ensembling

struct Prediction {
  int label = 0;
  std::optional<std::vector<double>> scores;  // one per scheme class
  bool operator==(const Prediction&) const = default;
};

struct LabelPredictions {
  corpus::Scheme scheme = corpus::Scheme::BinaryAde;
  std::vector<std::string> order;  // file row order
  std::map<std::string, Prediction> by_id;
};

// File format: tweet_id<TAB>label[<TAB>comma-separated per-class scores].
LabelPredictions load_label_predictions(const std::string& path, corpus::Scheme scheme);
void save_label_predictions(const LabelPredictions& predictions, const std::string& path);

// Span prediction file = the span TSV schema, no text validation.
std::vector<corpus::SpanAnnotation> load_span_rows(const std::string& path);

// Per tweet id, the label with the most votes; ties broken by mean score
// when every ballot carries scores, else by scheme order. All ballots must
// cover identical id sets.
std::map<std::string, Prediction> majority_vote(
    const std::vector<std::map<std::string, Prediction>>& ballots, corpus::Scheme scheme);

// ---------------------------------------------------------------------------
// Pluggable interfaces consumed by the pipeline

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual Prediction predict(const corpus::Tweet& tweet) const = 0;
  virtual corpus::Scheme scheme() const = 0;
};

class Tagger {
 public:
  virtual ~Tagger() = default;
  virtual std::vector<corpus::SpanAnnotation> extract(const corpus::Tweet& tweet) const = 0;
};

class BaselineClassifier : public Classifier {
 public:
  BaselineClassifier(LinearModel model, std::shared_ptr<const bpe::BpeVocab> vocab);
  Prediction predict(const corpus::Tweet& tweet) const override;
  corpus::Scheme scheme() const override { return model_.scheme; }

 private:
  LinearModel model_;
  std::shared_ptr<const bpe::BpeVocab> vocab_;
};

class BaselineTagger : public Tagger {
 public:
  BaselineTagger(TaggerModel model, std::shared_ptr<const bpe::BpeVocab> vocab);
  std::vector<corpus::SpanAnnotation> extract(const corpus::Tweet& tweet) const override;

 private:
  TaggerModel model_;
  std::shared_ptr<const bpe::BpeVocab> vocab_;
};

// Replays a prediction file; querying an id absent from the file is an
// error, never a default.
class FileClassifier : public Classifier {
 public:
  explicit FileClassifier(LabelPredictions predictions);
  Prediction predict(const corpus::Tweet& tweet) const override;
  corpus::Scheme scheme() const override { return predictions_.scheme; }

 private:
  LabelPredictions predictions_;
};

class FileTagger : public Tagger {
 public:
  explicit FileTagger(std::vector<corpus::SpanAnnotation> spans);
  std::vector<corpus::SpanAnnotation> extract(const corpus::Tweet& tweet) const override;

 private:
  std::map<std::string, std::vector<corpus::SpanAnnotation>> by_id_;
};

}  // namespace ade::models
