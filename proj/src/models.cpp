#include "ademiner/models.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ademiner/error.hpp"
#include "ademiner/rng.hpp"
#include "ademiner/unicode.hpp"

namespace ade::models {

namespace {

constexpr std::uint64_t kUnigramSalt = 0x7a5f1c93d2e84b01ULL;
constexpr std::uint64_t kBigramSalt = 0x3fb8e2a94c6d5e17ULL;

// Tagger feature salts; BOS/EOS markers sit outside the token-id space.
constexpr std::uint64_t kCurSalt = 0x11aa22bb33cc44ddULL;
constexpr std::uint64_t kPrevSalt = 0x55ee66ff77881199ULL;
constexpr std::uint64_t kNextSalt = 0x9a8b7c6d5e4f3a2bULL;
constexpr std::uint64_t kPrevTagSalt = 0xc3d2e1f00f1e2d3cULL;
constexpr std::uint64_t kBoundaryMarker = 0xffffffff00000001ULL;

constexpr int kNumTags = 3;  // O, B, I

bool power_of_two(std::uint32_t x) { return x != 0 && (x & (x - 1)) == 0; }

std::vector<double> softmax(std::vector<double> scores) {
  double mx = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double& s : scores) {
    s = std::exp(s - mx);
    sum += s;
  }
  for (double& s : scores) s /= sum;
  return scores;
}

struct TaggerFeatures {
  std::array<std::uint32_t, 4> buckets;
};

TaggerFeatures tagger_features(const std::vector<int>& ids, std::size_t pos, int prev_tag,
                               std::uint32_t dim) {
  auto id_at = [&](std::size_t p, std::uint64_t fallback) -> std::uint64_t {
    return p < ids.size() ? static_cast<std::uint64_t>(static_cast<std::uint32_t>(ids[p]))
                          : fallback;
  };
  std::uint32_t mask = dim - 1;
  TaggerFeatures f;
  f.buckets[0] = static_cast<std::uint32_t>(splitmix64(kCurSalt ^ id_at(pos, 0))) & mask;
  f.buckets[1] = static_cast<std::uint32_t>(
                     splitmix64(kPrevSalt ^ (pos == 0 ? kBoundaryMarker : id_at(pos - 1, 0)))) &
                 mask;
  f.buckets[2] =
      static_cast<std::uint32_t>(splitmix64(kNextSalt ^ id_at(pos + 1, kBoundaryMarker))) & mask;
  f.buckets[3] = static_cast<std::uint32_t>(
                     splitmix64(kPrevTagSalt ^ static_cast<std::uint64_t>(prev_tag))) &
                 mask;
  return f;
}

int best_tag(const std::vector<double>& w, const TaggerFeatures& f, std::uint32_t dim) {
  int best = 0;
  double best_score = -1e300;
  for (int t = 0; t < kNumTags; ++t) {
    double s = 0.0;
    for (std::uint32_t b : f.buckets) s += w[static_cast<std::size_t>(t) * dim + b];
    if (s > best_score) {
      best_score = s;
      best = t;
    }
  }
  return best;
}

nlohmann::json load_model_json(const std::string& path, const char* kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(path + ": " + e.what());
  }
  if (j.value("format", "") != "ademiner-model")
    fail(path + ": not an ademiner model file");
  if (j.value("version", 0) != 1)
    fail(path + ": unsupported model version " + std::to_string(j.value("version", 0)));
  if (j.value("kind", "") != kind)
    fail(path + ": expected kind '" + kind + "', found '" + j.value("kind", "") + "'");
  return j;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

FeatureVector featurize(const bpe::TokenSequence& seq, std::uint32_t feature_dim) {
  if (!power_of_two(feature_dim)) fail("feature_dim must be a power of two");
  std::uint32_t mask = feature_dim - 1;
  std::map<std::uint32_t, float> acc;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    auto id = static_cast<std::uint64_t>(static_cast<std::uint32_t>(seq.ids[i]));
    acc[static_cast<std::uint32_t>(splitmix64(kUnigramSalt ^ id)) & mask] += 1.0f;
    if (i + 1 < seq.ids.size()) {
      auto next = static_cast<std::uint64_t>(static_cast<std::uint32_t>(seq.ids[i + 1]));
      acc[static_cast<std::uint32_t>(splitmix64(splitmix64(kBigramSalt ^ id) ^ next)) & mask] +=
          1.0f;
    }
  }
  FeatureVector fv;
  fv.feature_dim = feature_dim;
  fv.entries.assign(acc.begin(), acc.end());
  return fv;
}

void validate_config(const TrainConfig& config) {
  if (config.epochs < 1) fail("epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) fail("learning_rate must be positive");
  if (config.l2 < 0.0) fail("l2 must be non-negative");
  if (config.batch_size < 1) fail("batch_size must be >= 1");
  if (!power_of_two(config.feature_dim) || config.feature_dim < (1u << 8) ||
      config.feature_dim > (1u << 22))
    fail("feature_dim must be a power of two in [2^8, 2^22]");
}

std::vector<double> predict_scores(const LinearModel& model, const FeatureVector& features) {
  if (features.feature_dim != model.feature_dim)
    fail("feature_dim mismatch: model has " + std::to_string(model.feature_dim) +
         ", features have " + std::to_string(features.feature_dim));
  std::vector<double> scores(model.bias);
  for (int c = 0; c < model.num_classes; ++c) {
    const double* row = model.weights.data() + static_cast<std::size_t>(c) * model.feature_dim;
    for (const auto& [idx, val] : features.entries) scores[c] += row[idx] * val;
  }
  return softmax(std::move(scores));
}

double classifier_loss(const LinearModel& model, const std::vector<FeatureVector>& examples,
                       const std::vector<int>& labels, double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    std::vector<double> scores(model.bias);
    for (int c = 0; c < model.num_classes; ++c) {
      const double* row = model.weights.data() + static_cast<std::size_t>(c) * model.feature_dim;
      for (const auto& [idx, val] : examples[i].entries) scores[c] += row[idx] * val;
    }
    auto probs = softmax(std::move(scores));
    loss += -std::log(std::max(probs[labels[i]], 1e-300));
  }
  loss /= static_cast<double>(examples.size());
  double norm = 0.0;
  for (double w : model.weights) norm += w * w;
  return loss + 0.5 * l2 * norm;
}

void classifier_gradient(const LinearModel& model, const std::vector<FeatureVector>& examples,
                         const std::vector<int>& labels, double l2,
                         std::vector<double>& grad_w, std::vector<double>& grad_b) {
  grad_w.assign(model.weights.size(), 0.0);
  grad_b.assign(model.bias.size(), 0.0);
  double inv_n = 1.0 / static_cast<double>(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    std::vector<double> scores(model.bias);
    for (int c = 0; c < model.num_classes; ++c) {
      const double* row = model.weights.data() + static_cast<std::size_t>(c) * model.feature_dim;
      for (const auto& [idx, val] : examples[i].entries) scores[c] += row[idx] * val;
    }
    auto probs = softmax(std::move(scores));
    for (int c = 0; c < model.num_classes; ++c) {
      double delta = (probs[c] - (labels[i] == c ? 1.0 : 0.0)) * inv_n;
      grad_b[c] += delta;
      double* row = grad_w.data() + static_cast<std::size_t>(c) * model.feature_dim;
      for (const auto& [idx, val] : examples[i].entries) row[idx] += delta * val;
    }
  }
  for (std::size_t k = 0; k < grad_w.size(); ++k) grad_w[k] += l2 * model.weights[k];
}

LinearModel train_classifier(const corpus::LabeledDataset& dataset, const bpe::BpeVocab& vocab,
                             const TrainConfig& config) {
  validate_config(config);
  if (!dataset.has_labels || dataset.size() == 0) fail("training requires a labeled dataset");

  std::vector<FeatureVector> examples;
  std::vector<int> labels;
  examples.reserve(dataset.size());
  std::set<int> distinct;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    examples.push_back(featurize(bpe::encode(dataset.tweets[i].text, vocab), config.feature_dim));
    labels.push_back(dataset.labels[i]);
    distinct.insert(dataset.labels[i]);
  }
  if (distinct.size() < 2) fail("training requires at least two classes in the data");

  LinearModel model;
  model.scheme = dataset.scheme;
  model.feature_dim = config.feature_dim;
  model.num_classes = static_cast<int>(corpus::scheme_labels(dataset.scheme).size());
  model.weights.assign(static_cast<std::size_t>(model.num_classes) * config.feature_dim, 0.0);
  model.bias.assign(model.num_classes, 0.0);

  Pcg32 rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad_w;
  std::vector<double> grad_b;
  std::vector<FeatureVector> batch;
  std::vector<int> batch_labels;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
      std::size_t stop = std::min(order.size(), at + config.batch_size);
      batch.clear();
      batch_labels.clear();
      for (std::size_t k = at; k < stop; ++k) {
        batch.push_back(examples[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      classifier_gradient(model, batch, batch_labels, config.l2, grad_w, grad_b);
      for (std::size_t k = 0; k < model.weights.size(); ++k)
        model.weights[k] -= config.learning_rate * grad_w[k];
      for (std::size_t k = 0; k < model.bias.size(); ++k)
        model.bias[k] -= config.learning_rate * grad_b[k];
    }
  }
  return model;
}

std::pair<int, std::vector<double>> predict_label(const LinearModel& model,
                                                  const bpe::TokenSequence& seq) {
  auto scores = predict_scores(model, featurize(seq, model.feature_dim));
  int best = 0;
  for (int c = 1; c < model.num_classes; ++c)
    if (scores[c] > scores[best]) best = c;
  return {best, std::move(scores)};
}

TaggerModel train_tagger(const corpus::LabeledDataset& dataset, const bpe::BpeVocab& vocab,
                         const TrainConfig& config) {
  validate_config(config);
  if (dataset.spans.empty()) fail("training a tagger requires a dataset with spans");

  struct Sentence {
    std::vector<int> ids;
    std::vector<int> gold;  // tag indices
  };
  std::vector<Sentence> sentences;
  for (const auto& tweet : dataset.tweets) {
    auto seq = bpe::encode(tweet.text, vocab);
    if (seq.ids.empty()) continue;
    std::vector<corpus::SpanAnnotation> spans;
    for (const auto* s : dataset.spans_of(tweet.id)) spans.push_back(*s);
    auto bio = bpe::align_spans_to_bio(seq, spans, tweet.text);
    Sentence sent;
    sent.ids = seq.ids;
    for (auto tag : bio.tags) sent.gold.push_back(static_cast<int>(tag));
    sentences.push_back(std::move(sent));
  }
  if (sentences.empty()) fail("no usable training sentences");

  std::uint32_t dim = config.feature_dim;
  std::size_t wsize = static_cast<std::size_t>(kNumTags) * dim;
  std::vector<double> w(wsize, 0.0);
  std::vector<double> acc(wsize, 0.0);
  std::vector<std::uint64_t> last(wsize, 0);
  std::uint64_t t = 0;

  auto bump = [&](std::size_t slot, double delta) {
    acc[slot] += w[slot] * static_cast<double>(t - last[slot]);
    last[slot] = t;
    w[slot] += delta;
  };

  Pcg32 rng(config.seed);
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t si : order) {
      const Sentence& sent = sentences[si];
      int prev = kNumTags;  // sentence-start marker
      for (std::size_t pos = 0; pos < sent.ids.size(); ++pos) {
        ++t;
        auto feats = tagger_features(sent.ids, pos, prev, dim);
        int pred = best_tag(w, feats, dim);
        int gold = sent.gold[pos];
        if (pred != gold) {
          for (std::uint32_t b : feats.buckets) {
            bump(static_cast<std::size_t>(gold) * dim + b, +1.0);
            bump(static_cast<std::size_t>(pred) * dim + b, -1.0);
          }
        }
        prev = pred;
      }
    }
  }

  TaggerModel model;
  model.feature_dim = dim;
  model.weights.assign(wsize, 0.0);
  if (t > 0) {
    for (std::size_t k = 0; k < wsize; ++k) {
      double total = acc[k] + w[k] * static_cast<double>(t - last[k]);
      model.weights[k] = total / static_cast<double>(t);
    }
  }
  return model;
}

std::vector<bpe::BioTag> tag_tokens(const TaggerModel& model, const bpe::TokenSequence& seq) {
  std::vector<bpe::BioTag> tags;
  tags.reserve(seq.size());
  int prev = kNumTags;
  for (std::size_t pos = 0; pos < seq.ids.size(); ++pos) {
    auto feats = tagger_features(seq.ids, pos, prev, model.feature_dim);
    int t = best_tag(model.weights, feats, model.feature_dim);
    tags.push_back(static_cast<bpe::BioTag>(t));
    prev = t;
  }
  return tags;
}

std::vector<corpus::SpanAnnotation> extract_spans(const TaggerModel& model,
                                                  const bpe::TokenSequence& seq,
                                                  const std::string& text) {
  auto tags = tag_tokens(model, seq);

  // Token runs: B starts a run, I continues one (orphan I repaired to B).
  struct Run {
    std::size_t first;
    std::size_t last;
  };
  std::vector<Run> runs;
  bool open = false;
  for (std::size_t k = 0; k < tags.size(); ++k) {
    if (tags[k] == bpe::BioTag::B || (tags[k] == bpe::BioTag::I && !open)) {
      runs.push_back({k, k});
      open = true;
    } else if (tags[k] == bpe::BioTag::I) {
      runs.back().last = k;
    } else {
      open = false;
    }
  }

  auto scalars = uni::decode_utf8(text);
  auto byte_of = uni::scalar_byte_offsets(scalars);
  // byte -> index of the scalar containing it
  std::vector<std::size_t> scalar_of(byte_of.back(), 0);
  for (std::size_t i = 0; i < scalars.size(); ++i)
    for (std::size_t b = byte_of[i]; b < byte_of[i + 1]; ++b) scalar_of[b] = i;

  std::vector<corpus::SpanAnnotation> spans;
  for (const auto& run : runs) {
    std::size_t byte_start = seq.offsets[run.first].first;
    std::size_t byte_end = seq.offsets[run.last].second;
    // Expand to whole characters when a token boundary splits a multi-byte
    // character.
    std::size_t start = scalar_of[byte_start];
    std::size_t end = scalar_of[byte_end - 1] + 1;
    if (!spans.empty() && start < spans.back().end) start = spans.back().end;  // keep disjoint
    if (start >= end) continue;
    corpus::SpanAnnotation s;
    s.start = start;
    s.end = end;
    s.surface = uni::substr_scalars(text, start, end);
    spans.push_back(std::move(s));
  }
  return spans;
}

void save_classifier(const LinearModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "ademiner-model";
  j["version"] = 1;
  j["kind"] = "linear_classifier";
  j["scheme"] = corpus::scheme_name(model.scheme);
  j["feature_dim"] = model.feature_dim;
  j["num_classes"] = model.num_classes;
  j["bias"] = model.bias;
  nlohmann::json rows = nlohmann::json::array();
  for (int c = 0; c < model.num_classes; ++c)
    rows.push_back(std::vector<double>(
        model.weights.begin() + static_cast<std::ptrdiff_t>(c) * model.feature_dim,
        model.weights.begin() + static_cast<std::ptrdiff_t>(c + 1) * model.feature_dim));
  j["weights"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << j.dump() << '\n';
}

LinearModel load_classifier(const std::string& path) {
  auto j = load_model_json(path, "linear_classifier");
  LinearModel model;
  try {
    model.scheme = corpus::scheme_from_name(j.at("scheme").get<std::string>());
    model.feature_dim = j.at("feature_dim").get<std::uint32_t>();
    model.num_classes = j.at("num_classes").get<int>();
    model.bias = j.at("bias").get<std::vector<double>>();
    for (const auto& row : j.at("weights")) {
      auto values = row.get<std::vector<double>>();
      model.weights.insert(model.weights.end(), values.begin(), values.end());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(path + ": " + e.what());
  }
  if (model.bias.size() != static_cast<std::size_t>(model.num_classes) ||
      model.weights.size() !=
          static_cast<std::size_t>(model.num_classes) * model.feature_dim)
    fail(path + ": inconsistent model dimensions");
  return model;
}

void save_tagger(const TaggerModel& model, const std::string& path) {
  nlohmann::json j;
  j["format"] = "ademiner-model";
  j["version"] = 1;
  j["kind"] = "perceptron_tagger";
  j["feature_dim"] = model.feature_dim;
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < kNumTags; ++t)
    rows.push_back(std::vector<double>(
        model.weights.begin() + static_cast<std::ptrdiff_t>(t) * model.feature_dim,
        model.weights.begin() + static_cast<std::ptrdiff_t>(t + 1) * model.feature_dim));
  j["weights"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << j.dump() << '\n';
}

TaggerModel load_tagger(const std::string& path) {
  auto j = load_model_json(path, "perceptron_tagger");
  TaggerModel model;
  try {
    model.feature_dim = j.at("feature_dim").get<std::uint32_t>();
    for (const auto& row : j.at("weights")) {
      auto values = row.get<std::vector<double>>();
      model.weights.insert(model.weights.end(), values.begin(), values.end());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(path + ": " + e.what());
  }
  if (model.weights.size() != static_cast<std::size_t>(kNumTags) * model.feature_dim)
    fail(path + ": inconsistent model dimensions");
  return model;
}

LabelPredictions load_label_predictions(const std::string& path, corpus::Scheme scheme) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  LabelPredictions preds;
  preds.scheme = scheme;
  const auto& names = corpus::scheme_labels(scheme);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) fail(path + ":" + std::to_string(line_no) + ": empty row");
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      auto tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 2 && fields.size() != 3)
      fail(path + ":" + std::to_string(line_no) + ": expected 2 or 3 columns, got " +
           std::to_string(fields.size()));
    Prediction p;
    p.label = corpus::label_index(scheme, fields[1]);
    if (fields.size() == 3) {
      std::vector<double> scores;
      std::stringstream ss(fields[2]);
      std::string item;
      while (std::getline(ss, item, ',')) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size())
          fail(path + ":" + std::to_string(line_no) + ": unparsable score '" + item + "'");
        scores.push_back(v);
      }
      if (scores.size() != names.size())
        fail(path + ":" + std::to_string(line_no) + ": expected " +
             std::to_string(names.size()) + " scores, got " + std::to_string(scores.size()));
      p.scores = std::move(scores);
    }
    if (!preds.by_id.emplace(fields[0], std::move(p)).second)
      fail(path + ":" + std::to_string(line_no) + ": duplicate tweet id '" + fields[0] + "'");
    preds.order.push_back(fields[0]);
  }
  return preds;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

void save_label_predictions(const LabelPredictions& predictions, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  const auto& names = corpus::scheme_labels(predictions.scheme);
  for (const auto& id : predictions.order) {
    const Prediction& p = predictions.by_id.at(id);
    out << id << '\t' << names[p.label];
    if (p.scores) {
      out << '\t';
      for (std::size_t i = 0; i < p.scores->size(); ++i)
        out << (i ? "," : "") << format_double((*p.scores)[i]);
    }
    out << '\n';
  }
  if (!out) fail("write failed: " + path);
}

std::vector<corpus::SpanAnnotation> load_span_rows(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::vector<corpus::SpanAnnotation> spans;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) fail(path + ":" + std::to_string(line_no) + ": empty row");
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (;;) {
      auto tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (fields.size() != 4)
      fail(path + ":" + std::to_string(line_no) + ": expected 4 columns, got " +
           std::to_string(fields.size()));
    corpus::SpanAnnotation s;
    s.tweet_id = fields[0];
    for (int k = 1; k <= 2; ++k) {
      std::size_t v = 0;
      auto [ptr, ec] = std::from_chars(fields[k].data(), fields[k].data() + fields[k].size(), v);
      if (ec != std::errc() || ptr != fields[k].data() + fields[k].size())
        fail(path + ":" + std::to_string(line_no) + ": unparsable offset '" + fields[k] + "'");
      (k == 1 ? s.start : s.end) = v;
    }
    s.surface = fields[3];
    if (s.start >= s.end)
      fail(path + ":" + std::to_string(line_no) + ": invalid span (start >= end)");
    spans.push_back(std::move(s));
  }
  return spans;
}

std::map<std::string, Prediction> majority_vote(
    const std::vector<std::map<std::string, Prediction>>& ballots, corpus::Scheme scheme) {
  if (ballots.empty()) fail("majority vote needs at least one ballot");
  const auto& first = ballots.front();
  for (const auto& b : ballots) {
    if (b.size() != first.size()) fail("ballots do not cover identical tweet ids");
    for (const auto& [id, pred] : first)
      if (!b.count(id)) fail("ballots do not cover identical tweet ids: missing '" + id + "'");
  }
  std::size_t num_classes = corpus::scheme_labels(scheme).size();
  bool all_scored = true;
  for (const auto& b : ballots)
    for (const auto& [id, pred] : b)
      if (!pred.scores) all_scored = false;

  std::map<std::string, Prediction> out;
  for (const auto& [id, unused] : first) {
    std::vector<int> votes(num_classes, 0);
    std::vector<double> mean_scores(num_classes, 0.0);
    for (const auto& b : ballots) {
      const Prediction& p = b.at(id);
      ++votes[p.label];
      if (all_scored)
        for (std::size_t c = 0; c < num_classes; ++c) mean_scores[c] += (*p.scores)[c];
    }
    if (all_scored)
      for (double& s : mean_scores) s /= static_cast<double>(ballots.size());

    int top = *std::max_element(votes.begin(), votes.end());
    int winner = -1;
    if (all_scored) {
      double best_score = -1e300;
      for (std::size_t c = 0; c < num_classes; ++c)
        if (votes[c] == top && mean_scores[c] > best_score) {
          best_score = mean_scores[c];
          winner = static_cast<int>(c);
        }
    } else {
      for (std::size_t c = 0; c < num_classes; ++c)
        if (votes[c] == top) {
          winner = static_cast<int>(c);
          break;
        }
    }
    Prediction p;
    p.label = winner;
    if (all_scored) p.scores = mean_scores;
    out[id] = std::move(p);
  }
  return out;
}

BaselineClassifier::BaselineClassifier(LinearModel model,
                                       std::shared_ptr<const bpe::BpeVocab> vocab)
    : model_(std::move(model)), vocab_(std::move(vocab)) {}

Prediction BaselineClassifier::predict(const corpus::Tweet& tweet) const {
  auto [label, scores] = predict_label(model_, bpe::encode(tweet.text, *vocab_));
  Prediction p;
  p.label = label;
  p.scores = std::move(scores);
  return p;
}

BaselineTagger::BaselineTagger(TaggerModel model, std::shared_ptr<const bpe::BpeVocab> vocab)
    : model_(std::move(model)), vocab_(std::move(vocab)) {}

std::vector<corpus::SpanAnnotation> BaselineTagger::extract(const corpus::Tweet& tweet) const {
  auto spans = extract_spans(model_, bpe::encode(tweet.text, *vocab_), tweet.text);
  for (auto& s : spans) s.tweet_id = tweet.id;
  return spans;
}

FileClassifier::FileClassifier(LabelPredictions predictions)
    : predictions_(std::move(predictions)) {}

Prediction FileClassifier::predict(const corpus::Tweet& tweet) const {
  auto it = predictions_.by_id.find(tweet.id);
  if (it == predictions_.by_id.end())
    fail("no prediction on file for tweet id '" + tweet.id + "'");
  return it->second;
}

FileTagger::FileTagger(std::vector<corpus::SpanAnnotation> spans) {
  for (auto& s : spans) by_id_[s.tweet_id].push_back(std::move(s));
}

std::vector<corpus::SpanAnnotation> FileTagger::extract(const corpus::Tweet& tweet) const {
  auto it = by_id_.find(tweet.id);
  if (it == by_id_.end()) fail("no spans on file for tweet id '" + tweet.id + "'");
  return it->second;
}

}  // namespace ade::models
