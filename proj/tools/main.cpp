// ademiner: batch front end for the tweet-mining pipeline (corpus handling,
// normalization, BPE tokenization, resampling, baselines, classify-then-
// extract runs, and shared-task scoring).

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ademiner/corpus.hpp"
#include "ademiner/error.hpp"
#include "ademiner/eval.hpp"
#include "ademiner/models.hpp"
#include "ademiner/normalize.hpp"
#include "ademiner/pipeline.hpp"
#include "ademiner/resample.hpp"
#include "ademiner/runconfig.hpp"
#include "ademiner/tokenize.hpp"
#include "ademiner/unicode.hpp"
#include "ademiner/version.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared plumbing

struct Ctx {
  ade::cli::RunConfig file_config;  // values from --config, flags override
};

template <typename T, typename U>
void config_default(const CLI::Option* opt, T& value, const std::optional<U>& from_file) {
  if (opt != nullptr && opt->count() == 0 && from_file) value = static_cast<T>(*from_file);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ade::fail("cannot write " + path);
  out << text;
  if (!out) ade::fail("write failed: " + path);
}

void emit(const std::optional<std::string>& path, const std::string& text) {
  if (path)
    write_text(*path, text);
  else
    std::cout << text;
}

json meta_json(const json& effective) {
  return json{{"tool_version", ade::kToolVersion}, {"config", effective}};
}

ade::corpus::Scheme parse_scheme(const std::string& name) {
  return ade::corpus::scheme_from_name(name);
}

std::shared_ptr<const ade::bpe::BpeVocab> load_vocab_or_bytes(const std::string& vocab_path,
                                                              const std::string& merges_path) {
  if (vocab_path.empty() != merges_path.empty())
    ade::fail("--vocab and --merges must be given together");
  if (vocab_path.empty())
    return std::make_shared<const ade::bpe::BpeVocab>(ade::bpe::make_byte_vocab());
  return std::make_shared<const ade::bpe::BpeVocab>(
      ade::bpe::load_vocab(vocab_path, merges_path));
}

ade::norm::NormalizationConfig make_norm_config(const std::string& mode,
                                                const std::string& emoji,
                                                const std::string& user_token,
                                                const std::string& url_token) {
  ade::norm::NormalizationConfig config;
  config.user_token = user_token;
  config.url_token = url_token;
  if (emoji == "keep")
    config.emoji_mode = ade::norm::EmojiMode::Keep;
  else if (emoji == "demojize")
    config.emoji_mode = ade::norm::EmojiMode::Demojize;
  else
    ade::fail("unknown emoji mode '" + emoji + "' (expected keep or demojize)");
  if (mode == "subst")
    config.strip_mode = ade::norm::StripMode::None;
  else if (mode == "strip")
    config.strip_mode = ade::norm::StripMode::StripEntities;
  else
    ade::fail("unknown normalization mode '" + mode + "' (expected subst or strip)");
  ade::norm::validate_config(config);
  return config;
}

const ade::norm::EmojiTable* emoji_table_for(const std::string& path,
                                             std::optional<ade::norm::EmojiTable>& storage) {
  if (path.empty()) return nullptr;  // builtin table
  storage = ade::norm::load_emoji_table(path);
  return &*storage;
}

// Gold files for classification scoring: either the corpus TSV
// (id<TAB>text<TAB>label) or a prediction file (id<TAB>label[<TAB>scores]).
std::map<std::string, int> load_gold_labels(const std::string& path,
                                            ade::corpus::Scheme scheme, bool header) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) ade::fail("cannot open " + path);
  std::string line;
  bool corpus_format = false;
  std::size_t skip = header ? 1 : 0;
  while (std::getline(probe, line)) {
    if (skip > 0) {
      --skip;
      continue;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) break;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    const auto& names = ade::corpus::scheme_labels(scheme);
    auto valid = [&](const std::string& v) {
      return std::find(names.begin(), names.end(), v) != names.end();
    };
    corpus_format = fields.size() == 3 && valid(fields[2]);
    break;
  }
  if (corpus_format)
    return ade::corpus::load_classification_dataset(path, scheme, header).label_map();
  auto preds = ade::models::load_label_predictions(path, scheme);
  std::map<std::string, int> out;
  for (const auto& [id, p] : preds.by_id) out[id] = p.label;
  return out;
}

void print_or_save_report(const ade::eval::MetricsReport& report,
                          const std::optional<std::string>& output, bool table,
                          const json& effective) {
  json j = json::parse(ade::eval::report_to_json(report));
  j.update(meta_json(effective));
  std::string text = j.dump(2) + "\n";
  if (output) write_text(*output, text);
  if (table)
    std::cout << ade::eval::report_to_table(report);
  else if (!output)
    std::cout << text;
}

// ---------------------------------------------------------------------------
// Subcommands

void setup_validate(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("validate", "Check a dataset against the TSV schemas");
  auto input = std::make_shared<std::string>();
  auto spans = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>();
  auto header = std::make_shared<bool>(false);
  cmd->add_option("--input", *input, "tweet/classification TSV")->required();
  cmd->add_option("--spans", *spans, "companion span TSV");
  auto* scheme_opt = cmd->add_option("--scheme", *scheme, "label scheme for column 3");
  auto* header_opt = cmd->add_flag("--header", *header, "skip one header line");
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    config_default(header_opt, *header, ctx.file_config.header);
    std::optional<ade::corpus::Scheme> sch;
    if (!scheme->empty()) sch = parse_scheme(*scheme);
    ade::corpus::LabeledDataset ds =
        spans->empty() ? ade::corpus::load_tweets(*input, sch, *header)
                       : ade::corpus::load_span_dataset(*input, *spans, sch, *header);
    std::cerr << "OK: " << ds.size() << " tweets";
    if (!spans->empty()) std::cerr << ", " << ds.spans.size() << " spans";
    std::cerr << "\n";
  });
}

void setup_summarize(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("summarize", "Per-class counts as key-sorted JSON");
  auto input = std::make_shared<std::string>();
  auto spans = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>();
  auto header = std::make_shared<bool>(false);
  auto output = std::make_shared<std::string>();
  cmd->add_option("--input", *input)->required();
  cmd->add_option("--spans", *spans);
  auto* scheme_opt = cmd->add_option("--scheme", *scheme);
  auto* header_opt = cmd->add_flag("--header", *header);
  cmd->add_option("--output", *output, "write JSON here instead of stdout");
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    config_default(header_opt, *header, ctx.file_config.header);
    std::optional<ade::corpus::Scheme> sch;
    if (!scheme->empty()) sch = parse_scheme(*scheme);
    ade::corpus::LabeledDataset ds =
        spans->empty() ? ade::corpus::load_tweets(*input, sch, *header)
                       : ade::corpus::load_span_dataset(*input, *spans, sch, *header);
    auto summary = ade::corpus::summarize(ds);
    std::string text = ade::corpus::summary_to_json(summary, !spans->empty()) + "\n";
    emit(output->empty() ? std::nullopt : std::make_optional(*output), text);
  });
}

void setup_normalize(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("normalize", "Rewrite tweets (@USER/HTTPURL, emoji, strip)");
  auto input = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  auto spans_in = std::make_shared<std::string>();
  auto spans_out = std::make_shared<std::string>();
  auto report_out = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>();
  auto mode = std::make_shared<std::string>("subst");
  auto emoji = std::make_shared<std::string>("keep");
  auto user_token = std::make_shared<std::string>("@USER");
  auto url_token = std::make_shared<std::string>("HTTPURL");
  auto emoji_table = std::make_shared<std::string>();
  auto header = std::make_shared<bool>(false);
  cmd->add_option("--input", *input)->required();
  cmd->add_option("--output", *output, "normalized TSV")->required();
  cmd->add_option("--spans", *spans_in, "span TSV to project");
  cmd->add_option("--spans-out", *spans_out, "projected span TSV");
  cmd->add_option("--report-out", *report_out, "JSON run report");
  auto* scheme_opt = cmd->add_option("--scheme", *scheme);
  auto* mode_opt = cmd->add_option("--mode", *mode, "subst | strip");
  auto* emoji_opt = cmd->add_option("--emoji", *emoji, "keep | demojize");
  auto* user_opt = cmd->add_option("--user-token", *user_token);
  auto* url_opt = cmd->add_option("--url-token", *url_token);
  cmd->add_option("--emoji-table", *emoji_table, "override the bundled alias table");
  auto* header_opt = cmd->add_flag("--header", *header);
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    config_default(header_opt, *header, ctx.file_config.header);
    config_default(user_opt, *user_token, ctx.file_config.user_token);
    config_default(url_opt, *url_token, ctx.file_config.url_token);
    config_default(emoji_opt, *emoji, ctx.file_config.emoji_mode);
    if (mode_opt->count() == 0 && ctx.file_config.strip_mode)
      *mode = *ctx.file_config.strip_mode == "strip_entities" ? "strip" : "subst";

    std::optional<ade::corpus::Scheme> sch;
    if (!scheme->empty()) sch = parse_scheme(*scheme);
    ade::corpus::LabeledDataset ds =
        spans_in->empty() ? ade::corpus::load_tweets(*input, sch, *header)
                          : ade::corpus::load_span_dataset(*input, *spans_in, sch, *header);
    auto config = make_norm_config(*mode, *emoji, *user_token, *url_token);
    std::optional<ade::norm::EmojiTable> storage;
    const auto* table = emoji_table_for(*emoji_table, storage);

    std::size_t rewritten = 0;
    std::size_t projected = 0;
    std::size_t dropped = 0;
    std::ostringstream rows;
    std::vector<ade::corpus::SpanAnnotation> out_spans;
    const auto& names = ade::corpus::scheme_labels(ds.scheme);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      auto result = ade::norm::normalize_tweet(ds.tweets[i], config, table);
      if (!result.offset_map.is_identity()) ++rewritten;
      rows << ds.tweets[i].id << '\t' << result.text;
      if (ds.labels[i] >= 0) rows << '\t' << names[ds.labels[i]];
      rows << '\n';
      for (const auto* span : ds.spans_of(ds.tweets[i].id)) {
        auto proj = ade::norm::project_span(result.offset_map, *span);
        if (proj.span) {
          auto s = *proj.span;
          s.surface = ade::uni::substr_scalars(result.text, s.start, s.end);
          out_spans.push_back(std::move(s));
          ++projected;
        } else {
          ++dropped;
        }
      }
    }
    write_text(*output, rows.str());
    if (!spans_out->empty()) ade::corpus::save_spans(out_spans, *spans_out);
    if (!report_out->empty()) {
      json effective{{"input", *input},        {"output", *output},
                     {"mode", *mode},          {"emoji", *emoji},
                     {"user_token", *user_token}, {"url_token", *url_token}};
      json j = meta_json(effective);
      j["tweets"] = ds.size();
      j["rewritten"] = rewritten;
      j["spans_projected"] = projected;
      j["spans_dropped"] = dropped;
      write_text(*report_out, j.dump(2) + "\n");
    }
    std::cerr << "normalized " << ds.size() << " tweets (" << rewritten << " rewritten";
    if (!spans_in->empty())
      std::cerr << ", " << projected << " spans projected, " << dropped << " dropped";
    std::cerr << ")\n";
  });
}

void setup_resample(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("resample", "Two-stage oversample/undersample");
  auto input = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  auto report_out = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>("binary-ADE");
  auto oversample = std::make_shared<double>(0.1);
  auto undersample = std::make_shared<double>(0.5);
  auto seed = std::make_shared<std::uint64_t>(0);
  auto header = std::make_shared<bool>(false);
  cmd->add_option("--input", *input)->required();
  cmd->add_option("--output", *output)->required();
  cmd->add_option("--report-out", *report_out);
  auto* scheme_opt = cmd->add_option("--scheme", *scheme);
  auto* over_opt = cmd->add_option("--oversample", *oversample, "stage-1 minority/majority target");
  auto* under_opt = cmd->add_option("--undersample", *undersample, "stage-2 minority/majority target");
  auto* seed_opt = cmd->add_option("--seed", *seed);
  auto* header_opt = cmd->add_flag("--header", *header);
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    config_default(over_opt, *oversample, ctx.file_config.oversample);
    config_default(under_opt, *undersample, ctx.file_config.undersample);
    config_default(seed_opt, *seed, ctx.file_config.seed);
    config_default(header_opt, *header, ctx.file_config.header);
    auto ds = ade::corpus::load_classification_dataset(*input, parse_scheme(*scheme), *header);
    ade::resample::SamplingPlan plan{*oversample, *undersample, *seed};
    auto out = ade::resample::apply_plan(ds, plan);
    ade::corpus::save_classification_dataset(out, *output);
    auto before = ade::corpus::summarize(ds);
    auto after = ade::corpus::summarize(out);
    if (!report_out->empty()) {
      json effective{{"input", *input},           {"output", *output},
                     {"scheme", *scheme},         {"oversample", *oversample},
                     {"undersample", *undersample}, {"seed", *seed}};
      json j = meta_json(effective);
      j["before"] = before.per_class;
      j["after"] = after.per_class;
      write_text(*report_out, j.dump(2) + "\n");
    }
    std::cerr << "resampled " << before.total << " -> " << after.total << " rows\n";
  });
}

void setup_tokenize(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("tokenize", "Byte-level BPE encode to token ids");
  auto input = std::make_shared<std::string>();
  auto output = std::make_shared<std::string>();
  auto offsets_out = std::make_shared<std::string>();
  auto vocab_path = std::make_shared<std::string>();
  auto merges_path = std::make_shared<std::string>();
  auto scheme = std::make_shared<std::string>();
  auto header = std::make_shared<bool>(false);
  cmd->add_option("--input", *input)->required();
  cmd->add_option("--output", *output, "id TSV: tweet_id<TAB>space-separated ids")->required();
  cmd->add_option("--offsets-out", *offsets_out, "byte-offset sidecar");
  cmd->add_option("--vocab", *vocab_path, "vocab JSON (default: 256-token byte vocab)");
  cmd->add_option("--merges", *merges_path, "merges txt");
  auto* scheme_opt = cmd->add_option("--scheme", *scheme);
  auto* header_opt = cmd->add_flag("--header", *header);
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    config_default(header_opt, *header, ctx.file_config.header);
    std::optional<ade::corpus::Scheme> sch;
    if (!scheme->empty()) sch = parse_scheme(*scheme);
    auto ds = ade::corpus::load_tweets(*input, sch, *header);
    auto vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
    std::ostringstream ids;
    std::ostringstream offsets;
    for (const auto& tweet : ds.tweets) {
      auto seq = ade::bpe::encode(tweet.text, *vocab);
      ids << tweet.id << '\t';
      offsets << tweet.id << '\t';
      for (std::size_t k = 0; k < seq.size(); ++k) {
        ids << (k ? " " : "") << seq.ids[k];
        offsets << (k ? " " : "") << seq.offsets[k].first << ':' << seq.offsets[k].second;
      }
      ids << '\n';
      offsets << '\n';
    }
    write_text(*output, ids.str());
    if (!offsets_out->empty()) write_text(*offsets_out, offsets.str());
    std::cerr << "tokenized " << ds.size() << " tweets\n";
  });
}

struct TrainFlags {
  std::shared_ptr<ade::models::TrainConfig> config = std::make_shared<ade::models::TrainConfig>();
  CLI::Option* epochs = nullptr;
  CLI::Option* lr = nullptr;
  CLI::Option* l2 = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* dim = nullptr;
  CLI::Option* batch = nullptr;

  void add_to(CLI::App* cmd) {
    epochs = cmd->add_option("--epochs", config->epochs);
    lr = cmd->add_option("--learning-rate", config->learning_rate);
    l2 = cmd->add_option("--l2", config->l2);
    seed = cmd->add_option("--seed", config->seed);
    dim = cmd->add_option("--feature-dim", config->feature_dim);
    batch = cmd->add_option("--batch-size", config->batch_size);
  }
  void apply_config(const ade::cli::RunConfig& fc) {
    config_default(epochs, config->epochs, fc.epochs);
    config_default(lr, config->learning_rate, fc.learning_rate);
    config_default(l2, config->l2, fc.l2);
    config_default(seed, config->seed, fc.seed);
    config_default(dim, config->feature_dim, fc.feature_dim);
    config_default(batch, config->batch_size, fc.batch_size);
  }
};

void setup_train(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("train", "Train a baseline model");
  cmd->require_subcommand(1);

  {
    auto* sub = cmd->add_subcommand("classifier", "Hashed-feature logistic regression");
    auto input = std::make_shared<std::string>();
    auto scheme = std::make_shared<std::string>("binary-ADE");
    auto model_out = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto merges_path = std::make_shared<std::string>();
    auto header = std::make_shared<bool>(false);
    auto flags = std::make_shared<TrainFlags>();
    sub->add_option("--input", *input)->required();
    auto* scheme_opt = sub->add_option("--scheme", *scheme);
    sub->add_option("--model-out", *model_out)->required();
    sub->add_option("--vocab", *vocab_path);
    sub->add_option("--merges", *merges_path);
    auto* header_opt = sub->add_flag("--header", *header);
    flags->add_to(sub);
    sub->callback([=, &ctx] {
      config_default(scheme_opt, *scheme, ctx.file_config.scheme);
      config_default(header_opt, *header, ctx.file_config.header);
      flags->apply_config(ctx.file_config);
      auto ds = ade::corpus::load_classification_dataset(*input, parse_scheme(*scheme), *header);
      auto vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
      auto model = ade::models::train_classifier(ds, *vocab, *flags->config);
      ade::models::save_classifier(model, *model_out);
      std::cerr << "trained classifier on " << ds.size() << " rows -> " << *model_out << "\n";
    });
  }
  {
    auto* sub = cmd->add_subcommand("tagger", "Averaged-perceptron BIO tagger");
    auto input = std::make_shared<std::string>();
    auto spans = std::make_shared<std::string>();
    auto model_out = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto merges_path = std::make_shared<std::string>();
    auto header = std::make_shared<bool>(false);
    auto flags = std::make_shared<TrainFlags>();
    sub->add_option("--input", *input, "tweet TSV")->required();
    sub->add_option("--spans", *spans, "gold span TSV")->required();
    sub->add_option("--model-out", *model_out)->required();
    sub->add_option("--vocab", *vocab_path);
    sub->add_option("--merges", *merges_path);
    auto* header_opt = sub->add_flag("--header", *header);
    flags->add_to(sub);
    sub->callback([=, &ctx] {
      config_default(header_opt, *header, ctx.file_config.header);
      flags->apply_config(ctx.file_config);
      auto ds = ade::corpus::load_span_dataset(*input, *spans, std::nullopt, *header);
      auto cleaned = ade::corpus::clean_overlapping_spans(ds);
      if (!cleaned.removed.empty())
        std::cerr << "removed " << cleaned.removed.size() << " duplicate/overlapping spans\n";
      auto vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
      auto model = ade::models::train_tagger(cleaned.cleaned, *vocab, *flags->config);
      ade::models::save_tagger(model, *model_out);
      std::cerr << "trained tagger on " << ds.size() << " tweets -> " << *model_out << "\n";
    });
  }
}

void setup_predict(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("predict", "Run a saved baseline model");
  cmd->require_subcommand(1);

  {
    auto* sub = cmd->add_subcommand("classifier", "Write a label prediction file");
    auto model_path = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto merges_path = std::make_shared<std::string>();
    auto header = std::make_shared<bool>(false);
    sub->add_option("--model", *model_path)->required();
    sub->add_option("--input", *input)->required();
    sub->add_option("--output", *output)->required();
    sub->add_option("--vocab", *vocab_path);
    sub->add_option("--merges", *merges_path);
    auto* header_opt = sub->add_flag("--header", *header);
    sub->callback([=, &ctx] {
      config_default(header_opt, *header, ctx.file_config.header);
      auto model = ade::models::load_classifier(*model_path);
      auto ds = ade::corpus::load_tweets(*input, model.scheme, *header);
      auto vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
      ade::models::LabelPredictions preds;
      preds.scheme = model.scheme;
      for (const auto& tweet : ds.tweets) {
        auto [label, scores] = ade::models::predict_label(model, ade::bpe::encode(tweet.text, *vocab));
        ade::models::Prediction p;
        p.label = label;
        p.scores = std::move(scores);
        preds.order.push_back(tweet.id);
        preds.by_id[tweet.id] = std::move(p);
      }
      ade::models::save_label_predictions(preds, *output);
      std::cerr << "predicted " << ds.size() << " tweets -> " << *output << "\n";
    });
  }
  {
    auto* sub = cmd->add_subcommand("tagger", "Write a span prediction file");
    auto model_path = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto merges_path = std::make_shared<std::string>();
    auto header = std::make_shared<bool>(false);
    sub->add_option("--model", *model_path)->required();
    sub->add_option("--input", *input)->required();
    sub->add_option("--output", *output)->required();
    sub->add_option("--vocab", *vocab_path);
    sub->add_option("--merges", *merges_path);
    auto* header_opt = sub->add_flag("--header", *header);
    sub->callback([=, &ctx] {
      config_default(header_opt, *header, ctx.file_config.header);
      auto model = ade::models::load_tagger(*model_path);
      auto ds = ade::corpus::load_tweets(*input, std::nullopt, *header);
      auto vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
      std::vector<ade::corpus::SpanAnnotation> all;
      for (const auto& tweet : ds.tweets) {
        auto spans = ade::models::extract_spans(model, ade::bpe::encode(tweet.text, *vocab),
                                                tweet.text);
        for (auto& s : spans) {
          s.tweet_id = tweet.id;
          all.push_back(std::move(s));
        }
      }
      ade::corpus::save_spans(all, *output);
      std::cerr << "extracted " << all.size() << " spans -> " << *output << "\n";
    });
  }
}

void setup_pipeline(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand(
      "pipeline", "Classify each tweet; extract spans from ADE-labeled ones");
  auto input = std::make_shared<std::string>();
  auto classifier_spec = std::make_shared<std::string>();
  auto tagger_spec = std::make_shared<std::string>();
  auto vocab_path = std::make_shared<std::string>();
  auto merges_path = std::make_shared<std::string>();
  auto labels_out = std::make_shared<std::string>();
  auto spans_out = std::make_shared<std::string>();
  auto report_out = std::make_shared<std::string>();
  auto preprocess = std::make_shared<std::string>("none");
  auto emoji = std::make_shared<std::string>("keep");
  auto user_token = std::make_shared<std::string>("@USER");
  auto url_token = std::make_shared<std::string>("HTTPURL");
  auto emoji_table = std::make_shared<std::string>();
  auto lenient = std::make_shared<bool>(false);
  auto jobs = std::make_shared<int>(1);
  auto header = std::make_shared<bool>(false);
  cmd->add_option("--input", *input)->required();
  cmd->add_option("--classifier", *classifier_spec, "baseline:model.json | file:preds.tsv")
      ->required();
  cmd->add_option("--tagger", *tagger_spec, "baseline:model.json | file:spans.tsv")->required();
  cmd->add_option("--vocab", *vocab_path);
  cmd->add_option("--merges", *merges_path);
  cmd->add_option("--labels-out", *labels_out);
  cmd->add_option("--spans-out", *spans_out);
  cmd->add_option("--report-out", *report_out);
  cmd->add_option("--preprocess", *preprocess, "none | subst | strip");
  auto* emoji_opt = cmd->add_option("--emoji", *emoji, "keep | demojize");
  auto* user_opt = cmd->add_option("--user-token", *user_token);
  auto* url_opt = cmd->add_option("--url-token", *url_token);
  cmd->add_option("--emoji-table", *emoji_table);
  auto* lenient_opt = cmd->add_flag("--lenient", *lenient, "record per-tweet errors and continue");
  auto* jobs_opt = cmd->add_option("--jobs", *jobs, "worker threads");
  auto* header_opt = cmd->add_flag("--header", *header);
  cmd->callback([=, &ctx] {
    config_default(header_opt, *header, ctx.file_config.header);
    config_default(jobs_opt, *jobs, ctx.file_config.jobs);
    config_default(emoji_opt, *emoji, ctx.file_config.emoji_mode);
    config_default(user_opt, *user_token, ctx.file_config.user_token);
    config_default(url_opt, *url_token, ctx.file_config.url_token);
    if (lenient_opt->count() == 0 && ctx.file_config.strict_errors)
      *lenient = !*ctx.file_config.strict_errors;

    auto ds = ade::corpus::load_tweets(*input, ade::corpus::Scheme::BinaryAde, *header);

    auto parse_spec = [](const std::string& spec) -> std::pair<std::string, std::string> {
      auto colon = spec.find(':');
      if (colon == std::string::npos)
        ade::fail("bad spec '" + spec + "': expected baseline:PATH or file:PATH");
      return {spec.substr(0, colon), spec.substr(colon + 1)};
    };

    std::shared_ptr<const ade::bpe::BpeVocab> vocab;
    auto need_vocab = [&]() {
      if (!vocab) vocab = load_vocab_or_bytes(*vocab_path, *merges_path);
      return vocab;
    };

    std::unique_ptr<ade::models::Classifier> classifier;
    auto [ckind, cpath] = parse_spec(*classifier_spec);
    if (ckind == "baseline") {
      classifier = std::make_unique<ade::models::BaselineClassifier>(
          ade::models::load_classifier(cpath), need_vocab());
    } else if (ckind == "file") {
      classifier = std::make_unique<ade::models::FileClassifier>(
          ade::models::load_label_predictions(cpath, ade::corpus::Scheme::BinaryAde));
    } else {
      ade::fail("unknown classifier kind '" + ckind + "'");
    }

    std::unique_ptr<ade::models::Tagger> tagger;
    auto [tkind, tpath] = parse_spec(*tagger_spec);
    if (tkind == "baseline") {
      tagger = std::make_unique<ade::models::BaselineTagger>(ade::models::load_tagger(tpath),
                                                             need_vocab());
    } else if (tkind == "file") {
      tagger = std::make_unique<ade::models::FileTagger>(ade::models::load_span_rows(tpath));
    } else {
      ade::fail("unknown tagger kind '" + tkind + "'");
    }

    std::optional<ade::norm::NormalizationConfig> norm_config;
    if (*preprocess == "subst")
      norm_config = make_norm_config("subst", *emoji, *user_token, *url_token);
    else if (*preprocess == "strip")
      norm_config = make_norm_config("strip", *emoji, *user_token, *url_token);
    else if (*preprocess != "none")
      ade::fail("unknown preprocess mode '" + *preprocess + "'");
    std::optional<ade::norm::EmojiTable> storage;
    const auto* table = emoji_table_for(*emoji_table, storage);

    auto [results, report] =
        ade::pipeline::run_batch(ds, *classifier, *tagger, norm_config, !*lenient, *jobs, table);

    if (!labels_out->empty()) {
      ade::models::LabelPredictions preds;
      preds.scheme = ade::corpus::Scheme::BinaryAde;
      for (const auto& r : results) {
        ade::models::Prediction p;
        p.label = r.label;
        p.scores = r.scores;
        preds.order.push_back(r.tweet_id);
        preds.by_id[r.tweet_id] = std::move(p);
      }
      ade::models::save_label_predictions(preds, *labels_out);
    }
    if (!spans_out->empty()) {
      std::vector<ade::corpus::SpanAnnotation> all;
      for (const auto& r : results)
        for (const auto& s : r.spans) all.push_back(s);
      ade::corpus::save_spans(all, *spans_out);
    }
    json effective{{"input", *input},         {"classifier", *classifier_spec},
                   {"tagger", *tagger_spec},  {"preprocess", *preprocess},
                   {"emoji", *emoji},         {"lenient", *lenient},
                   {"jobs", *jobs}};
    json j = meta_json(effective);
    j["ade"] = report.ade;
    j["no_ade"] = report.no_ade;
    j["spans_emitted"] = report.spans_emitted;
    j["spans_dropped"] = report.spans_dropped;
    j["tagger_invocations"] = report.tagger_invocations;
    j["skipped"] = report.skipped;
    j["errors"] = report.errors;
    if (!report_out->empty())
      write_text(*report_out, j.dump(2) + "\n");
    else
      std::cout << j.dump(2) << "\n";
    std::cerr << "pipeline: " << report.ade << " ADE, " << report.no_ade << " NoADE, "
              << report.spans_emitted << " spans (" << report.spans_dropped << " dropped)\n";
  });
}

void setup_score(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("score", "Shared-task scoring");
  cmd->require_subcommand(1);

  {
    auto* sub = cmd->add_subcommand("classification", "Per-class P/R/F1 (one-vs-rest)");
    auto gold = std::make_shared<std::string>();
    auto pred = std::make_shared<std::string>();
    auto scheme = std::make_shared<std::string>("binary-ADE");
    auto output = std::make_shared<std::string>();
    auto table = std::make_shared<bool>(false);
    auto header = std::make_shared<bool>(false);
    sub->add_option("--gold", *gold)->required();
    sub->add_option("--pred", *pred)->required();
    auto* scheme_opt = sub->add_option("--scheme", *scheme);
    sub->add_option("--output", *output, "write the JSON report here");
    sub->add_flag("--table", *table, "print an aligned text table");
    auto* header_opt = sub->add_flag("--header", *header, "gold file has a header line");
    sub->callback([=, &ctx] {
      config_default(scheme_opt, *scheme, ctx.file_config.scheme);
      config_default(header_opt, *header, ctx.file_config.header);
      auto sch = parse_scheme(*scheme);
      auto gold_map = load_gold_labels(*gold, sch, *header);
      auto preds = ade::models::load_label_predictions(*pred, sch);
      std::map<std::string, int> pred_map;
      for (const auto& [id, p] : preds.by_id) pred_map[id] = p.label;
      auto report = ade::eval::score_classification(gold_map, pred_map, sch);
      json effective{{"gold", *gold}, {"pred", *pred}, {"scheme", *scheme}};
      print_or_save_report(report, output->empty() ? std::nullopt : std::make_optional(*output),
                           *table, effective);
    });
  }
  {
    auto* sub = cmd->add_subcommand("spans", "Strict/relaxed span matching");
    auto gold = std::make_shared<std::string>();
    auto pred = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("strict");
    auto output = std::make_shared<std::string>();
    auto table = std::make_shared<bool>(false);
    sub->add_option("--gold", *gold)->required();
    sub->add_option("--pred", *pred)->required();
    auto* mode_opt = sub->add_option("--mode", *mode, "strict | relaxed");
    sub->add_option("--output", *output);
    sub->add_flag("--table", *table);
    sub->callback([=, &ctx] {
      config_default(mode_opt, *mode, ctx.file_config.mode);
      auto gold_spans = ade::models::load_span_rows(*gold);
      auto pred_spans = ade::models::load_span_rows(*pred);
      auto report = ade::eval::score_spans(gold_spans, pred_spans,
                                           ade::eval::span_mode_from_name(*mode));
      json effective{{"gold", *gold}, {"pred", *pred}, {"mode", *mode}};
      print_or_save_report(report, output->empty() ? std::nullopt : std::make_optional(*output),
                           *table, effective);
    });
  }
  {
    auto* sub = cmd->add_subcommand("median", "Element-wise median of report metrics");
    auto reports = std::make_shared<std::vector<std::string>>();
    auto output = std::make_shared<std::string>();
    auto table = std::make_shared<bool>(false);
    sub->add_option("--reports", *reports, "report JSON files")->required()->expected(-1);
    sub->add_option("--output", *output);
    sub->add_flag("--table", *table);
    sub->callback([=] {
      std::vector<ade::eval::MetricsReport> parsed;
      for (const auto& path : *reports) {
        std::ifstream in(path, std::ios::binary);
        if (!in) ade::fail("cannot open " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        parsed.push_back(ade::eval::report_from_json(buf.str()));
      }
      auto median = ade::eval::median_aggregate(parsed);
      json effective{{"reports", *reports}};
      print_or_save_report(median, output->empty() ? std::nullopt : std::make_optional(*output),
                           *table, effective);
    });
  }
}

void setup_vote(CLI::App& app, Ctx& ctx) {
  auto* cmd = app.add_subcommand("vote", "Majority-vote ensemble over prediction files");
  auto preds = std::make_shared<std::vector<std::string>>();
  auto scheme = std::make_shared<std::string>("binary-ADE");
  auto output = std::make_shared<std::string>();
  cmd->add_option("--pred", *preds, "prediction files (repeatable)")->required()->expected(-1);
  auto* scheme_opt = cmd->add_option("--scheme", *scheme);
  cmd->add_option("--output", *output)->required();
  cmd->callback([=, &ctx] {
    config_default(scheme_opt, *scheme, ctx.file_config.scheme);
    auto sch = parse_scheme(*scheme);
    std::vector<std::map<std::string, ade::models::Prediction>> ballots;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < preds->size(); ++i) {
      auto loaded = ade::models::load_label_predictions((*preds)[i], sch);
      if (i == 0) order = loaded.order;
      ballots.push_back(std::move(loaded.by_id));
    }
    auto result = ade::models::majority_vote(ballots, sch);
    ade::models::LabelPredictions out;
    out.scheme = sch;
    out.order = order;
    out.by_id = std::move(result);
    ade::models::save_label_predictions(out, *output);
    std::cerr << "voted over " << ballots.size() << " files -> " << *output << "\n";
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ademiner: tweet-mining data pipeline and shared-task scorer"};
  app.set_version_flag("--version", ade::kToolVersion);
  app.require_subcommand(1);

  Ctx ctx;
  std::string config_path;
  app.add_option("--config", config_path, "key = value defaults file")
      ->envname("ADEMINER_CONFIG");

  setup_validate(app, ctx);
  setup_summarize(app, ctx);
  setup_normalize(app, ctx);
  setup_resample(app, ctx);
  setup_tokenize(app, ctx);
  setup_train(app, ctx);
  setup_predict(app, ctx);
  setup_pipeline(app, ctx);
  setup_score(app, ctx);
  setup_vote(app, ctx);

  try {
    // The config file must be loaded before subcommand callbacks run; CLI11
    // runs callbacks inside parse(), so hook in via a pre-parse scan.
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config")
        ctx.file_config = ade::cli::load_config(argv[i + 1]);
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ade::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
