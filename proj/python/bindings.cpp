// Python bindings for the ademiner core: corpus I/O, normalization,
// byte-level BPE, resampling, baselines, the extraction pipeline, and the
// shared-task scorer.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

#include "ademiner/corpus.hpp"
#include "ademiner/error.hpp"
#include "ademiner/eval.hpp"
#include "ademiner/models.hpp"
#include "ademiner/normalize.hpp"
#include "ademiner/pipeline.hpp"
#include "ademiner/resample.hpp"
#include "ademiner/tokenize.hpp"
#include "ademiner/version.hpp"

namespace py = pybind11;

namespace {

ade::corpus::Scheme scheme_arg(const std::string& name) {
  return ade::corpus::scheme_from_name(name);
}

ade::norm::NormalizationConfig config_arg(const std::string& user_token,
                                          const std::string& url_token,
                                          const std::string& emoji_mode,
                                          const std::string& strip_mode) {
  ade::norm::NormalizationConfig config;
  config.user_token = user_token;
  config.url_token = url_token;
  if (emoji_mode == "demojize")
    config.emoji_mode = ade::norm::EmojiMode::Demojize;
  else if (emoji_mode != "keep")
    ade::fail("emoji_mode must be 'keep' or 'demojize'");
  if (strip_mode == "strip_entities")
    config.strip_mode = ade::norm::StripMode::StripEntities;
  else if (strip_mode != "none")
    ade::fail("strip_mode must be 'none' or 'strip_entities'");
  ade::norm::validate_config(config);
  return config;
}

py::dict report_dict(const ade::eval::MetricsReport& report) {
  auto cls_dict = [&](const ade::eval::ClassReport& cls) {
    py::dict d;
    if (!report.aggregated) {
      d["tp"] = cls.counts.tp;
      d["fp"] = cls.counts.fp;
      d["fn"] = cls.counts.fn;
      if (cls.counts.tn) d["tn"] = *cls.counts.tn;
    }
    d["precision"] = cls.metrics.precision;
    d["recall"] = cls.metrics.recall;
    d["f1"] = cls.metrics.f1;
    return d;
  };
  py::dict out;
  out["task"] = report.task;
  out["aggregated"] = report.aggregated;
  if (report.focus_class) out["focus_class"] = *report.focus_class;
  py::dict per_class;
  for (const auto& [name, cls] : report.per_class) per_class[name.c_str()] = cls_dict(cls);
  out["per_class"] = per_class;
  if (report.micro) out["micro"] = cls_dict(*report.micro);
  return out;
}

std::vector<ade::corpus::SpanAnnotation> spans_arg(
    const std::vector<std::tuple<std::string, std::size_t, std::size_t, std::string>>& spans) {
  std::vector<ade::corpus::SpanAnnotation> out;
  out.reserve(spans.size());
  for (const auto& [id, start, end, surface] : spans) out.push_back({id, start, end, surface});
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tweet-mining pipeline core: corpus handling, normalization, "
            "byte-level BPE, resampling, baselines, and shared-task scoring";
  m.attr("__version__") = ade::kToolVersion;

  py::register_exception<ade::Error>(m, "AdeError", PyExc_ValueError);

  // ---- corpus ------------------------------------------------------------
  py::class_<ade::corpus::Tweet>(m, "Tweet")
      .def(py::init<std::string, std::string>(), py::arg("id"), py::arg("text"))
      .def_readwrite("id", &ade::corpus::Tweet::id)
      .def_readwrite("text", &ade::corpus::Tweet::text)
      .def("__repr__", [](const ade::corpus::Tweet& t) {
        return "Tweet(id='" + t.id + "')";
      });

  py::class_<ade::corpus::SpanAnnotation>(m, "SpanAnnotation")
      .def(py::init<std::string, std::size_t, std::size_t, std::string>(), py::arg("tweet_id"),
           py::arg("start"), py::arg("end"), py::arg("surface"))
      .def_readwrite("tweet_id", &ade::corpus::SpanAnnotation::tweet_id)
      .def_readwrite("start", &ade::corpus::SpanAnnotation::start)
      .def_readwrite("end", &ade::corpus::SpanAnnotation::end)
      .def_readwrite("surface", &ade::corpus::SpanAnnotation::surface)
      .def("__repr__", [](const ade::corpus::SpanAnnotation& s) {
        return "SpanAnnotation('" + s.tweet_id + "', " + std::to_string(s.start) + ", " +
               std::to_string(s.end) + ", '" + s.surface + "')";
      });

  py::class_<ade::corpus::LabeledDataset>(m, "LabeledDataset")
      .def_property_readonly("scheme",
                             [](const ade::corpus::LabeledDataset& ds) {
                               return ade::corpus::scheme_name(ds.scheme);
                             })
      .def_readonly("tweets", &ade::corpus::LabeledDataset::tweets)
      .def_readonly("spans", &ade::corpus::LabeledDataset::spans)
      .def_property_readonly("labels",
                             [](const ade::corpus::LabeledDataset& ds) {
                               py::dict out;
                               const auto& names = ade::corpus::scheme_labels(ds.scheme);
                               for (std::size_t i = 0; i < ds.size(); ++i)
                                 if (ds.labels[i] >= 0)
                                   out[ds.tweets[i].id.c_str()] = names[ds.labels[i]];
                               return out;
                             })
      .def("__len__", &ade::corpus::LabeledDataset::size);

  m.def(
      "load_classification_dataset",
      [](const std::string& path, const std::string& scheme, bool header) {
        return ade::corpus::load_classification_dataset(path, scheme_arg(scheme), header);
      },
      py::arg("path"), py::arg("scheme"), py::arg("header") = false);

  m.def(
      "load_span_dataset",
      [](const std::string& tweets_path, const std::string& spans_path, bool header) {
        return ade::corpus::load_span_dataset(tweets_path, spans_path, std::nullopt, header);
      },
      py::arg("tweets_path"), py::arg("spans_path"), py::arg("header") = false);

  m.def("summarize", [](const ade::corpus::LabeledDataset& ds) {
    auto summary = ade::corpus::summarize(ds);
    py::dict out;
    for (const auto& [name, count] : summary.per_class) out[name.c_str()] = count;
    out["total"] = summary.total;
    if (!ds.spans.empty()) {
      out["span_count"] = summary.span_count;
      out["tweets_with_spans"] = summary.tweets_with_spans;
    }
    return out;
  });

  m.def("clean_overlapping_spans", [](const ade::corpus::LabeledDataset& ds) {
    auto result = ade::corpus::clean_overlapping_spans(ds);
    return py::make_tuple(result.cleaned, result.removed);
  });

  // ---- normalize ---------------------------------------------------------
  m.def(
      "normalize_tweet",
      [](const std::string& text, const std::string& user_token, const std::string& url_token,
         const std::string& emoji_mode, const std::string& strip_mode) {
        auto result = ade::norm::normalize_tweet(
            {"", text}, config_arg(user_token, url_token, emoji_mode, strip_mode));
        py::list segments;
        for (const auto& seg : result.offset_map.segments)
          segments.append(py::make_tuple(seg.source_start, seg.source_end, seg.target_start,
                                         seg.target_end, seg.copied));
        return py::make_tuple(result.text, segments);
      },
      py::arg("text"), py::arg("user_token") = "@USER", py::arg("url_token") = "HTTPURL",
      py::arg("emoji_mode") = "keep", py::arg("strip_mode") = "none",
      "Returns (normalized_text, offset_map_segments)");

  m.def(
      "demojize", [](const std::string& text) { return ade::norm::demojize(text); },
      py::arg("text"));

  m.def(
      "strip_entities",
      [](const std::string& text) { return ade::norm::strip_entities({"", text}).text; },
      py::arg("text"));

  // ---- tokenize ----------------------------------------------------------
  py::class_<ade::bpe::BpeVocab, std::shared_ptr<ade::bpe::BpeVocab>>(m, "BpeVocab")
      .def("__len__", &ade::bpe::BpeVocab::size)
      .def_property_readonly("num_merges",
                             [](const ade::bpe::BpeVocab& v) { return v.merges.size(); });

  m.def(
      "load_vocab",
      [](const std::string& vocab_path, const std::string& merges_path) {
        return std::make_shared<ade::bpe::BpeVocab>(ade::bpe::load_vocab(vocab_path, merges_path));
      },
      py::arg("vocab_path"), py::arg("merges_path"));

  m.def("byte_vocab",
        [] { return std::make_shared<ade::bpe::BpeVocab>(ade::bpe::make_byte_vocab()); });

  m.def(
      "encode",
      [](const std::string& text, const ade::bpe::BpeVocab& vocab) {
        auto seq = ade::bpe::encode(text, vocab);
        return py::make_tuple(seq.ids, seq.offsets);
      },
      py::arg("text"), py::arg("vocab"), "Returns (ids, byte_offsets)");

  m.def(
      "decode",
      [](const std::vector<int>& ids, const ade::bpe::BpeVocab& vocab) {
        return ade::bpe::decode_ids(ids, vocab);
      },
      py::arg("ids"), py::arg("vocab"));

  m.def(
      "align_spans_to_bio",
      [](const std::string& text, const ade::bpe::BpeVocab& vocab,
         const std::vector<std::tuple<std::string, std::size_t, std::size_t, std::string>>&
             spans) {
        auto seq = ade::bpe::encode(text, vocab);
        auto bio = ade::bpe::align_spans_to_bio(seq, spans_arg(spans), text);
        std::string tags;
        for (auto t : bio.tags) tags.push_back(ade::bpe::bio_tag_char(t));
        return tags;
      },
      py::arg("text"), py::arg("vocab"), py::arg("spans"),
      "Returns the BIO tag string, one character per token");

  // ---- resample ----------------------------------------------------------
  m.def(
      "random_oversample",
      [](const ade::corpus::LabeledDataset& ds, double ratio, std::uint64_t seed) {
        return ade::resample::random_oversample(ds, ratio, seed);
      },
      py::arg("dataset"), py::arg("ratio"), py::arg("seed"));
  m.def(
      "random_undersample",
      [](const ade::corpus::LabeledDataset& ds, double ratio, std::uint64_t seed) {
        return ade::resample::random_undersample(ds, ratio, seed);
      },
      py::arg("dataset"), py::arg("ratio"), py::arg("seed"));
  m.def(
      "apply_sampling_plan",
      [](const ade::corpus::LabeledDataset& ds, double oversample, double undersample,
         std::uint64_t seed) {
        return ade::resample::apply_plan(ds, {oversample, undersample, seed});
      },
      py::arg("dataset"), py::arg("oversample") = 0.1, py::arg("undersample") = 0.5,
      py::arg("seed") = 0);

  // ---- eval ---------------------------------------------------------------
  m.def("precision", [](long long tp, long long fp) {
    return ade::eval::precision({tp, fp, 0, std::nullopt});
  });
  m.def("recall", [](long long tp, long long fn) {
    return ade::eval::recall({tp, 0, fn, std::nullopt});
  });
  m.def("f1", &ade::eval::f1, py::arg("precision"), py::arg("recall"));
  m.def("round_display", &ade::eval::round_display, py::arg("value"), py::arg("decimals"));

  m.def(
      "score_classification",
      [](const std::map<std::string, std::string>& gold,
         const std::map<std::string, std::string>& pred, const std::string& scheme) {
        auto sch = scheme_arg(scheme);
        std::map<std::string, int> g, p;
        for (const auto& [id, label] : gold) g[id] = ade::corpus::label_index(sch, label);
        for (const auto& [id, label] : pred) p[id] = ade::corpus::label_index(sch, label);
        return report_dict(ade::eval::score_classification(g, p, sch));
      },
      py::arg("gold"), py::arg("pred"), py::arg("scheme"));

  m.def(
      "score_spans",
      [](const std::vector<std::tuple<std::string, std::size_t, std::size_t, std::string>>& gold,
         const std::vector<std::tuple<std::string, std::size_t, std::size_t, std::string>>& pred,
         const std::string& mode) {
        return report_dict(ade::eval::score_spans(spans_arg(gold), spans_arg(pred),
                                                  ade::eval::span_mode_from_name(mode)));
      },
      py::arg("gold"), py::arg("pred"), py::arg("mode") = "strict");

  // ---- models + pipeline --------------------------------------------------
  py::class_<ade::models::TrainConfig>(m, "TrainConfig")
      .def(py::init([](int epochs, double learning_rate, double l2, std::uint64_t seed,
                       std::uint32_t feature_dim, int batch_size) {
             ade::models::TrainConfig c{epochs, learning_rate, l2, seed, feature_dim, batch_size};
             ade::models::validate_config(c);
             return c;
           }),
           py::arg("epochs") = 5, py::arg("learning_rate") = 0.1, py::arg("l2") = 1e-4,
           py::arg("seed") = 42, py::arg("feature_dim") = 1u << 16, py::arg("batch_size") = 32)
      .def_readwrite("epochs", &ade::models::TrainConfig::epochs)
      .def_readwrite("seed", &ade::models::TrainConfig::seed);

  py::class_<ade::models::LinearModel>(m, "LinearModel")
      .def_property_readonly("scheme",
                             [](const ade::models::LinearModel& model) {
                               return ade::corpus::scheme_name(model.scheme);
                             })
      .def_readonly("feature_dim", &ade::models::LinearModel::feature_dim);

  py::class_<ade::models::TaggerModel>(m, "TaggerModel")
      .def_readonly("feature_dim", &ade::models::TaggerModel::feature_dim);

  m.def("train_classifier", &ade::models::train_classifier, py::arg("dataset"), py::arg("vocab"),
        py::arg("config") = ade::models::TrainConfig{});
  m.def(
      "predict_label",
      [](const ade::models::LinearModel& model, const std::string& text,
         const ade::bpe::BpeVocab& vocab) {
        auto [label, scores] = ade::models::predict_label(model, ade::bpe::encode(text, vocab));
        return py::make_tuple(ade::corpus::scheme_labels(model.scheme)[label], scores);
      },
      py::arg("model"), py::arg("text"), py::arg("vocab"));
  m.def("train_tagger", &ade::models::train_tagger, py::arg("dataset"), py::arg("vocab"),
        py::arg("config") = ade::models::TrainConfig{});
  m.def(
      "extract_spans",
      [](const ade::models::TaggerModel& model, const std::string& text,
         const ade::bpe::BpeVocab& vocab) {
        return ade::models::extract_spans(model, ade::bpe::encode(text, vocab), text);
      },
      py::arg("model"), py::arg("text"), py::arg("vocab"));

  m.def("save_classifier", &ade::models::save_classifier, py::arg("model"), py::arg("path"));
  m.def("load_classifier", &ade::models::load_classifier, py::arg("path"));
  m.def("save_tagger", &ade::models::save_tagger, py::arg("model"), py::arg("path"));
  m.def("load_tagger", &ade::models::load_tagger, py::arg("path"));

  m.def(
      "majority_vote",
      [](const std::vector<std::map<std::string, std::string>>& ballots,
         const std::string& scheme) {
        auto sch = scheme_arg(scheme);
        std::vector<std::map<std::string, ade::models::Prediction>> converted;
        for (const auto& ballot : ballots) {
          std::map<std::string, ade::models::Prediction> b;
          for (const auto& [id, label] : ballot)
            b[id] = {ade::corpus::label_index(sch, label), std::nullopt};
          converted.push_back(std::move(b));
        }
        auto result = ade::models::majority_vote(converted, sch);
        const auto& names = ade::corpus::scheme_labels(sch);
        std::map<std::string, std::string> out;
        for (const auto& [id, p] : result) out[id] = names[p.label];
        return out;
      },
      py::arg("ballots"), py::arg("scheme"));

  m.def(
      "run_pipeline",
      [](const ade::corpus::LabeledDataset& dataset, const std::string& predictions_path,
         const std::string& spans_path, const std::string& preprocess, bool strict, int jobs) {
        ade::models::FileClassifier classifier(ade::models::load_label_predictions(
            predictions_path, ade::corpus::Scheme::BinaryAde));
        ade::models::FileTagger tagger(ade::models::load_span_rows(spans_path));
        std::optional<ade::norm::NormalizationConfig> config;
        if (preprocess == "subst")
          config = config_arg("@USER", "HTTPURL", "keep", "none");
        else if (preprocess == "strip")
          config = config_arg("@USER", "HTTPURL", "keep", "strip_entities");
        else if (preprocess != "none")
          ade::fail("preprocess must be none, subst, or strip");
        auto [results, report] =
            ade::pipeline::run_batch(dataset, classifier, tagger, config, strict, jobs);
        py::list out;
        const auto& names = ade::corpus::scheme_labels(ade::corpus::Scheme::BinaryAde);
        for (const auto& r : results) {
          py::dict d;
          d["tweet_id"] = r.tweet_id;
          d["label"] = names[r.label];
          d["spans"] = r.spans;
          out.append(d);
        }
        py::dict rep;
        rep["ade"] = report.ade;
        rep["no_ade"] = report.no_ade;
        rep["spans_emitted"] = report.spans_emitted;
        rep["spans_dropped"] = report.spans_dropped;
        rep["tagger_invocations"] = report.tagger_invocations;
        rep["skipped"] = report.skipped;
        return py::make_tuple(out, rep);
      },
      py::arg("dataset"), py::arg("predictions_path"), py::arg("spans_path"),
      py::arg("preprocess") = "none", py::arg("strict") = true, py::arg("jobs") = 1,
      "Replay prediction files through the classify-then-extract pipeline");
}
