#include "ademiner/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ademiner/error.hpp"

namespace ade::eval {

namespace {

using nlohmann::json;

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

json counts_to_json(const ConfusionCounts& c) {
  json j{{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
  if (c.tn) j["tn"] = *c.tn;
  return j;
}

json class_report_to_json(const ClassReport& r, bool aggregated) {
  json j;
  if (!aggregated) j = counts_to_json(r.counts);
  j["precision"] = r.metrics.precision;
  j["recall"] = r.metrics.recall;
  j["f1"] = r.metrics.f1;
  return j;
}

ClassReport class_report_from_json(const json& j, bool aggregated) {
  ClassReport r;
  if (!aggregated) {
    r.counts.tp = j.at("tp").get<long long>();
    r.counts.fp = j.at("fp").get<long long>();
    r.counts.fn = j.at("fn").get<long long>();
    if (j.contains("tn")) r.counts.tn = j.at("tn").get<long long>();
  }
  r.metrics.precision = j.at("precision").get<double>();
  r.metrics.recall = j.at("recall").get<double>();
  r.metrics.f1 = j.at("f1").get<double>();
  return r;
}

bool mode_matches(const corpus::SpanAnnotation& pred, const corpus::SpanAnnotation& gold,
                  SpanMatchMode mode) {
  if (mode == SpanMatchMode::Strict) return pred.start == gold.start && pred.end == gold.end;
  return pred.start < gold.end && gold.start < pred.end;  // >=1 shared position
}

}  // namespace

double precision(const ConfusionCounts& c) {
  long long denom = c.tp + c.fp;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double recall(const ConfusionCounts& c) {
  long long denom = c.tp + c.fn;
  return denom == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

ClassMetrics metrics_from_counts(const ConfusionCounts& c) {
  ClassMetrics m;
  m.precision = precision(c);
  m.recall = recall(c);
  m.f1 = f1(m.precision, m.recall);
  return m;
}

double round_display(double value, int decimals) {
  double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5) / scale;
}

SpanMatchMode span_mode_from_name(const std::string& name) {
  if (name == "strict") return SpanMatchMode::Strict;
  if (name == "relaxed") return SpanMatchMode::Relaxed;
  fail("unknown span match mode '" + name + "' (expected strict or relaxed)");
}

const std::string& span_mode_name(SpanMatchMode mode) {
  static const std::string kStrict = "strict";
  static const std::string kRelaxed = "relaxed";
  return mode == SpanMatchMode::Strict ? kStrict : kRelaxed;
}

MetricsReport score_classification(const std::map<std::string, int>& gold,
                                   const std::map<std::string, int>& pred,
                                   corpus::Scheme scheme) {
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  for (const auto& [id, label] : gold)
    if (!pred.count(id)) missing.push_back(id);
  for (const auto& [id, label] : pred)
    if (!gold.count(id)) extra.push_back(id);
  if (!missing.empty() || !extra.empty()) {
    auto preview = [](const std::vector<std::string>& ids) {
      std::string out;
      for (std::size_t i = 0; i < ids.size() && i < 5; ++i)
        out += (i ? ", " : "") + ids[i];
      if (ids.size() > 5) out += ", ...";
      return out;
    };
    fail("gold/pred id mismatch: " + std::to_string(missing.empty() ? 0 : missing.size()) +
         " missing from pred [" + preview(missing) + "], " + std::to_string(extra.size()) +
         " extra in pred [" + preview(extra) + "]");
  }

  MetricsReport report;
  report.task = "classification";
  const auto& names = corpus::scheme_labels(scheme);
  for (std::size_t c = 0; c < names.size(); ++c) {
    ConfusionCounts counts;
    counts.tn = 0;
    for (const auto& [id, g] : gold) {
      int p = pred.at(id);
      bool gold_c = g == static_cast<int>(c);
      bool pred_c = p == static_cast<int>(c);
      if (gold_c && pred_c)
        ++counts.tp;
      else if (!gold_c && pred_c)
        ++counts.fp;
      else if (gold_c && !pred_c)
        ++counts.fn;
      else
        ++*counts.tn;
    }
    report.per_class[names[c]] = {counts, metrics_from_counts(counts)};
  }
  if (scheme == corpus::Scheme::BinaryAde) report.focus_class = "ADE";
  return report;
}

MetricsReport score_spans(const std::vector<corpus::SpanAnnotation>& gold,
                          const std::vector<corpus::SpanAnnotation>& pred, SpanMatchMode mode) {
  for (const auto* side : {&gold, &pred})
    for (const auto& s : *side)
      if (s.start >= s.end)
        fail("invalid span (" + std::to_string(s.start) + "," + std::to_string(s.end) +
             ") for tweet '" + s.tweet_id + "'");

  std::map<std::string, std::vector<corpus::SpanAnnotation>> gold_by_tweet;
  std::map<std::string, std::vector<corpus::SpanAnnotation>> pred_by_tweet;
  for (const auto& s : gold) gold_by_tweet[s.tweet_id].push_back(s);
  for (const auto& s : pred) pred_by_tweet[s.tweet_id].push_back(s);

  std::set<std::string> ids;
  for (const auto& [id, spans] : gold_by_tweet) ids.insert(id);
  for (const auto& [id, spans] : pred_by_tweet) ids.insert(id);

  auto by_range = [](const corpus::SpanAnnotation& a, const corpus::SpanAnnotation& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  };

  ConfusionCounts micro;
  for (const auto& id : ids) {
    auto golds = gold_by_tweet.count(id) ? gold_by_tweet[id] : std::vector<corpus::SpanAnnotation>{};
    auto preds = pred_by_tweet.count(id) ? pred_by_tweet[id] : std::vector<corpus::SpanAnnotation>{};
    std::sort(golds.begin(), golds.end(), by_range);
    std::sort(preds.begin(), preds.end(), by_range);
    preds.erase(std::unique(preds.begin(), preds.end(),
                            [](const corpus::SpanAnnotation& a, const corpus::SpanAnnotation& b) {
                              return a.start == b.start && a.end == b.end;
                            }),
                preds.end());

    std::vector<bool> gold_used(golds.size(), false);
    for (const auto& p : preds) {
      bool matched = false;
      for (std::size_t g = 0; g < golds.size(); ++g) {
        if (gold_used[g] || !mode_matches(p, golds[g], mode)) continue;
        gold_used[g] = true;
        matched = true;
        break;
      }
      if (matched)
        ++micro.tp;
      else
        ++micro.fp;
    }
    for (bool used : gold_used)
      if (!used) ++micro.fn;
  }

  MetricsReport report;
  report.task = "spans";
  report.micro = ClassReport{micro, metrics_from_counts(micro)};
  return report;
}

MetricsReport median_aggregate(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) fail("median aggregation needs at least one report");
  const MetricsReport& first = reports.front();
  for (const auto& r : reports) {
    if (r.task != first.task) fail("report shape mismatch: tasks differ");
    if (r.micro.has_value() != first.micro.has_value())
      fail("report shape mismatch: micro section differs");
    if (r.per_class.size() != first.per_class.size())
      fail("report shape mismatch: class sets differ");
    for (const auto& [name, cls] : first.per_class)
      if (!r.per_class.count(name)) fail("report shape mismatch: missing class '" + name + "'");
  }

  auto median_report = [&](auto getter) {
    ClassReport out;
    std::vector<double> p, r, f;
    for (const auto& rep : reports) {
      const ClassReport& cls = getter(rep);
      p.push_back(cls.metrics.precision);
      r.push_back(cls.metrics.recall);
      f.push_back(cls.metrics.f1);
    }
    out.metrics = {median_of(p), median_of(r), median_of(f)};
    return out;
  };

  MetricsReport out;
  out.task = first.task;
  out.aggregated = true;
  out.focus_class = first.focus_class;
  for (const auto& [name, cls] : first.per_class)
    out.per_class[name] =
        median_report([&](const MetricsReport& rep) -> const ClassReport& {
          return rep.per_class.at(name);
        });
  if (first.micro)
    out.micro = median_report(
        [](const MetricsReport& rep) -> const ClassReport& { return *rep.micro; });
  return out;
}

std::string report_to_json(const MetricsReport& report) {
  json j;
  j["task"] = report.task;
  j["aggregated"] = report.aggregated;
  if (report.focus_class) j["focus_class"] = *report.focus_class;
  json per_class = json::object();
  for (const auto& [name, cls] : report.per_class)
    per_class[name] = class_report_to_json(cls, report.aggregated);
  j["per_class"] = per_class;
  if (report.micro) j["micro"] = class_report_to_json(*report.micro, report.aggregated);
  return j.dump(2);
}

MetricsReport report_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("bad report JSON: ") + e.what());
  }
  MetricsReport report;
  try {
    report.task = j.at("task").get<std::string>();
    report.aggregated = j.value("aggregated", false);
    if (j.contains("focus_class")) report.focus_class = j.at("focus_class").get<std::string>();
    for (const auto& [name, cls] : j.at("per_class").items())
      report.per_class[name] = class_report_from_json(cls, report.aggregated);
    if (j.contains("micro"))
      report.micro = class_report_from_json(j.at("micro"), report.aggregated);
  } catch (const json::exception& e) {
    fail(std::string("bad report JSON: ") + e.what());
  }
  return report;
}

std::string report_to_table(const MetricsReport& report) {
  std::ostringstream out;
  auto row = [&](const std::string& name, const ClassReport& cls, bool headline) {
    out << std::left << std::setw(14) << name << std::right << std::fixed
        << std::setprecision(4) << std::setw(10) << round_display(cls.metrics.precision, 4)
        << std::setw(10) << round_display(cls.metrics.recall, 4) << std::setprecision(2)
        << std::setw(8) << round_display(cls.metrics.f1, 2);
    if (!report.aggregated) {
      out << "   tp=" << cls.counts.tp << " fp=" << cls.counts.fp << " fn=" << cls.counts.fn;
      if (cls.counts.tn) out << " tn=" << *cls.counts.tn;
    }
    if (headline) out << "   <- focus";
    out << '\n';
  };
  out << std::left << std::setw(14) << (report.task == "spans" ? "span set" : "class")
      << std::right << std::setw(10) << "P" << std::setw(10) << "R" << std::setw(8) << "F1"
      << '\n';
  for (const auto& [name, cls] : report.per_class)
    row(name, cls, report.focus_class && *report.focus_class == name);
  if (report.micro) row("micro", *report.micro, false);
  return out.str();
}

}  // namespace ade::eval
