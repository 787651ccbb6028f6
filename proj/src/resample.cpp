#include "ademiner/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ademiner/error.hpp"
#include "ademiner/rng.hpp"

namespace ade::resample {

namespace {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

struct ClassSplit {
  int minority_label;
  int majority_label;
  std::vector<std::size_t> minority;  // row indices, input order
  std::vector<std::size_t> majority;
};

ClassSplit split_two_classes(const corpus::LabeledDataset& dataset) {
  if (!dataset.has_labels) fail("resampling requires a labeled dataset");
  std::map<int, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < dataset.labels.size(); ++i)
    by_label[dataset.labels[i]].push_back(i);
  if (by_label.size() != 2)
    fail("resampling is only defined for two-class datasets, got " +
         std::to_string(by_label.size()) + " class(es)");
  auto it = by_label.begin();
  auto& [label_a, rows_a] = *it;
  auto& [label_b, rows_b] = *std::next(it);
  ClassSplit split;
  if (rows_a.size() <= rows_b.size()) {
    split = {label_a, label_b, std::move(rows_a), std::move(rows_b)};
  } else {
    split = {label_b, label_a, std::move(rows_b), std::move(rows_a)};
  }
  return split;
}

corpus::LabeledDataset rebuild(const corpus::LabeledDataset& dataset,
                               std::vector<std::size_t> row_order,
                               const std::vector<std::size_t>& duplicated, Pcg32& rng) {
  // row_order holds surviving original rows (input order); duplicated holds
  // extra copies appended after them. The final order is a seeded shuffle.
  struct Row {
    std::size_t source;
    std::size_t copy;  // 0 = original, n = nth duplicate of that source
  };
  std::vector<Row> rows;
  rows.reserve(row_order.size() + duplicated.size());
  for (std::size_t idx : row_order) rows.push_back({idx, 0});
  std::map<std::size_t, std::size_t> copy_counter;
  for (std::size_t idx : duplicated) rows.push_back({idx, ++copy_counter[idx]});
  rng.shuffle(rows);

  corpus::LabeledDataset out;
  out.scheme = dataset.scheme;
  out.has_labels = dataset.has_labels;
  out.tweets.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (const auto& row : rows) {
    corpus::Tweet t = dataset.tweets[row.source];
    if (row.copy > 0) t.id += "~dup" + std::to_string(row.copy);
    out.tweets.push_back(std::move(t));
    out.labels.push_back(dataset.labels[row.source]);
  }
  return out;
}

}  // namespace

void validate_plan(const SamplingPlan& plan) {
  for (double r : {plan.oversample_ratio, plan.undersample_ratio})
    if (!(r > 0.0 && r <= 1.0)) fail("sampling ratios must lie in (0, 1]");
}

corpus::LabeledDataset random_oversample(const corpus::LabeledDataset& dataset, double ratio,
                                         std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) fail("sampling ratios must lie in (0, 1]");
  ClassSplit split = split_two_classes(dataset);
  std::size_t target = round_half_up(ratio * static_cast<double>(split.majority.size()));
  if (split.minority.size() >= target) return dataset;

  Pcg32 rng(seed);
  std::vector<std::size_t> duplicated;
  duplicated.reserve(target - split.minority.size());
  auto minority_count = static_cast<std::uint32_t>(split.minority.size());
  for (std::size_t k = split.minority.size(); k < target; ++k)
    duplicated.push_back(split.minority[rng.bounded(minority_count)]);

  std::vector<std::size_t> originals(dataset.size());
  std::iota(originals.begin(), originals.end(), 0);
  return rebuild(dataset, std::move(originals), duplicated, rng);
}

corpus::LabeledDataset random_undersample(const corpus::LabeledDataset& dataset, double ratio,
                                          std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) fail("sampling ratios must lie in (0, 1]");
  ClassSplit split = split_two_classes(dataset);
  std::size_t target = round_half_up(static_cast<double>(split.minority.size()) / ratio);
  if (split.majority.size() <= target) return dataset;

  Pcg32 rng(seed);
  std::vector<std::size_t> pool = split.majority;
  rng.shuffle(pool);
  pool.resize(target);
  std::sort(pool.begin(), pool.end());  // survivors keep input order pre-shuffle

  std::vector<bool> keep(dataset.size(), false);
  for (std::size_t idx : split.minority) keep[idx] = true;
  for (std::size_t idx : pool) keep[idx] = true;
  std::vector<std::size_t> survivors;
  survivors.reserve(split.minority.size() + target);
  for (std::size_t i = 0; i < dataset.size(); ++i)
    if (keep[i]) survivors.push_back(i);
  return rebuild(dataset, std::move(survivors), {}, rng);
}

corpus::LabeledDataset apply_plan(const corpus::LabeledDataset& dataset,
                                  const SamplingPlan& plan) {
  validate_plan(plan);
  auto oversampled = random_oversample(dataset, plan.oversample_ratio, plan.seed);
  return random_undersample(oversampled, plan.undersample_ratio, plan.seed + 1);
}

}  // namespace ade::resample
