#pragma once

#include <cstdint>

#include "ademiner/corpus.hpp"

namespace ade::resample {

// Two-stage oversample/undersample plan. Ratios are minority/majority
// targets after each stage; only defined for two-class datasets.
struct SamplingPlan {
  double oversample_ratio = 0.1;
  double undersample_ratio = 0.5;
  std::uint64_t seed = 0;
};

void validate_plan(const SamplingPlan& plan);

// Duplicates minority rows (uniform, with replacement, seeded) until
// minority = round(ratio * majority), rounding half-up. Originals are always
// retained; duplicated rows get fresh ids (`id~dupN`). The output is
// reshuffled with the same seeded stream. Returns the input unchanged when
// the minority already meets the target.
corpus::LabeledDataset random_oversample(const corpus::LabeledDataset& dataset, double ratio,
                                         std::uint64_t seed);

// Drops majority rows (uniform, without replacement, seeded) down to
// round(minority / ratio), then reshuffles.
corpus::LabeledDataset random_undersample(const corpus::LabeledDataset& dataset, double ratio,
                                          std::uint64_t seed);

// random_oversample with plan.seed, then random_undersample with plan.seed+1.
corpus::LabeledDataset apply_plan(const corpus::LabeledDataset& dataset,
                                  const SamplingPlan& plan);

}  // namespace ade::resample
