#pragma once

#include <cstdint>
#include <vector>

#include "shagcl/grouping.hpp"

namespace shagcl {

/// Median count of a non-empty class list sorted descending by count:
/// the value at 1-based position ceil(n/2).
long long median_count(const std::vector<PredicateClass>& space);

/// Per-class keep rates against a median: median/count when median < count,
/// else 1.0. Indexed like `space`.
std::vector<double> sampling_rates(const std::vector<PredicateClass>& space, long long median);

/// Keep rates for every classifier of a partition.
struct SamplingPlan {
    struct PerClassifier {
        long long median = 0;
        std::vector<double> rates;  // indexed by vocabulary rank, size |P'_k|
    };
    std::vector<PerClassifier> per_classifier;

    std::size_t classifier_count() const { return per_classifier.size(); }
};

SamplingPlan build_sampling_plan(const GroupPartition& partition);

/// One re-sampled pass over a labelled sample set: for each classifier k, the
/// indices kept for its training set D_k.
struct SampledEpoch {
    std::vector<std::vector<std::size_t>> per_classifier;
    std::uint64_t seed = 0;
};

/// Independent Bernoulli keep per sample and classifier, seeded per (seed, k).
/// `labels` are vocabulary ranks; a rank outside the vocabulary raises
/// DataError. Samples whose label falls outside P'_k are never in D_k.
SampledEpoch draw_epoch(const std::vector<std::size_t>& labels, const SamplingPlan& plan,
                        const GroupPartition& partition, std::uint64_t seed);

}  // namespace shagcl
