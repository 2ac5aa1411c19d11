#include "shagcl/sampler.hpp"

#include "shagcl/rng.hpp"

namespace shagcl {

long long median_count(const std::vector<PredicateClass>& space) {
    if (space.empty()) throw ConfigError("median of an empty classification space");
    const std::size_t n = space.size();
    const std::size_t position = (n + 1) / 2;  // 1-based ceil(n/2)
    return space[position - 1].count;
}

std::vector<double> sampling_rates(const std::vector<PredicateClass>& space, long long median) {
    std::vector<double> rates(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) {
        rates[i] = median < space[i].count
                       ? static_cast<double>(median) / static_cast<double>(space[i].count)
                       : 1.0;
    }
    return rates;
}

SamplingPlan build_sampling_plan(const GroupPartition& partition) {
    SamplingPlan plan;
    plan.per_classifier.reserve(partition.group_count());
    for (std::size_t k = 0; k < partition.group_count(); ++k) {
        auto space = classification_space(partition, k);
        SamplingPlan::PerClassifier entry;
        entry.median = median_count(space);
        entry.rates = sampling_rates(space, entry.median);
        plan.per_classifier.push_back(std::move(entry));
    }
    return plan;
}

SampledEpoch draw_epoch(const std::vector<std::size_t>& labels, const SamplingPlan& plan,
                        const GroupPartition& partition, std::uint64_t seed) {
    const std::size_t num_classes = partition.num_classes();
    for (std::size_t label : labels) {
        if (label >= num_classes) {
            throw DataError("sample label rank " + std::to_string(label) +
                            " outside the vocabulary of " + std::to_string(num_classes) +
                            " classes");
        }
    }
    SampledEpoch epoch;
    epoch.seed = seed;
    epoch.per_classifier.resize(plan.classifier_count());
    for (std::size_t k = 0; k < plan.classifier_count(); ++k) {
        Rng rng(stable_hash(seed, 0x5a3713ull, k));
        const auto& rates = plan.per_classifier[k].rates;
        auto& kept = epoch.per_classifier[k];
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const std::size_t label = labels[i];
            if (label >= rates.size()) continue;  // outside P'_k
            if (rates[label] >= 1.0 || rng.bernoulli(rates[label])) kept.push_back(i);
        }
    }
    return epoch;
}

}  // namespace shagcl
