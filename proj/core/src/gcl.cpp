#include "shagcl/gcl.hpp"

#include <ostream>

namespace shagcl {

MatchStrategy parse_strategy(const std::string& name) {
    if (name == "adjacent") return MatchStrategy::kAdjacent;
    if (name == "topdown") return MatchStrategy::kTopDown;
    throw ConfigError("unknown matching strategy '" + name + "' (expected adjacent|topdown)");
}

std::string strategy_name(MatchStrategy strategy) {
    return strategy == MatchStrategy::kAdjacent ? "adjacent" : "topdown";
}

MatchingSet build_matching_set(std::size_t classifier_count, MatchStrategy strategy) {
    if (classifier_count == 0) throw ConfigError("matching set needs at least one classifier");
    MatchingSet set;
    set.strategy = strategy;
    if (strategy == MatchStrategy::kAdjacent) {
        for (std::size_t k = 0; k + 1 < classifier_count; ++k) set.pairs.emplace_back(k, k + 1);
    } else {
        for (std::size_t m = 0; m < classifier_count; ++m)
            for (std::size_t n = m + 1; n < classifier_count; ++n) set.pairs.emplace_back(m, n);
    }
    return set;
}

ClassifierBank ClassifierBank::init(const GroupPartition& partition, std::size_t model_dim,
                                    std::size_t union_dim, Rng& rng) {
    ClassifierBank bank;
    bank.partition = partition;
    bank.classifiers.reserve(partition.group_count());
    for (std::size_t k = 0; k < partition.group_count(); ++k) {
        PredicateClassifier classifier;
        classifier.pair_fc = Linear::init(2 * model_dim, partition.space_sizes[k], rng);
        classifier.union_proj = Linear::init(union_dim, partition.space_sizes[k], rng);
        bank.classifiers.push_back(std::move(classifier));
    }
    return bank;
}

void ClassifierBank::collect(ParamMap& params) const {
    for (std::size_t k = 0; k < classifiers.size(); ++k) {
        const std::string prefix = "bank.c" + std::to_string(k);
        classifiers[k].pair_fc.collect(prefix + ".pair_fc", params);
        classifiers[k].union_proj.collect(prefix + ".union_proj", params);
    }
}

Tensor classifier_logits(const ClassifierBank& bank, std::size_t k, const PairBatch& batch) {
    if (k >= bank.classifier_count()) {
        throw IndexError("classifier index " + std::to_string(k) + " out of range for K=" +
                         std::to_string(bank.classifier_count()));
    }
    const auto& classifier = bank.classifiers[k];
    return mul(classifier.pair_fc(batch.features), classifier.union_proj(batch.unions));
}

Tensor classifier_probs(const ClassifierBank& bank, std::size_t k, const PairBatch& batch) {
    return softmax(classifier_logits(bank, k, batch), 1);
}

Tensor slice_distribution(const ClassifierBank& bank, std::size_t n, std::size_t m,
                          const PairBatch& batch) {
    if (n >= bank.classifier_count()) {
        throw IndexError("student classifier " + std::to_string(n) + " out of range");
    }
    if (m >= n) {
        throw IndexError("teacher classifier " + std::to_string(m) +
                         " must precede student " + std::to_string(n));
    }
    Tensor logits = classifier_logits(bank, n, batch);
    return softmax(slice_cols(logits, 0, bank.space_size(m)), 1);
}

Tensor mean_cross_entropy(const Tensor& probs, const std::vector<std::size_t>& labels) {
    const std::size_t p = probs.rows(), c = probs.cols();
    if (labels.size() != p) throw ShapeError("label count does not match probability rows");
    std::vector<double> one_hot(p * c, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        if (labels[i] >= c) {
            throw DataError("label " + std::to_string(labels[i]) + " outside " +
                            std::to_string(c) + " classes");
        }
        one_hot[i * c + labels[i]] = 1.0;
    }
    Tensor mask = Tensor::from({p, c}, std::move(one_hot));
    return scale(sum(mul(mask, log(probs))), -1.0 / static_cast<double>(p));
}

Tensor pco_loss(const ClassifierBank& bank, const PairBatch& batch, const SampledEpoch& epoch,
                std::ostream* warn) {
    if (epoch.per_classifier.size() != bank.classifier_count()) {
        throw DataError("epoch was drawn for a different classifier count");
    }
    Tensor total = Tensor::scalar(0.0);
    for (std::size_t k = 0; k < bank.classifier_count(); ++k) {
        const auto& kept = epoch.per_classifier[k];
        if (kept.empty()) {
            if (warn) {
                *warn << "[pco] classifier " << k << ": empty re-sampled set, term skipped\n";
            }
            continue;
        }
        PairBatch subset = gather_pairs(batch, kept);
        total = add(total, mean_cross_entropy(classifier_probs(bank, k, subset), subset.labels));
    }
    return total;
}

Tensor ckd_loss(const ClassifierBank& bank, const PairBatch& batch, const SampledEpoch& epoch,
                const MatchingSet& matching, std::ostream* warn) {
    if (matching.pairs.empty()) return Tensor::scalar(0.0);
    Tensor total = Tensor::scalar(0.0);
    for (const auto& [m, n] : matching.pairs) {
        if (n >= bank.classifier_count()) {
            throw IndexError("matching pair references classifier " + std::to_string(n) +
                             " beyond K=" + std::to_string(bank.classifier_count()));
        }
        const auto& kept = epoch.per_classifier.at(n);
        if (kept.empty()) {
            if (warn) {
                *warn << "[ckd] classifier " << n << ": empty re-sampled set, term skipped\n";
            }
            continue;
        }
        PairBatch subset = gather_pairs(batch, kept);
        // teacher distribution is a constant target: no gradient flows into C_m
        Tensor teacher = classifier_probs(bank, m, subset).detach();
        Tensor student = slice_distribution(bank, n, m, subset);
        Tensor pair_term =
            scale(sum(mul(teacher, log(student))), -1.0 / static_cast<double>(kept.size()));
        total = add(total, pair_term);
    }
    return scale(total, 1.0 / static_cast<double>(matching.pairs.size()));
}

GclLossReport gcl_loss(const ClassifierBank& bank, const PairBatch& batch,
                       const SampledEpoch& epoch, const MatchingSet& matching, double alpha,
                       bool include_ckd, std::ostream* warn) {
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    GclLossReport report;
    report.alpha = alpha;
    report.pco = pco_loss(bank, batch, epoch, warn);
    report.ckd = include_ckd ? ckd_loss(bank, batch, epoch, matching, warn) : Tensor::scalar(0.0);
    report.total = add(report.pco, scale(report.ckd, alpha));
    return report;
}

PredictionSet predict_predicates(const ClassifierBank& bank, const PairBatch& batch) {
    const std::size_t last = bank.classifier_count() - 1;
    PredictionSet set;
    set.scores = classifier_probs(bank, last, batch);
    const std::size_t p = set.scores.rows(), m = set.scores.cols();
    set.predicted.resize(p);
    set.confidence.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        const double* row = set.scores.data().data() + i * m;
        set.predicted[i] = argmax_lowest(row, m);
        set.confidence[i] = row[set.predicted[i]];
    }
    return set;
}

}  // namespace shagcl
