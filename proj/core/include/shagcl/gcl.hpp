#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "shagcl/grouping.hpp"
#include "shagcl/nn.hpp"
#include "shagcl/pipeline.hpp"
#include "shagcl/sampler.hpp"

namespace shagcl {

enum class MatchStrategy { kAdjacent, kTopDown };

MatchStrategy parse_strategy(const std::string& name);  // ConfigError on unknown
std::string strategy_name(MatchStrategy strategy);

/// Teacher/student classifier pairs (m, n) with m < n, 0-based.
struct MatchingSet {
    MatchStrategy strategy = MatchStrategy::kTopDown;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    std::size_t size() const { return pairs.size(); }
};

/// adjacent: chain (k, k+1); topdown: all (m, n) with m < n. K=1 gives an
/// empty set under both.
MatchingSet build_matching_set(std::size_t classifier_count, MatchStrategy strategy);

/// One predicate classifier: pair features and union features are each mapped
/// to |P'_k| logits and combined by element-wise product.
struct PredicateClassifier {
    Linear pair_fc;     // [2 * model_dim] -> |P'_k|
    Linear union_proj;  // [union_dim] -> |P'_k|
};

/// Nested classifiers C_0..C_{K-1} over the cumulative classification spaces.
/// Classifier k's class list is a strict prefix of classifier k+1's.
struct ClassifierBank {
    GroupPartition partition;
    std::vector<PredicateClassifier> classifiers;

    static ClassifierBank init(const GroupPartition& partition, std::size_t model_dim,
                               std::size_t union_dim, Rng& rng);
    std::size_t classifier_count() const { return classifiers.size(); }
    std::size_t space_size(std::size_t k) const { return partition.space_sizes.at(k); }
    void collect(ParamMap& params) const;
};

/// Pre-softmax logits of classifier k: FC_k([x'_i, x'_j]) (element-wise *) Proj_k(u_ij).
Tensor classifier_logits(const ClassifierBank& bank, std::size_t k, const PairBatch& batch);
/// Row-wise softmax of classifier_logits.
Tensor classifier_probs(const ClassifierBank& bank, std::size_t k, const PairBatch& batch);

/// Student distribution over P'_m from classifier n (m < n): logits restricted
/// to the first |P'_m| classes, then softmax over that restriction.
Tensor slice_distribution(const ClassifierBank& bank, std::size_t n, std::size_t m,
                          const PairBatch& batch);

/// Mean cross-entropy of `probs` rows against integer labels.
Tensor mean_cross_entropy(const Tensor& probs, const std::vector<std::size_t>& labels);

/// Sum over classifiers of the mean cross-entropy on their re-sampled sets.
/// An empty D_k contributes zero and emits a warning on `warn`.
Tensor pco_loss(const ClassifierBank& bank, const PairBatch& batch, const SampledEpoch& epoch,
                std::ostream* warn = nullptr);

/// Mean over matching pairs (m, n) of the mean soft cross-entropy
/// -sum_l w_m^l log w_hat_n^l over D_n, teacher w_m held constant.
Tensor ckd_loss(const ClassifierBank& bank, const PairBatch& batch, const SampledEpoch& epoch,
                const MatchingSet& matching, std::ostream* warn = nullptr);

struct GclLossReport {
    Tensor pco;
    Tensor ckd;
    Tensor total;
    double alpha = 1.0;

    double pco_value() const { return pco.value(); }
    double ckd_value() const { return ckd.value(); }
    double total_value() const { return total.value(); }
};

/// total = pco + alpha * ckd. With `include_ckd` false (the w/o-CKD ablation)
/// the distillation term is skipped entirely and reported as 0.
GclLossReport gcl_loss(const ClassifierBank& bank, const PairBatch& batch,
                       const SampledEpoch& epoch, const MatchingSet& matching, double alpha,
                       bool include_ckd = true, std::ostream* warn = nullptr);

/// Per-pair evaluation output of the last classifier C_K.
struct PredictionSet {
    std::vector<std::size_t> predicted;  // argmax class per pair (vocabulary rank)
    std::vector<double> confidence;      // probability of the argmax class
    Tensor scores;                       // [p, M] distributions
};

PredictionSet predict_predicates(const ClassifierBank& bank, const PairBatch& batch);

}  // namespace shagcl
