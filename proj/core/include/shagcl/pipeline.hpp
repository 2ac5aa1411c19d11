#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shagcl/attention.hpp"
#include "shagcl/config.hpp"
#include "shagcl/dataio.hpp"
#include "shagcl/nn.hpp"

namespace shagcl {

/// What the (simulated) proposal network hands the encoders for one object.
struct Proposal {
    std::vector<double> visual;      // synthetic appearance feature
    std::array<double, 4> spatial{}; // box, normalized to [0, 1]
    std::size_t initial_label = 0;   // l_i
    std::size_t gt_label = 0;        // kept for supervision and predcls
};

/// Deterministic synthetic appearance model: every object/predicate class owns
/// a fixed latent direction, and an object's feature is the signal-weighted sum
/// of the directions it participates in plus isotropic noise.
struct FeatureSynth {
    std::size_t feature_dim = 16;
    double signal = 1.0;
    double noise = 0.3;

    std::vector<double> direction(std::uint64_t role_tag, std::size_t class_id) const;
    std::vector<double> object_feature(const SceneRecord& scene, std::size_t object_index) const;
};

/// predcls: GT boxes and labels; sgcls: GT boxes, labels flipped with
/// probability label_noise; sgdet_sim: additionally jitters the boxes.
std::vector<Proposal> generate_proposals(const SceneRecord& scene, TaskMode mode,
                                         const FeatureSynth& synth, double label_noise,
                                         double box_jitter, std::size_t num_object_classes,
                                         std::uint64_t seed);

/// One subject/object pair with its ground-truth predicate (vocabulary rank).
struct RelationSample {
    std::size_t subject = 0;
    std::size_t object = 0;
    std::size_t label = 0;
};

/// Batched pair inputs to the relation decoder.
struct PairBatch {
    Tensor features;  // [p, 2 * model_dim], concat(x'_i, x'_j)
    Tensor unions;    // [p, union_dim]
    std::vector<std::size_t> labels;

    std::size_t size() const { return labels.size(); }
};

PairBatch gather_pairs(const PairBatch& batch, const std::vector<std::size_t>& ids);
PairBatch concat_pair_batches(const std::vector<PairBatch>& batches);

/// Trainable encoder-side parameters of the SGG pipeline.
struct SggModel {
    std::size_t model_dim = 0;
    std::size_t union_dim = 0;
    std::size_t num_object_classes = 0;

    Linear spatial_fc;        // 4 -> spatial_dim
    Linear obj_visual_proj;   // feature_dim + spatial_dim -> model_dim
    Linear obj_semantic_proj; // embed_dim -> model_dim
    Embedding label_embed;    // object classes -> embed_dim (shared by both encoders)
    ShaStack object_encoder;
    Linear object_decoder;    // model_dim -> num_object_classes
    Linear rel_visual_proj;   // feature_dim + model_dim -> model_dim
    Linear rel_semantic_proj; // embed_dim -> model_dim
    ShaStack relation_encoder;
    Linear union_proj;        // 2 * feature_dim + 4 -> union_dim

    static SggModel init(const RunConfig& config, Rng& rng);
    void collect(ParamMap& params) const;
};

/// Refined object features x_i: visual stream concat(v_i, FC(s_i)) and
/// semantic stream Emb(l_i), both projected to model_dim and fused by the
/// object-encoder stack.
Tensor encode_objects(const SggModel& model, const std::vector<Proposal>& proposals);

Tensor object_logits(const SggModel& model, const Tensor& refined);
/// argmax per row; ties break to the lowest class index.
std::vector<std::size_t> decode_object_labels(const SggModel& model, const Tensor& refined);

/// Final object features x'_i from concat(v_i, x_i) and Emb(l'_i) through the
/// relation-encoder stack. `labels` are l'_i (ground truth under predcls).
Tensor encode_relations(const SggModel& model, const std::vector<Proposal>& proposals,
                        const Tensor& refined, const std::vector<std::size_t>& labels);

/// Union feature u_ij: learned projection of concat(v_i, v_j, union box).
Tensor union_features(const SggModel& model, const std::vector<Proposal>& proposals,
                      const std::vector<RelationSample>& pairs);

PairBatch build_pair_batch(const SggModel& model, const std::vector<Proposal>& proposals,
                           const Tensor& entity_features,
                           const std::vector<RelationSample>& pairs);

std::size_t argmax_lowest(const double* values, std::size_t n);

}  // namespace shagcl
