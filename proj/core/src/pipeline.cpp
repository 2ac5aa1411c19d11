#include "shagcl/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace shagcl {

namespace {
constexpr std::uint64_t kRoleObjectClass = 1;
constexpr std::uint64_t kRolePredicateSubject = 2;
constexpr std::uint64_t kRolePredicateObject = 3;
constexpr std::uint64_t kProposalSalt = 0x9e0905ull;
}  // namespace

std::vector<double> FeatureSynth::direction(std::uint64_t role_tag, std::size_t class_id) const {
    Rng rng(stable_hash(0xd1239cull, role_tag, class_id));
    std::vector<double> dir(feature_dim);
    double norm_sq = 0.0;
    for (double& v : dir) {
        v = rng.normal();
        norm_sq += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq > 0 ? norm_sq : 1.0);
    for (double& v : dir) v *= inv;
    return dir;
}

std::vector<double> FeatureSynth::object_feature(const SceneRecord& scene,
                                                 std::size_t object_index) const {
    const SceneObject& obj = scene.objects.at(object_index);
    std::vector<double> feature(feature_dim, 0.0);

    auto accumulate = [&](std::uint64_t role, std::size_t cls) {
        const auto dir = direction(role, cls);
        for (std::size_t d = 0; d < feature_dim; ++d) feature[d] += signal * dir[d];
    };
    accumulate(kRoleObjectClass, obj.class_id);
    for (const auto& rel : scene.relations) {
        if (rel.subject == object_index) accumulate(kRolePredicateSubject, rel.predicate);
        if (rel.object == object_index) accumulate(kRolePredicateObject, rel.predicate);
    }

    Rng rng(obj.latent_seed);
    for (std::size_t d = 0; d < feature_dim; ++d) feature[d] += noise * rng.normal();
    return feature;
}

std::vector<Proposal> generate_proposals(const SceneRecord& scene, TaskMode mode,
                                         const FeatureSynth& synth, double label_noise,
                                         double box_jitter, std::size_t num_object_classes,
                                         std::uint64_t seed) {
    if (scene.objects.size() < 2) {
        throw DataError("scene " + std::to_string(scene.image_id) +
                        " has fewer than 2 objects");
    }
    std::vector<Proposal> proposals;
    proposals.reserve(scene.objects.size());
    Rng rng(stable_hash(seed, kProposalSalt, static_cast<std::uint64_t>(scene.image_id)));
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const SceneObject& obj = scene.objects[i];
        if (obj.class_id >= num_object_classes) {
            throw DataError("object class id " + std::to_string(obj.class_id) +
                            " out of range");
        }
        Proposal prop;
        prop.visual = synth.object_feature(scene, i);
        prop.spatial = obj.box;
        prop.gt_label = obj.class_id;
        prop.initial_label = obj.class_id;

        if (mode == TaskMode::kSgCls || mode == TaskMode::kSgDetSim) {
            if (num_object_classes > 1 && rng.bernoulli(label_noise)) {
                std::size_t flipped = rng.index(num_object_classes - 1);
                if (flipped >= obj.class_id) ++flipped;
                prop.initial_label = flipped;
            }
        }
        if (mode == TaskMode::kSgDetSim) {
            std::array<double, 4> box = obj.box;
            for (double& c : box) c += rng.uniform(-box_jitter, box_jitter);
            box[0] = std::clamp(box[0], 0.0, 1.0);
            box[1] = std::clamp(box[1], 0.0, 1.0);
            box[2] = std::clamp(box[2], box[0], 1.0);
            box[3] = std::clamp(box[3], box[1], 1.0);
            prop.spatial = box;
        }
        proposals.push_back(std::move(prop));
    }
    return proposals;
}

PairBatch gather_pairs(const PairBatch& batch, const std::vector<std::size_t>& ids) {
    PairBatch out;
    out.features = gather_rows(batch.features, ids);
    out.unions = gather_rows(batch.unions, ids);
    out.labels.reserve(ids.size());
    for (std::size_t id : ids) out.labels.push_back(batch.labels.at(id));
    return out;
}

PairBatch concat_pair_batches(const std::vector<PairBatch>& batches) {
    if (batches.empty()) throw DataError("cannot concatenate zero pair batches");
    if (batches.size() == 1) return batches.front();
    std::vector<Tensor> features, unions;
    PairBatch out;
    for (const auto& b : batches) {
        features.push_back(b.features);
        unions.push_back(b.unions);
        out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    }
    out.features = concat_rows(features);
    out.unions = concat_rows(unions);
    return out;
}

SggModel SggModel::init(const RunConfig& config, Rng& rng) {
    SggModel model;
    model.model_dim = config.model_dim;
    model.union_dim = config.effective_union_dim();
    model.num_object_classes = config.object_classes;

    const std::size_t ffn = config.effective_ffn_hidden();
    model.spatial_fc = Linear::init(4, config.spatial_dim, rng);
    model.obj_visual_proj =
        Linear::init(config.feature_dim + config.spatial_dim, config.model_dim, rng);
    model.obj_semantic_proj = Linear::init(config.embed_dim, config.model_dim, rng);
    model.label_embed = Embedding::init(config.object_classes, config.embed_dim, rng);
    model.object_encoder =
        ShaStack::init(config.object_layers, config.model_dim, config.heads, ffn, rng);
    model.object_decoder = Linear::init(config.model_dim, config.object_classes, rng);
    model.rel_visual_proj =
        Linear::init(config.feature_dim + config.model_dim, config.model_dim, rng);
    model.rel_semantic_proj = Linear::init(config.embed_dim, config.model_dim, rng);
    model.relation_encoder =
        ShaStack::init(config.relation_layers, config.model_dim, config.heads, ffn, rng);
    model.union_proj = Linear::init(2 * config.feature_dim + 4, model.union_dim, rng);
    return model;
}

void SggModel::collect(ParamMap& params) const {
    spatial_fc.collect("pipeline.spatial_fc", params);
    obj_visual_proj.collect("pipeline.obj_visual_proj", params);
    obj_semantic_proj.collect("pipeline.obj_semantic_proj", params);
    label_embed.collect("pipeline.label_embed", params);
    object_encoder.collect("pipeline.object_encoder", params);
    object_decoder.collect("pipeline.object_decoder", params);
    rel_visual_proj.collect("pipeline.rel_visual_proj", params);
    rel_semantic_proj.collect("pipeline.rel_semantic_proj", params);
    relation_encoder.collect("pipeline.relation_encoder", params);
    union_proj.collect("pipeline.union_proj", params);
}

namespace {

Tensor visual_matrix(const std::vector<Proposal>& proposals) {
    const std::size_t n = proposals.size();
    const std::size_t d = proposals.front().visual.size();
    std::vector<double> data;
    data.reserve(n * d);
    for (const auto& p : proposals) {
        if (p.visual.size() != d) throw DataError("proposal feature dims disagree");
        data.insert(data.end(), p.visual.begin(), p.visual.end());
    }
    return Tensor::from({n, d}, std::move(data));
}

Tensor spatial_matrix(const std::vector<Proposal>& proposals) {
    std::vector<double> data;
    data.reserve(proposals.size() * 4);
    for (const auto& p : proposals) data.insert(data.end(), p.spatial.begin(), p.spatial.end());
    return Tensor::from({proposals.size(), 4}, std::move(data));
}

std::vector<std::size_t> initial_labels(const std::vector<Proposal>& proposals) {
    std::vector<std::size_t> labels;
    labels.reserve(proposals.size());
    for (const auto& p : proposals) labels.push_back(p.initial_label);
    return labels;
}

}  // namespace

Tensor encode_objects(const SggModel& model, const std::vector<Proposal>& proposals) {
    if (proposals.empty()) throw DataError("encode_objects on an empty proposal list");
    for (const auto& p : proposals) {
        if (p.initial_label >= model.num_object_classes) {
            throw DataError("initial label " + std::to_string(p.initial_label) +
                            " out of range");
        }
    }
    Tensor visual = visual_matrix(proposals);
    Tensor boxes = spatial_matrix(proposals);
    Tensor x = model.obj_visual_proj(concat_cols({visual, model.spatial_fc(boxes)}));
    Tensor y = model.obj_semantic_proj(model.label_embed(initial_labels(proposals)));
    return sha_forward(model.object_encoder, x, y);
}

Tensor object_logits(const SggModel& model, const Tensor& refined) {
    return model.object_decoder(refined);
}

std::size_t argmax_lowest(const double* values, std::size_t n) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

std::vector<std::size_t> decode_object_labels(const SggModel& model, const Tensor& refined) {
    Tensor probs = softmax(object_logits(model, refined), 1);
    const std::size_t n = probs.rows(), c = probs.cols();
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = argmax_lowest(probs.data().data() + i * c, c);
    return labels;
}

Tensor encode_relations(const SggModel& model, const std::vector<Proposal>& proposals,
                        const Tensor& refined, const std::vector<std::size_t>& labels) {
    if (proposals.size() != refined.rows() || proposals.size() != labels.size()) {
        throw DataError("encode_relations inputs are misaligned");
    }
    for (std::size_t label : labels) {
        if (label >= model.num_object_classes) {
            throw DataError("decoded label " + std::to_string(label) + " out of range");
        }
    }
    Tensor visual = visual_matrix(proposals);
    Tensor x = model.rel_visual_proj(concat_cols({visual, refined}));
    Tensor y = model.rel_semantic_proj(model.label_embed(labels));
    return sha_forward(model.relation_encoder, x, y);
}

Tensor union_features(const SggModel& model, const std::vector<Proposal>& proposals,
                      const std::vector<RelationSample>& pairs) {
    const std::size_t fdim = proposals.front().visual.size();
    std::vector<double> data;
    data.reserve(pairs.size() * (2 * fdim + 4));
    for (const auto& pair : pairs) {
        if (pair.subject == pair.object) throw DataError("self-relation in pair list");
        const Proposal& s = proposals.at(pair.subject);
        const Proposal& o = proposals.at(pair.object);
        data.insert(data.end(), s.visual.begin(), s.visual.end());
        data.insert(data.end(), o.visual.begin(), o.visual.end());
        data.push_back(std::min(s.spatial[0], o.spatial[0]));
        data.push_back(std::min(s.spatial[1], o.spatial[1]));
        data.push_back(std::max(s.spatial[2], o.spatial[2]));
        data.push_back(std::max(s.spatial[3], o.spatial[3]));
    }
    Tensor raw = Tensor::from({pairs.size(), 2 * fdim + 4}, std::move(data));
    return model.union_proj(raw);
}

PairBatch build_pair_batch(const SggModel& model, const std::vector<Proposal>& proposals,
                           const Tensor& entity_features,
                           const std::vector<RelationSample>& pairs) {
    if (pairs.empty()) throw DataError("build_pair_batch with no pairs");
    std::vector<std::size_t> subjects, objects;
    subjects.reserve(pairs.size());
    objects.reserve(pairs.size());
    PairBatch batch;
    batch.labels.reserve(pairs.size());
    for (const auto& pair : pairs) {
        subjects.push_back(pair.subject);
        objects.push_back(pair.object);
        batch.labels.push_back(pair.label);
    }
    batch.features = concat_cols(
        {gather_rows(entity_features, subjects), gather_rows(entity_features, objects)});
    batch.unions = union_features(model, proposals, pairs);
    return batch;
}

}  // namespace shagcl
