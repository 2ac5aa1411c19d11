#include "shagcl/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "shagcl/rng.hpp"

namespace shagcl {

using nlohmann::json;

void SyntheticSpec::validate() const {
    if (object_classes == 0) throw ConfigError("object_classes must be positive");
    if (predicate_classes == 0) throw ConfigError("predicate_classes must be positive");
    if (zipf_exponent < 0.0) throw ConfigError("zipf_exponent must be >= 0");
    if (scenes == 0) throw ConfigError("scenes must be positive");
    if (objects_min < 2 || objects_min > objects_max) {
        throw ConfigError("objects_per_scene range must satisfy 2 <= min <= max");
    }
    if (relations_min < 1 || relations_min > relations_max) {
        throw ConfigError("relations_per_scene range must satisfy 1 <= min <= max");
    }
    const std::size_t max_pairs = objects_min * (objects_min - 1);
    if (relations_max > max_pairs) {
        throw ConfigError("relations_max " + std::to_string(relations_max) +
                          " exceeds the " + std::to_string(max_pairs) +
                          " ordered pairs of the smallest scene");
    }
    if (feature_dim == 0) throw ConfigError("feature_dim must be positive");
    if (test_fraction <= 0.0 || test_fraction >= 1.0) {
        throw ConfigError("test_fraction must lie in (0, 1)");
    }
}

std::uint64_t object_latent_seed(std::int64_t image_id, std::size_t object_index) {
    return stable_hash(0x0b7ec7ull, static_cast<std::uint64_t>(image_id), object_index);
}

std::vector<double> zipf_probabilities(std::size_t n, double s) {
    std::vector<double> probs(n);
    double total = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        probs[r] = std::pow(static_cast<double>(r + 1), -s);
        total += probs[r];
    }
    for (double& p : probs) p /= total;
    return probs;
}

namespace {

std::string padded_name(const char* prefix, std::size_t id, std::size_t total) {
    std::size_t width = 1;
    for (std::size_t v = total; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(id + 1);
    return std::string(prefix) + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::array<double, 4> random_box(Rng& rng) {
    const double w = rng.uniform(0.08, 0.25);
    const double h = rng.uniform(0.08, 0.25);
    const double x1 = rng.uniform(0.0, 1.0 - w);
    const double y1 = rng.uniform(0.0, 1.0 - h);
    return {x1, y1, x1 + w, y1 + h};
}

std::size_t sample_from_cdf(const std::vector<double>& cdf, double u) {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) return cdf.size() - 1;
    return static_cast<std::size_t>(it - cdf.begin());
}

/// Stratified 70/30 split: greedy per-class balancing, an exact-size fixup,
/// and a guarantee that classes with >= 10 instances keep a test occurrence.
void split_scenes(std::vector<SceneRecord>& all, double test_fraction, std::size_t num_predicates,
                  std::uint64_t seed, std::vector<SceneRecord>& train,
                  std::vector<SceneRecord>& test) {
    const std::size_t n = all.size();
    const std::size_t test_target =
        std::min<std::size_t>(n - 1, std::max<std::size_t>(1, std::llround(test_fraction * n)));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(stable_hash(seed, 0x5b117ull));
    for (std::size_t i = n; i > 1; --i) {
        std::swap(order[i - 1], order[rng.index(i)]);
    }

    std::vector<long long> class_total(num_predicates, 0);
    for (const auto& scene : all)
        for (const auto& rel : scene.relations) ++class_total[rel.predicate];

    std::vector<long long> class_test(num_predicates, 0);
    std::vector<bool> in_test(n, false);
    std::size_t test_count = 0;

    auto deficit = [&](const SceneRecord& scene) {
        // positive when this scene's classes are under-represented in test
        double score = 0.0;
        for (const auto& rel : scene.relations) {
            const double want = test_fraction * static_cast<double>(class_total[rel.predicate]);
            score += want - static_cast<double>(class_test[rel.predicate]);
        }
        return score;
    };

    for (std::size_t idx : order) {
        if (test_count >= test_target) break;
        if (deficit(all[idx]) > 0.0) {
            in_test[idx] = true;
            ++test_count;
            for (const auto& rel : all[idx].relations) ++class_test[rel.predicate];
        }
    }
    // exact-size fixup, still following the shuffled order
    for (std::size_t idx : order) {
        if (test_count >= test_target) break;
        if (!in_test[idx]) {
            in_test[idx] = true;
            ++test_count;
            for (const auto& rel : all[idx].relations) ++class_test[rel.predicate];
        }
    }
    // coverage guarantee for classes with enough instances
    for (std::size_t cls = 0; cls < num_predicates; ++cls) {
        if (class_total[cls] >= 10 && class_test[cls] == 0) {
            for (std::size_t idx : order) {
                if (in_test[idx]) continue;
                bool has = false;
                for (const auto& rel : all[idx].relations) has = has || rel.predicate == cls;
                if (has) {
                    in_test[idx] = true;
                    for (const auto& rel : all[idx].relations) ++class_test[rel.predicate];
                    break;
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        (in_test[i] ? test : train).push_back(std::move(all[i]));
    }
}

}  // namespace

Dataset generate_dataset(const SyntheticSpec& spec) {
    spec.validate();

    Dataset dataset;
    dataset.object_class_names.reserve(spec.object_classes);
    for (std::size_t i = 0; i < spec.object_classes; ++i)
        dataset.object_class_names.push_back(padded_name("obj", i, spec.object_classes));
    dataset.predicate_names.reserve(spec.predicate_classes);
    for (std::size_t i = 0; i < spec.predicate_classes; ++i)
        dataset.predicate_names.push_back(padded_name("pred", i, spec.predicate_classes));

    const auto probs = zipf_probabilities(spec.predicate_classes, spec.zipf_exponent);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }

    std::vector<SceneRecord> all;
    all.reserve(spec.scenes);
    for (std::size_t s = 0; s < spec.scenes; ++s) {
        Rng rng(stable_hash(spec.seed, 0x5ce7eull, s));
        SceneRecord scene;
        scene.image_id = static_cast<std::int64_t>(s);

        const std::size_t num_objects =
            spec.objects_min + rng.index(spec.objects_max - spec.objects_min + 1);
        scene.objects.reserve(num_objects);
        for (std::size_t i = 0; i < num_objects; ++i) {
            SceneObject obj;
            obj.class_id = rng.index(spec.object_classes);
            obj.box = random_box(rng);
            obj.latent_seed = object_latent_seed(scene.image_id, i);
            scene.objects.push_back(obj);
        }

        const std::size_t want_relations =
            spec.relations_min + rng.index(spec.relations_max - spec.relations_min + 1);
        std::set<std::pair<std::size_t, std::size_t>> used_pairs;
        const std::size_t pair_budget = num_objects * (num_objects - 1);
        while (scene.relations.size() < std::min(want_relations, pair_budget)) {
            const std::size_t sub = rng.index(num_objects);
            const std::size_t obj = rng.index(num_objects);
            if (sub == obj || !used_pairs.emplace(sub, obj).second) continue;
            SceneRelation rel;
            rel.subject = sub;
            rel.object = obj;
            rel.predicate = sample_from_cdf(cdf, rng.uniform());
            scene.relations.push_back(rel);
        }
        all.push_back(std::move(scene));
    }

    split_scenes(all, spec.test_fraction, spec.predicate_classes, spec.seed, dataset.train,
                 dataset.test);
    return dataset;
}

namespace {

json scene_to_json(const SceneRecord& scene, const std::vector<std::string>& object_names,
                   const std::vector<std::string>& predicate_names) {
    json objects = json::array();
    for (const auto& obj : scene.objects) {
        objects.push_back({{"class", object_names.at(obj.class_id)},
                           {"box", {obj.box[0], obj.box[1], obj.box[2], obj.box[3]}}});
    }
    json relations = json::array();
    for (const auto& rel : scene.relations) {
        relations.push_back({{"sub", rel.subject},
                             {"obj", rel.object},
                             {"pred", predicate_names.at(rel.predicate)}});
    }
    return {{"image_id", scene.image_id}, {"objects", objects}, {"relations", relations}};
}

}  // namespace

void write_jsonl(const std::string& path, const std::vector<SceneRecord>& scenes,
                 const std::vector<std::string>& object_class_names,
                 const std::vector<std::string>& predicate_names) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write annotation file '" + path + "'");
    for (const auto& scene : scenes) {
        out << scene_to_json(scene, object_class_names, predicate_names).dump() << '\n';
    }
}

namespace {

LoadedScenes load_annotations_impl(const std::string& path,
                                   const std::vector<std::string>* expected_objects,
                                   const std::vector<std::string>* expected_predicates) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open annotation file '" + path + "'");

    // name -> id; either pinned by the expected lists or collected from the file
    std::map<std::string, std::size_t> object_ids, predicate_ids;
    const bool pinned = expected_objects != nullptr;
    if (pinned) {
        for (std::size_t i = 0; i < expected_objects->size(); ++i)
            object_ids[(*expected_objects)[i]] = i;
        for (std::size_t i = 0; i < expected_predicates->size(); ++i)
            predicate_ids[(*expected_predicates)[i]] = i;
    }

    struct RawScene {
        std::int64_t image_id;
        std::vector<std::pair<std::string, std::array<double, 4>>> objects;
        std::vector<std::tuple<std::size_t, std::size_t, std::string>> relations;
    };
    std::vector<RawScene> raw_scenes;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
        }
        try {
            RawScene raw;
            raw.image_id = j.at("image_id").get<std::int64_t>();
            for (const auto& obj : j.at("objects")) {
                const auto& box = obj.at("box");
                if (box.size() != 4) throw ParseError("box needs 4 coordinates", line_no);
                std::array<double, 4> b{box[0].get<double>(), box[1].get<double>(),
                                        box[2].get<double>(), box[3].get<double>()};
                if (b[0] > b[2] || b[1] > b[3] || b[0] < 0 || b[1] < 0 || b[2] > 1 || b[3] > 1) {
                    throw ParseError("box outside [0,1] or inverted", line_no);
                }
                raw.objects.emplace_back(obj.at("class").get<std::string>(), b);
            }
            for (const auto& rel : j.at("relations")) {
                const auto sub = rel.at("sub").get<std::size_t>();
                const auto obj = rel.at("obj").get<std::size_t>();
                if (sub == obj) throw ParseError("self-relation", line_no);
                if (sub >= raw.objects.size() || obj >= raw.objects.size()) {
                    throw ParseError("relation endpoint out of range", line_no);
                }
                raw.relations.emplace_back(sub, obj, rel.at("pred").get<std::string>());
            }
            raw_scenes.push_back(std::move(raw));
        } catch (const ParseError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError(std::string("schema violation: ") + e.what(), line_no);
        }
    }
    if (raw_scenes.empty()) throw ParseError("annotation file '" + path + "' has no scenes");

    if (!pinned) {
        // deterministic ids: sorted unique names from the file
        for (const auto& raw : raw_scenes) {
            for (const auto& [name, box] : raw.objects) object_ids.emplace(name, 0);
            for (const auto& [s, o, name] : raw.relations) predicate_ids.emplace(name, 0);
        }
        std::size_t id = 0;
        for (auto& [name, slot] : object_ids) slot = id++;
        id = 0;
        for (auto& [name, slot] : predicate_ids) slot = id++;
    }

    LoadedScenes loaded;
    loaded.object_class_names.resize(object_ids.size());
    for (const auto& [name, id] : object_ids) loaded.object_class_names[id] = name;
    loaded.predicate_names.resize(predicate_ids.size());
    for (const auto& [name, id] : predicate_ids) loaded.predicate_names[id] = name;
    if (pinned) {
        loaded.object_class_names = *expected_objects;
        loaded.predicate_names = *expected_predicates;
    }

    for (const auto& raw : raw_scenes) {
        SceneRecord scene;
        scene.image_id = raw.image_id;
        for (std::size_t i = 0; i < raw.objects.size(); ++i) {
            const auto& [name, box] = raw.objects[i];
            auto it = object_ids.find(name);
            if (it == object_ids.end()) throw DataError("unknown object class '" + name + "'");
            scene.objects.push_back({it->second, box, object_latent_seed(scene.image_id, i)});
        }
        for (const auto& [sub, obj, name] : raw.relations) {
            auto it = predicate_ids.find(name);
            if (it == predicate_ids.end()) throw DataError("unknown predicate '" + name + "'");
            scene.relations.push_back({sub, obj, it->second});
        }
        loaded.scenes.push_back(std::move(scene));
    }
    return loaded;
}

}  // namespace

LoadedScenes load_annotations(const std::string& path) {
    return load_annotations_impl(path, nullptr, nullptr);
}

LoadedScenes load_annotations(const std::string& path,
                              const std::vector<std::string>& expected_object_names,
                              const std::vector<std::string>& expected_predicate_names) {
    return load_annotations_impl(path, &expected_object_names, &expected_predicate_names);
}

std::vector<PredicateClass> count_predicates(const std::vector<SceneRecord>& scenes,
                                             const std::vector<std::string>& predicate_names) {
    std::vector<long long> counts(predicate_names.size(), 0);
    for (const auto& scene : scenes)
        for (const auto& rel : scene.relations) ++counts.at(rel.predicate);
    std::vector<PredicateClass> result;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] > 0) result.push_back({predicate_names[i], counts[i]});
    }
    return result;
}

std::string file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "' for fingerprinting");
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buffer))) break;
    }
    std::ostringstream out;
    out << std::hex << hash;
    return out.str();
}

}  // namespace shagcl
