#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shagcl/grouping.hpp"

namespace shagcl {

/// Knobs of the synthetic long-tailed scene-graph benchmark.
struct SyntheticSpec {
    std::size_t object_classes = 8;
    std::size_t predicate_classes = 20;  // M
    double zipf_exponent = 1.2;          // s >= 0; 0 = uniform
    std::size_t scenes = 500;
    std::size_t objects_min = 3, objects_max = 6;
    std::size_t relations_min = 2, relations_max = 5;
    std::size_t feature_dim = 16;
    std::uint64_t seed = 7;
    double test_fraction = 0.3;

    void validate() const;  // throws ConfigError
};

struct SceneObject {
    std::size_t class_id = 0;
    std::array<double, 4> box{0, 0, 1, 1};  // x1, y1, x2, y2 in [0, 1]
    std::uint64_t latent_seed = 0;          // derived from (image_id, object index)
};

struct SceneRelation {
    std::size_t subject = 0;
    std::size_t object = 0;
    std::size_t predicate = 0;
};

struct SceneRecord {
    std::int64_t image_id = 0;
    std::vector<SceneObject> objects;
    std::vector<SceneRelation> relations;

    bool operator==(const SceneRecord&) const = default;
};

struct Dataset {
    std::vector<SceneRecord> train;
    std::vector<SceneRecord> test;
    std::vector<std::string> object_class_names;
    std::vector<std::string> predicate_names;
};

/// Latent feature seed of an object, recomputable from the annotation file.
std::uint64_t object_latent_seed(std::int64_t image_id, std::size_t object_index);

/// Zipf probabilities over ranks 1..n: p_r proportional to r^(-s).
std::vector<double> zipf_probabilities(std::size_t n, double s);

/// Generates scenes with Zipf-distributed predicate labels and splits them
/// 70/30 with per-predicate stratification so tail classes reach the test set.
Dataset generate_dataset(const SyntheticSpec& spec);

/// One scene per line:
/// {"image_id":..,"objects":[{"class":..,"box":[..]}],"relations":[{"sub":..,"obj":..,"pred":..}]}
void write_jsonl(const std::string& path, const std::vector<SceneRecord>& scenes,
                 const std::vector<std::string>& object_class_names,
                 const std::vector<std::string>& predicate_names);

struct LoadedScenes {
    std::vector<SceneRecord> scenes;
    std::vector<std::string> object_class_names;
    std::vector<std::string> predicate_names;
};

/// Parses a JSON-lines annotation file. With expected name lists, unknown
/// class names raise DataError; otherwise names are collected from the file
/// (sorted, deduplicated). Malformed lines raise ParseError with the line.
LoadedScenes load_annotations(const std::string& path);
LoadedScenes load_annotations(const std::string& path,
                              const std::vector<std::string>& expected_object_names,
                              const std::vector<std::string>& expected_predicate_names);

/// Per-predicate instance counts over a scene collection (training split).
/// Classes with zero occurrences are omitted, matching count-based grouping.
std::vector<PredicateClass> count_predicates(const std::vector<SceneRecord>& scenes,
                                             const std::vector<std::string>& predicate_names);

/// FNV-1a over a file's bytes; manifest provenance for datasets.
std::string file_fingerprint(const std::string& path);

}  // namespace shagcl
