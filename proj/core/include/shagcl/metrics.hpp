#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace shagcl {

struct Triplet {
    std::size_t subject = 0;
    std::size_t predicate = 0;
    std::size_t object = 0;

    bool operator==(const Triplet&) const = default;
    auto operator<=>(const Triplet&) const = default;
};

/// Ranked triplet predictions of one image, sorted by descending score
/// (callers may pass unsorted lists; ranking functions sort a copy with a
/// deterministic tie-break).
struct ImagePredictions {
    std::vector<std::pair<Triplet, double>> ranked;
};

struct ImageGroundTruth {
    std::vector<Triplet> triplets;
};

/// |top-k predictions intersected with GT| / |GT| per image, averaged over
/// images. Images with empty GT are skipped with a warning on `warn`.
double recall_at_k(const std::vector<ImagePredictions>& predictions,
                   const std::vector<ImageGroundTruth>& ground_truth, std::size_t k,
                   std::ostream* warn = nullptr);

struct MeanRecallResult {
    double mean_recall = 0.0;                // over classes with >= 1 GT occurrence
    std::vector<double> per_class;           // indexed by predicate class
    std::vector<long long> class_gt_counts;  // GT triplets per class over all images
};

/// Per-class recall: within each image, matched GT triplets of that class over
/// its GT triplets of that class; averaged over images containing the class;
/// mean taken over classes that occur at all.
MeanRecallResult mean_recall_at_k(const std::vector<ImagePredictions>& predictions,
                                  const std::vector<ImageGroundTruth>& ground_truth,
                                  std::size_t k, std::size_t num_classes);

/// CSV `class,count,recall_at_<k>...` with one row per class that has GT
/// occurrences, in class-id order.
void write_per_class_csv(const std::string& path, const std::vector<std::string>& class_names,
                         const std::vector<std::size_t>& k_list,
                         const std::vector<MeanRecallResult>& per_k_results);

}  // namespace shagcl
