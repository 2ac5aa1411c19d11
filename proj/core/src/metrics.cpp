#include "shagcl/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>

#include "shagcl/errors.hpp"

namespace shagcl {

namespace {

/// Top-k triplets by score; ties break on triplet order so rankings are
/// reproducible across runs.
std::vector<Triplet> top_k(const ImagePredictions& preds, std::size_t k) {
    std::vector<std::pair<Triplet, double>> ranked = preds.ranked;
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<Triplet> result;
    result.reserve(std::min(k, ranked.size()));
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) result.push_back(ranked[i].first);
    return result;
}

}  // namespace

double recall_at_k(const std::vector<ImagePredictions>& predictions,
                   const std::vector<ImageGroundTruth>& ground_truth, std::size_t k,
                   std::ostream* warn) {
    if (k == 0) throw ConfigError("recall@k requires k >= 1");
    if (predictions.size() != ground_truth.size()) {
        throw DataError("prediction/ground-truth image counts differ");
    }
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t img = 0; img < predictions.size(); ++img) {
        const auto& gt = ground_truth[img].triplets;
        if (gt.empty()) {
            if (warn) *warn << "[recall] image " << img << " has no ground truth, skipped\n";
            continue;
        }
        const auto top = top_k(predictions[img], k);
        std::set<Triplet> top_set(top.begin(), top.end());
        std::size_t matched = 0;
        for (const auto& t : gt) matched += top_set.count(t);
        total += static_cast<double>(matched) / static_cast<double>(gt.size());
        ++counted;
    }
    return counted ? total / static_cast<double>(counted) : 0.0;
}

MeanRecallResult mean_recall_at_k(const std::vector<ImagePredictions>& predictions,
                                  const std::vector<ImageGroundTruth>& ground_truth,
                                  std::size_t k, std::size_t num_classes) {
    if (k == 0) throw ConfigError("mean recall@k requires k >= 1");
    if (predictions.size() != ground_truth.size()) {
        throw DataError("prediction/ground-truth image counts differ");
    }
    std::vector<double> recall_sum(num_classes, 0.0);
    std::vector<long long> image_count(num_classes, 0);
    MeanRecallResult result;
    result.class_gt_counts.assign(num_classes, 0);

    for (std::size_t img = 0; img < predictions.size(); ++img) {
        const auto& gt = ground_truth[img].triplets;
        if (gt.empty()) continue;
        const auto top = top_k(predictions[img], k);
        std::set<Triplet> top_set(top.begin(), top.end());

        std::vector<long long> gt_per_class(num_classes, 0);
        std::vector<long long> hit_per_class(num_classes, 0);
        for (const auto& t : gt) {
            if (t.predicate >= num_classes) throw DataError("predicate class out of range");
            ++gt_per_class[t.predicate];
            ++result.class_gt_counts[t.predicate];
            if (top_set.count(t)) ++hit_per_class[t.predicate];
        }
        for (std::size_t cls = 0; cls < num_classes; ++cls) {
            if (gt_per_class[cls] > 0) {
                recall_sum[cls] += static_cast<double>(hit_per_class[cls]) /
                                   static_cast<double>(gt_per_class[cls]);
                ++image_count[cls];
            }
        }
    }

    result.per_class.assign(num_classes, 0.0);
    double total = 0.0;
    std::size_t present = 0;
    for (std::size_t cls = 0; cls < num_classes; ++cls) {
        if (image_count[cls] > 0) {
            result.per_class[cls] = recall_sum[cls] / static_cast<double>(image_count[cls]);
            total += result.per_class[cls];
            ++present;
        }
    }
    result.mean_recall = present ? total / static_cast<double>(present) : 0.0;
    return result;
}

void write_per_class_csv(const std::string& path, const std::vector<std::string>& class_names,
                         const std::vector<std::size_t>& k_list,
                         const std::vector<MeanRecallResult>& per_k_results) {
    if (k_list.size() != per_k_results.size()) {
        throw DataError("k list and result list sizes differ");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write per-class csv '" + path + "'");
    out << "class,count";
    for (std::size_t k : k_list) out << ",recall_at_" << k;
    out << '\n';
    char buffer[64];
    for (std::size_t cls = 0; cls < class_names.size(); ++cls) {
        const long long count =
            per_k_results.empty() ? 0 : per_k_results.front().class_gt_counts.at(cls);
        if (count == 0) continue;
        out << class_names[cls] << ',' << count;
        for (const auto& result : per_k_results) {
            std::snprintf(buffer, sizeof(buffer), "%.6f", result.per_class.at(cls));
            out << ',' << buffer;
        }
        out << '\n';
    }
}

}  // namespace shagcl
