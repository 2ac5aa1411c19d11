#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shagcl/errors.hpp"

namespace shagcl {

struct PredicateClass {
    std::string name;
    long long count = 0;
};

/// Predicate classes sorted by training-instance count, descending. Ties keep
/// input order (stable sort).
struct PredicateVocabulary {
    std::vector<PredicateClass> classes;

    std::size_t size() const { return classes.size(); }
    /// Rank of a class name in the sorted order; throws DataError if unknown.
    std::size_t rank_of(const std::string& name) const;
};

PredicateVocabulary sort_vocabulary(std::vector<PredicateClass> raw);

/// Balanced groups over the sorted vocabulary plus the cumulative
/// classification spaces they induce. Group k holds ranks
/// [groups[k].first, groups[k].second); space_sizes[k] == |groups 0..k|.
struct GroupPartition {
    PredicateVocabulary vocab;
    double mu = 1.0;
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    std::vector<std::size_t> space_sizes;

    std::size_t group_count() const { return groups.size(); }
    std::size_t num_classes() const { return vocab.size(); }
};

/// Splits the sorted vocabulary whenever the current group's leading count
/// strictly exceeds mu times the candidate's count. Every group then satisfies
/// max(count) <= mu * min(count).
GroupPartition partition_predicates(const PredicateVocabulary& vocab, double mu);

/// Degenerate single-group partition over all classes (the K=1 baseline).
GroupPartition single_group_partition(const PredicateVocabulary& vocab);

/// Classes of the cumulative space of classifier k (0-based): the first
/// space_sizes[k] classes in vocabulary order.
std::vector<PredicateClass> classification_space(const GroupPartition& partition, std::size_t k);

/// Reads a `name,count` CSV (header required). Throws ParseError with the
/// offending line; validation of names/counts happens in sort_vocabulary.
std::vector<PredicateClass> load_counts_csv(const std::string& path);

}  // namespace shagcl
