#include "shagcl/grouping.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

namespace shagcl {

std::size_t PredicateVocabulary::rank_of(const std::string& name) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].name == name) return i;
    throw DataError("unknown predicate class '" + name + "'");
}

PredicateVocabulary sort_vocabulary(std::vector<PredicateClass> raw) {
    std::unordered_set<std::string> seen;
    for (const auto& cls : raw) {
        if (cls.count <= 0) {
            throw VocabError("class '" + cls.name + "' has non-positive count " +
                             std::to_string(cls.count));
        }
        if (!seen.insert(cls.name).second) {
            throw VocabError("duplicate class name '" + cls.name + "'");
        }
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const PredicateClass& a, const PredicateClass& b) {
                         return a.count > b.count;
                     });
    return PredicateVocabulary{std::move(raw)};
}

GroupPartition partition_predicates(const PredicateVocabulary& vocab, double mu) {
    if (vocab.size() == 0) throw ConfigError("cannot partition an empty vocabulary");
    if (mu < 1.0) throw ConfigError("mu must be >= 1, got " + std::to_string(mu));

    GroupPartition partition;
    partition.vocab = vocab;
    partition.mu = mu;

    // cur tracks the first (largest-count) class of the open group; a new
    // group opens when count(cur) strictly exceeds mu * count(candidate).
    std::size_t cur = 0;
    std::size_t group_begin = 0;
    const auto& classes = vocab.classes;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (static_cast<double>(classes[cur].count) > mu * static_cast<double>(classes[i].count)) {
            partition.groups.emplace_back(group_begin, i);
            group_begin = i;
            cur = i;
        }
    }
    partition.groups.emplace_back(group_begin, classes.size());

    partition.space_sizes.reserve(partition.groups.size());
    for (const auto& [begin, end] : partition.groups) {
        (void)begin;
        partition.space_sizes.push_back(end);
    }
    return partition;
}

GroupPartition single_group_partition(const PredicateVocabulary& vocab) {
    if (vocab.size() == 0) throw ConfigError("cannot partition an empty vocabulary");
    GroupPartition partition;
    partition.vocab = vocab;
    partition.mu = static_cast<double>(vocab.classes.front().count);  // any bound that holds
    partition.groups.emplace_back(0, vocab.size());
    partition.space_sizes.push_back(vocab.size());
    return partition;
}

std::vector<PredicateClass> classification_space(const GroupPartition& partition, std::size_t k) {
    if (k >= partition.group_count()) {
        throw IndexError("classifier index " + std::to_string(k) + " out of range for K=" +
                         std::to_string(partition.group_count()));
    }
    const auto& classes = partition.vocab.classes;
    return {classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(
                                                   partition.space_sizes[k])};
}

std::vector<PredicateClass> load_counts_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open counts file '" + path + "'");

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty counts file '" + path + "'");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "name,count") throw ParseError("expected header 'name,count'", line_no);

    std::vector<PredicateClass> classes;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("missing comma", line_no);
        PredicateClass cls;
        cls.name = line.substr(0, comma);
        try {
            std::size_t used = 0;
            cls.count = std::stoll(line.substr(comma + 1), &used);
            if (used != line.size() - comma - 1) throw ParseError("trailing garbage", line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("invalid count '" + line.substr(comma + 1) + "'", line_no);
        }
        classes.push_back(std::move(cls));
    }
    if (classes.empty()) throw ParseError("counts file '" + path + "' has no data rows");
    return classes;
}

}  // namespace shagcl
