#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "shagcl/dataio.hpp"

namespace shagcl {

enum class TaskMode { kPredCls, kSgCls, kSgDetSim };

TaskMode parse_mode(const std::string& name);        // ConfigError on unknown
std::string mode_name(TaskMode mode);

/// Every knob of a run. Defaults give a small but complete configuration;
/// `key = value` lines in a config file override them, CLI flags override both.
struct RunConfig {
    // dataset synthesis
    std::size_t object_classes = 8;
    std::size_t predicate_classes = 20;
    double zipf_exponent = 1.2;
    std::size_t scenes = 500;
    std::size_t objects_min = 3, objects_max = 6;
    std::size_t relations_min = 2, relations_max = 5;
    double test_fraction = 0.3;
    std::uint64_t data_seed = 7;

    // proposal features
    std::size_t feature_dim = 16;
    double feature_signal = 1.0;
    double feature_noise = 0.3;
    double label_noise = 0.2;  // sgcls / sgdet_sim initial-label flip rate
    double box_jitter = 0.05;  // sgdet_sim box perturbation

    // model
    std::size_t model_dim = 64;
    std::size_t heads = 4;
    std::size_t ffn_hidden = 0;   // 0 -> 2 * model_dim
    std::size_t embed_dim = 32;
    std::size_t spatial_dim = 16;
    std::size_t union_dim = 0;    // 0 -> model_dim
    std::size_t object_layers = 4;
    std::size_t relation_layers = 2;

    // grouping / losses
    double mu = 4.0;
    double alpha = 1.0;
    std::string strategy = "topdown";  // or "adjacent"

    // training
    std::string mode = "predcls";
    std::uint64_t seed = 1;
    std::size_t steps = 2000;
    std::size_t batch_scenes = 8;
    double lr = 1e-3;
    double momentum = 0.9;
    std::string optimizer = "sgdm";  // or "adam"
    double warmup_frac = 0.05;
    double decay_frac = 0.7;
    double decay_factor = 0.1;
    double obj_loss_weight = 1.0;  // label supervision outside predcls

    std::size_t effective_ffn_hidden() const { return ffn_hidden ? ffn_hidden : 2 * model_dim; }
    std::size_t effective_union_dim() const { return union_dim ? union_dim : model_dim; }

    SyntheticSpec synthetic_spec() const;
    void validate() const;  // throws ConfigError

    /// Flat snapshot of every knob, for manifests and checkpoint metadata.
    std::map<std::string, std::string> snapshot() const;
    static RunConfig from_snapshot(const std::map<std::string, std::string>& snap);
};

/// Parses `key = value` lines ('#' comments, blank lines allowed) on top of
/// the defaults. Unknown keys raise ConfigError.
RunConfig load_config(const std::string& path);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace shagcl
