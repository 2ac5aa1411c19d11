#include "shagcl/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace shagcl {

TaskMode parse_mode(const std::string& name) {
    if (name == "predcls") return TaskMode::kPredCls;
    if (name == "sgcls") return TaskMode::kSgCls;
    if (name == "sgdet_sim") return TaskMode::kSgDetSim;
    throw ConfigError("unknown mode '" + name + "' (expected predcls|sgcls|sgdet_sim)");
}

std::string mode_name(TaskMode mode) {
    switch (mode) {
        case TaskMode::kPredCls: return "predcls";
        case TaskMode::kSgCls: return "sgcls";
        case TaskMode::kSgDetSim: return "sgdet_sim";
    }
    return "predcls";
}

SyntheticSpec RunConfig::synthetic_spec() const {
    SyntheticSpec spec;
    spec.object_classes = object_classes;
    spec.predicate_classes = predicate_classes;
    spec.zipf_exponent = zipf_exponent;
    spec.scenes = scenes;
    spec.objects_min = objects_min;
    spec.objects_max = objects_max;
    spec.relations_min = relations_min;
    spec.relations_max = relations_max;
    spec.feature_dim = feature_dim;
    spec.seed = data_seed;
    spec.test_fraction = test_fraction;
    return spec;
}

void RunConfig::validate() const {
    synthetic_spec().validate();
    parse_mode(mode);
    if (strategy != "topdown" && strategy != "adjacent") {
        throw ConfigError("unknown strategy '" + strategy + "' (expected adjacent|topdown)");
    }
    if (optimizer != "sgdm" && optimizer != "adam") {
        throw ConfigError("unknown optimizer '" + optimizer + "' (expected sgdm|adam)");
    }
    if (mu < 1.0) throw ConfigError("mu must be >= 1");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (model_dim == 0 || heads == 0 || model_dim % heads != 0) {
        throw ConfigError("model_dim must be a positive multiple of heads");
    }
    if (object_layers == 0 || relation_layers == 0) {
        throw ConfigError("encoder layer counts must be positive");
    }
    if (steps == 0 || batch_scenes == 0) throw ConfigError("steps and batch_scenes must be positive");
    if (lr <= 0.0) throw ConfigError("lr must be positive");
    if (label_noise < 0.0 || label_noise > 1.0) throw ConfigError("label_noise must be in [0, 1]");
}

namespace {

struct Field {
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::size_t to_size(const std::string& v) {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<std::size_t>(parsed);
}

double to_double(const std::string& v) {
    std::size_t used = 0;
    const double parsed = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return parsed;
}

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = [] {
        std::map<std::string, Field> t;
        auto size_field = [&t](const std::string& key, std::size_t RunConfig::* member) {
            t[key] = {[member](RunConfig& c, const std::string& v) { c.*member = to_size(v); },
                      [member](const RunConfig& c) { return std::to_string(c.*member); }};
        };
        auto u64_field = [&t](const std::string& key, std::uint64_t RunConfig::* member) {
            t[key] = {[member](RunConfig& c, const std::string& v) {
                          c.*member = static_cast<std::uint64_t>(std::stoull(v));
                      },
                      [member](const RunConfig& c) { return std::to_string(c.*member); }};
        };
        auto double_field = [&t](const std::string& key, double RunConfig::* member) {
            t[key] = {[member](RunConfig& c, const std::string& v) { c.*member = to_double(v); },
                      [member](const RunConfig& c) { return format_double(c.*member); }};
        };
        auto string_field = [&t](const std::string& key, std::string RunConfig::* member) {
            t[key] = {[member](RunConfig& c, const std::string& v) { c.*member = v; },
                      [member](const RunConfig& c) { return c.*member; }};
        };

        size_field("object_classes", &RunConfig::object_classes);
        size_field("predicate_classes", &RunConfig::predicate_classes);
        double_field("zipf_exponent", &RunConfig::zipf_exponent);
        size_field("scenes", &RunConfig::scenes);
        size_field("objects_min", &RunConfig::objects_min);
        size_field("objects_max", &RunConfig::objects_max);
        size_field("relations_min", &RunConfig::relations_min);
        size_field("relations_max", &RunConfig::relations_max);
        double_field("test_fraction", &RunConfig::test_fraction);
        u64_field("data_seed", &RunConfig::data_seed);
        size_field("feature_dim", &RunConfig::feature_dim);
        double_field("feature_signal", &RunConfig::feature_signal);
        double_field("feature_noise", &RunConfig::feature_noise);
        double_field("label_noise", &RunConfig::label_noise);
        double_field("box_jitter", &RunConfig::box_jitter);
        size_field("model_dim", &RunConfig::model_dim);
        size_field("heads", &RunConfig::heads);
        size_field("ffn_hidden", &RunConfig::ffn_hidden);
        size_field("embed_dim", &RunConfig::embed_dim);
        size_field("spatial_dim", &RunConfig::spatial_dim);
        size_field("union_dim", &RunConfig::union_dim);
        size_field("object_layers", &RunConfig::object_layers);
        size_field("relation_layers", &RunConfig::relation_layers);
        double_field("mu", &RunConfig::mu);
        double_field("alpha", &RunConfig::alpha);
        string_field("strategy", &RunConfig::strategy);
        string_field("mode", &RunConfig::mode);
        u64_field("seed", &RunConfig::seed);
        size_field("steps", &RunConfig::steps);
        size_field("batch_scenes", &RunConfig::batch_scenes);
        double_field("lr", &RunConfig::lr);
        double_field("momentum", &RunConfig::momentum);
        string_field("optimizer", &RunConfig::optimizer);
        double_field("warmup_frac", &RunConfig::warmup_frac);
        double_field("decay_frac", &RunConfig::decay_frac);
        double_field("decay_factor", &RunConfig::decay_factor);
        double_field("obj_loss_weight", &RunConfig::obj_loss_weight);
        return t;
    }();
    return table;
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    const auto& table = field_table();
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
        it->second.set(config, value);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("invalid value '" + value + "' for config key '" + key + "'");
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not 'key = value': " + line);
        }
        apply_config_entry(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

std::map<std::string, std::string> RunConfig::snapshot() const {
    std::map<std::string, std::string> snap;
    for (const auto& [key, field] : field_table()) snap[key] = field.get(*this);
    return snap;
}

RunConfig RunConfig::from_snapshot(const std::map<std::string, std::string>& snap) {
    RunConfig config;
    for (const auto& [key, value] : snap) apply_config_entry(config, key, value);
    return config;
}

}  // namespace shagcl
