#include "ebcs/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ebcs {

std::string_view axis_name(SweepAxis axis) { return axis == SweepAxis::kDistance ? "distance" : "radius"; }

std::optional<SweepAxis> parse_axis(std::string_view name) {
    if (name == "distance") return SweepAxis::kDistance;
    if (name == "radius") return SweepAxis::kRadius;
    return std::nullopt;
}

void RunConfig::set_seed(std::uint64_t value) {
    seed = value;
    scenario.seed = value;
    train.seed = value;
}

void RunConfig::validate() const {
    try {
        radio.validate();
        (void)rates();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    scenario.validate();
    train.validate();
    if (rate_values.size() == 0) throw ConfigError("rates: table must contain at least one rate");

    auto check_range = [](const Range& r, const char* path) {
        if (!(r.low >= 0.0 && r.high >= r.low))
            throw ConfigError(std::string(path) + ": expected 0 <= low <= high");
    };
    check_range(training_distribution.distance_b_m, "train.distance_b_range_m");
    check_range(training_distribution.bss_radius_m, "train.bss_radius_range_m");
    if (training_distribution.distance_b_m.high > scenario.region_side_m / 2)
        throw ConfigError("train.distance_b_range_m: upper bound exceeds region_side_m / 2");
    if (training_distribution.bss_radius_m.high > scenario.region_side_m / 2)
        throw ConfigError("train.bss_radius_range_m: upper bound exceeds region_side_m / 2");

    if (eval.steps == 0) throw ConfigError("eval.steps: must be positive");
    if (eval.values().empty()) throw ConfigError("eval.values: sweep needs at least one value");
    for (double v : eval.values())
        if (!(v >= 0.0) || v > scenario.region_side_m / 2)
            throw ConfigError("eval.values: sweep value " + format_double(v) + " outside [0, region_side_m / 2]");
    if (!(eval.fixed_distance_b_m >= 0.0) || eval.fixed_distance_b_m > scenario.region_side_m / 2)
        throw ConfigError("eval.fixed_distance_b_m: outside [0, region_side_m / 2]");
    if (!(eval.fixed_bss_radius_m >= 0.0) || eval.fixed_bss_radius_m > scenario.region_side_m / 2)
        throw ConfigError("eval.fixed_bss_radius_m: outside [0, region_side_m / 2]");
}

namespace {

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

// Walks one YAML mapping, remembering which keys were consumed so that
// misspelt keys are reported instead of silently ignored.
class Section {
public:
    Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (node_ && !node_.IsNull() && !node_.IsMap())
            throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": expected a mapping");
    }

    template <typename T>
    void read(const std::string& key, T& out) {
        const YAML::Node v = lookup(key);
        if (!v) return;
        try {
            out = v.as<T>();
        } catch (const YAML::Exception&) {
            throw ConfigError(join(path_, key) + ": cannot convert '" + scalar_text(v) + "'");
        }
    }

    void read_count(const std::string& key, std::size_t& out) {
        const YAML::Node v = lookup(key);
        if (!v) return;
        long long raw = 0;
        try {
            raw = v.as<long long>();
        } catch (const YAML::Exception&) {
            throw ConfigError(join(path_, key) + ": expected a non-negative integer");
        }
        if (raw < 0) throw ConfigError(join(path_, key) + ": must not be negative");
        out = static_cast<std::size_t>(raw);
    }

    void read_range(const std::string& key, Range& out) {
        std::vector<double> pair;
        read(key, pair);
        if (lookup(key) && pair.size() != 2) throw ConfigError(join(path_, key) + ": expected [low, high]");
        if (pair.size() == 2) out = {pair[0], pair[1]};
    }

    Section child(const std::string& key) { return Section(lookup(key), join(path_, key)); }

    bool has(const std::string& key) { return static_cast<bool>(lookup(key)); }

    void reject_unknown() const {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) throw ConfigError(join(path_, key) + ": unknown field");
        }
    }

private:
    YAML::Node lookup(const std::string& key) {
        seen_.insert(key);
        if (!node_ || !node_.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
        YAML::Node v = node_[key];
        if (v && v.IsNull()) return YAML::Node(YAML::NodeType::Undefined);
        return v;
    }

    static std::string scalar_text(const YAML::Node& v) {
        if (v.IsScalar()) return v.Scalar();
        std::ostringstream out;
        out << v;
        return out.str();
    }

    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_config(std::string_view text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: parse error: ") + e.what());
    }

    RunConfig cfg;
    Section top(root, "");

    std::uint64_t seed = cfg.seed;
    top.read("seed", seed);
    cfg.set_seed(seed);

    std::string method = std::string(method_name(cfg.method));
    top.read("method", method);
    if (auto m = parse_method(method)) cfg.method = *m;
    else throw ConfigError("method: unknown method '" + method + "' (minrate | fore-rule | fore-drl)");

    {
        Section radio = top.child("radio");
        radio.read("carrier_frequency_ghz", cfg.radio.carrier_frequency_ghz);
        radio.read("bandwidth_hz", cfg.radio.bandwidth_hz);
        radio.read("breakpoint_distance_m", cfg.radio.breakpoint_distance_m);
        radio.read("tx_power_ebcs_dbm", cfg.radio.tx_power_ebcs_dbm);
        radio.read("tx_power_sta_dbm", cfg.radio.tx_power_sta_dbm);
        radio.read("noise_power_dbm", cfg.radio.noise_power_dbm);
        radio.reject_unknown();
    }

    top.read("rates", cfg.rate_values);

    {
        Section sc = top.child("scenario");
        ScenarioConfig& s = cfg.scenario;
        sc.read("region_side_m", s.region_side_m);
        sc.read_count("num_bss", s.num_bss);
        sc.read_count("I", s.num_bss);
        sc.read_count("total_stas", s.total_stas);
        sc.read_count("N", s.total_stas);
        sc.read_count("frames_per_step", s.frames_per_step);
        sc.read_count("m", s.frames_per_step);
        sc.read("distance_b_m", s.distance_b_m);
        sc.read("bss_radius_m", s.bss_radius_m);
        if (sc.has("stas_per_bss")) sc.read("stas_per_bss", s.stas_per_bss);
        else s.stas_per_bss = even_split(s.total_stas, s.num_bss);
        std::string scheme = "center-farthest-at-b";
        sc.read("placement_scheme", scheme);
        if (scheme != "center-farthest-at-b")
            throw ConfigError("scenario.placement_scheme: unknown scheme '" + scheme + "'");
        std::uint64_t scenario_seed = s.seed;
        sc.read("seed", scenario_seed);
        s.seed = scenario_seed;
        sc.reject_unknown();
    }

    {
        Section tr = top.child("train");
        TrainConfig& t = cfg.train;
        tr.read_count("episodes", t.episodes);
        tr.read_count("steps_per_episode", t.steps_per_episode);
        tr.read("epsilon", t.epsilon);
        tr.read("learning_rate", t.learning_rate);
        tr.read("discount", t.discount);
        tr.read_count("batch_size", t.batch_size);
        tr.read_count("replay_capacity", t.replay_capacity);
        tr.read_count("target_sync_interval", t.target_sync_interval);
        tr.read("huber_delta", t.huber_delta);
        tr.read_count("hidden_width", t.hidden_width);
        tr.read_count("hidden_layers", t.hidden_layers);
        tr.read("seed", t.seed);
        tr.read_range("distance_b_range_m", cfg.training_distribution.distance_b_m);
        tr.read_range("bss_radius_range_m", cfg.training_distribution.bss_radius_m);
        tr.reject_unknown();
    }

    {
        Section ev = top.child("eval");
        EvalConfig& e = cfg.eval;
        ev.read_count("episodes", e.episodes);
        ev.read_count("steps", e.steps);
        std::string axis(axis_name(e.axis));
        ev.read("sweep", axis);
        if (auto a = parse_axis(axis)) e.axis = *a;
        else throw ConfigError("eval.sweep: expected 'distance' or 'radius', got '" + axis + "'");
        ev.read("distance_values_m", e.distance_values);
        ev.read("radius_values_m", e.radius_values);
        ev.read("fixed_distance_b_m", e.fixed_distance_b_m);
        ev.read("fixed_bss_radius_m", e.fixed_bss_radius_m);
        ev.read_count("workers", e.workers);
        ev.reject_unknown();
    }

    {
        Section out = top.child("output");
        out.read("weights", cfg.output.weights);
        out.read("learning_curve", cfg.output.learning_curve);
        out.read("metrics", cfg.output.metrics);
        out.read("deployments", cfg.output.deployments);
        out.reject_unknown();
    }

    top.reject_unknown();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace ebcs
