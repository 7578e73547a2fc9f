#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebcs/channel.hpp"
#include "ebcs/dqn.hpp"
#include "ebcs/policy.hpp"
#include "ebcs/scenario.hpp"

namespace ebcs {

enum class SweepAxis { kDistance, kRadius };

std::string_view axis_name(SweepAxis axis);
std::optional<SweepAxis> parse_axis(std::string_view name);

struct Range {
    double low = 0.0;
    double high = 0.0;
};

// Per-episode deployment parameters drawn during the learning phase.
struct TrainingDistribution {
    Range distance_b_m{10.0, 100.0};
    Range bss_radius_m{5.0, 30.0};
};

struct EvalConfig {
    std::size_t episodes = 1'000;
    std::size_t steps = 100;
    SweepAxis axis = SweepAxis::kDistance;
    std::vector<double> distance_values = {20, 40, 60, 80, 100};
    std::vector<double> radius_values = {5, 10, 15, 20, 25, 30};
    double fixed_distance_b_m = 40.0;  // held while sweeping the radius
    double fixed_bss_radius_m = 10.0;  // held while sweeping the distance
    std::size_t workers = 0;           // 0: one per hardware thread

    const std::vector<double>& values() const {
        return axis == SweepAxis::kDistance ? distance_values : radius_values;
    }
    std::vector<double>& values() { return axis == SweepAxis::kDistance ? distance_values : radius_values; }
};

struct OutputPaths {
    std::string weights = "qnetwork.txt";
    std::string learning_curve = "learning_curve.csv";
    std::string metrics = "metrics.csv";
    std::string deployments = "deployments.txt";
};

struct RunConfig {
    RadioParams radio;
    std::vector<double> rate_values{std::begin(RateTable::kDefaultRates), std::end(RateTable::kDefaultRates)};
    ScenarioConfig scenario;
    TrainConfig train;
    TrainingDistribution training_distribution;
    EvalConfig eval;
    Method method = Method::kForeRule;
    OutputPaths output;
    std::uint64_t seed = 1;

    RateTable rates() const { return RateTable(rate_values, radio.bandwidth_hz); }

    // Sets the master seed and the module seeds derived from it.
    void set_seed(std::uint64_t value);

    // Throws ConfigError with a dotted field path on the first violation.
    void validate() const;
};

// Unspecified fields keep their defaults. Scenario fields also accept the
// short names m, N and I.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace ebcs
