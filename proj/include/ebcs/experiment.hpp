#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ebcs/config.hpp"
#include "ebcs/dqn.hpp"
#include "ebcs/env.hpp"
#include "ebcs/policy.hpp"

namespace ebcs {

// Seeds for one evaluation episode. They depend on the master seed, the
// sweep point and the episode index only, never on the method, so every
// method sees the same worlds and the same uplink sampling sequence.
struct EpisodeSeeds {
    std::uint64_t deployment = 0;
    std::uint64_t sampling = 0;
};

EpisodeSeeds episode_seeds(std::uint64_t seed, SweepAxis axis, double value, std::size_t episode);

ScenarioConfig scenario_at(const RunConfig& config, SweepAxis axis, double value);

std::string deployment_label(SweepAxis axis, double value, std::size_t episode);

// Worlds keyed by deployment_label(); replaces generation when supplied.
using DeploymentSet = std::map<std::string, Deployment>;

DeploymentSet to_deployment_set(std::vector<LabeledDeployment> deployments);

Deployment eval_deployment(const RunConfig& config, SweepAxis axis, double value, std::size_t episode,
                           const DeploymentSet* replay = nullptr);

BroadcastEnv make_eval_env(const RunConfig& config, SweepAxis axis, double value, std::size_t episode,
                           const DeploymentSet* replay = nullptr, RewardFn reward = compute_reward);

struct EpisodeOutcome {
    EpisodeMetrics metrics;
    std::vector<std::size_t> rate_counts;  // per rate-table index
    std::vector<double> actions;           // selected rate per step
};

// Application-phase episode: the policy sees observations only; the step
// outcomes are collected by the runner through the environment monitor.
EpisodeOutcome run_episode(const RatePolicy& policy, BroadcastEnv env, std::size_t steps,
                           std::vector<StepRecord>* trace = nullptr);

struct SweepRow {
    SweepAxis axis = SweepAxis::kDistance;
    double value = 0.0;
    Method method = Method::kMinRate;
    double mean_throughput_mbps = 0.0;
    double std_throughput_mbps = 0.0;
    double mean_success_ratio = 0.0;
    double std_success_ratio = 0.0;
    double mean_rate_mbps = 0.0;
    std::size_t episodes = 0;
    std::vector<std::size_t> rate_counts;
};

SweepRow summarize(SweepAxis axis, double value, Method method, std::span<const EpisodeOutcome> outcomes);

// Runs config.eval.episodes episodes per sweep value on a worker pool and
// merges in episode order.
std::vector<SweepRow> run_sweep(const RunConfig& config, const RatePolicy& policy,
                                const DeploymentSet* replay = nullptr);

RatePolicy make_policy(Method method, const RunConfig& config, std::shared_ptr<const TrainedModel> model = nullptr);

// minrate, fore-rule and fore-drl over identical worlds.
std::vector<SweepRow> run_sweep_compare(const RunConfig& config, std::shared_ptr<const TrainedModel> model,
                                        const DeploymentSet* replay = nullptr);

// Header: sweep_axis,sweep_value,method,mean_throughput_mbps,std_throughput_mbps,
//         mean_success_ratio,std_success_ratio,episodes
void write_metrics_csv(std::ostream& out, std::span<const SweepRow> rows);

std::vector<LabeledDeployment> generate_eval_deployments(const RunConfig& config);

// Learning-phase worlds: B and sigma drawn uniformly from the configured
// training ranges, then a deployment generated as for evaluation.
EnvFactory training_env_factory(const RunConfig& config);

// Column header episode,mean_reward.
void write_learning_curve_csv(std::ostream& out, std::span<const double> episode_mean_reward);

}  // namespace ebcs
