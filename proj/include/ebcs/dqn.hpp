#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ebcs/env.hpp"
#include "ebcs/qnetwork.hpp"
#include "ebcs/scenario.hpp"

namespace ebcs {

struct AdamSettings {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// One bias-corrected Adam update at step `t` (1-based). `first_moment` and
// `second_moment` carry optimizer state between calls.
void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> first_moment,
               std::span<double> second_moment, std::uint64_t t, const AdamSettings& settings = {});

class AdamOptimizer {
public:
    AdamOptimizer(std::size_t parameter_count, AdamSettings settings = {});

    void step(std::span<double> params, std::span<const double> grads);
    std::uint64_t steps_taken() const { return t_; }

private:
    AdamSettings settings_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::uint64_t t_ = 0;
};

struct Transition {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
};

// Fixed-capacity FIFO; once full, every push evicts the oldest transition.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition transition);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return slots_.size(); }

    // i = 0 is the oldest retained transition.
    const Transition& at(std::size_t i) const;

    // Uniform with replacement.
    std::vector<const Transition*> sample(std::size_t batch_size, Rng& rng) const;

private:
    std::vector<Transition> slots_;
    std::size_t head_ = 0;  // next slot to overwrite
    std::size_t size_ = 0;
};

// With probability epsilon a uniform action over all K, otherwise the
// greedy one (lowest index on ties).
std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng);

// r + discount * max_k Q_target(s')_k. A zero discount returns r without
// evaluating the target network.
double td_target(const Transition& transition, const QNetwork& target_network, double discount);

struct TrainConfig {
    std::size_t episodes = 10'000;
    std::size_t steps_per_episode = 100;
    double epsilon = 0.3;
    double learning_rate = 1e-4;
    double discount = 0.0;
    std::size_t batch_size = 32;
    std::size_t replay_capacity = 10'000;
    std::size_t target_sync_interval = 1'000;
    double huber_delta = 1.0;
    std::size_t hidden_width = kDefaultHiddenWidth;
    std::size_t hidden_layers = kDefaultHiddenLayers;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainResult {
    QNetwork network;
    std::vector<double> episode_mean_reward;
    std::size_t gradient_steps = 0;
};

// Builds the learning-phase world for one episode. The Rng is the
// trainer's environment stream; the factory may draw deployment parameters,
// the deployment itself and the sampling seed from it.
using EnvFactory = std::function<BroadcastEnv(std::size_t episode, Rng& rng)>;

struct TrainHooks {
    std::function<void(std::size_t episode, double mean_reward)> on_episode;
    // Every regression target used in a gradient step, with its transition.
    std::function<void(const Transition&, double target)> on_target;
};

TrainResult train(const EnvFactory& make_env, const StateEncoder& encoder, const RateTable& rates,
                  const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace ebcs
