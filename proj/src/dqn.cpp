#include "ebcs/dqn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ebcs {

void adam_step(std::span<double> params, std::span<const double> grads, std::span<double> first_moment,
               std::span<double> second_moment, std::uint64_t t, const AdamSettings& s) {
    if (grads.size() != params.size() || first_moment.size() != params.size() ||
        second_moment.size() != params.size())
        throw std::invalid_argument("adam: parameter, gradient and moment shapes differ");
    if (t == 0) throw std::invalid_argument("adam: step counter starts at 1");
    const double correction1 = 1.0 - std::pow(s.beta1, static_cast<double>(t));
    const double correction2 = 1.0 - std::pow(s.beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        first_moment[i] = s.beta1 * first_moment[i] + (1.0 - s.beta1) * grads[i];
        second_moment[i] = s.beta2 * second_moment[i] + (1.0 - s.beta2) * grads[i] * grads[i];
        const double m_hat = first_moment[i] / correction1;
        const double v_hat = second_moment[i] / correction2;
        params[i] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
}

AdamOptimizer::AdamOptimizer(std::size_t parameter_count, AdamSettings settings)
    : settings_(settings), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grads) {
    adam_step(params, grads, m_, v_, ++t_, settings_);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : slots_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay buffer: capacity must be positive");
}

void ReplayBuffer::push(Transition transition) {
    slots_[head_] = std::move(transition);
    head_ = (head_ + 1) % slots_.size();
    if (size_ < slots_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay buffer: index out of range");
    const std::size_t oldest = size_ < slots_.size() ? 0 : head_;
    return slots_[(oldest + i) % slots_.size()];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    if (size_ == 0) throw std::logic_error("replay buffer: sampling from an empty buffer");
    std::uniform_int_distribution<std::size_t> pick(0, size_ - 1);
    std::vector<const Transition*> batch;
    batch.reserve(batch_size);
    for (std::size_t b = 0; b < batch_size; ++b) batch.push_back(&slots_[pick(rng)]);
    return batch;
}

std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
    if (q_values.empty()) throw std::invalid_argument("epsilon_greedy: empty Q-vector");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon_greedy: epsilon outside [0, 1]");
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon)
        return std::uniform_int_distribution<std::size_t>(0, q_values.size() - 1)(rng);
    return argmax_lowest(q_values);
}

double td_target(const Transition& transition, const QNetwork& target_network, double discount) {
    if (discount == 0.0) return transition.reward;
    const Eigen::VectorXd next_q = target_network.forward(transition.next_state);
    return transition.reward + discount * next_q.maxCoeff();
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (steps_per_episode == 0) fail("train.steps_per_episode: must be positive");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("train.epsilon: must lie in [0, 1]");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("train.learning_rate: must be positive");
    if (!(discount >= 0.0 && discount <= 1.0)) fail("train.discount: must lie in [0, 1]");
    if (batch_size == 0) fail("train.batch_size: must be positive");
    if (replay_capacity < batch_size) fail("train.replay_capacity: must be at least batch_size");
    if (target_sync_interval == 0) fail("train.target_sync_interval: must be positive");
    if (!(huber_delta > 0.0)) fail("train.huber_delta: must be positive");
    if (hidden_width == 0) fail("train.hidden_width: must be positive");
}

TrainResult train(const EnvFactory& make_env, const StateEncoder& encoder, const RateTable& rates,
                  const TrainConfig& config, const TrainHooks& hooks) {
    config.validate();

    std::seed_seq agent_seed{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                             0u};
    std::seed_seq env_seed{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                           1u};
    Rng agent_rng(agent_seed);
    Rng env_rng(env_seed);

    TrainResult result{QNetwork::make(encoder.dimension(), rates.size(), config.hidden_width, config.hidden_layers),
                       {},
                       0};
    QNetwork& online = result.network;
    online.initialize(agent_rng);
    QNetwork target = online;

    AdamOptimizer optimizer(online.parameter_count(), AdamSettings{.learning_rate = config.learning_rate});
    ReplayBuffer buffer(config.replay_capacity);
    std::vector<double> grad(online.parameter_count());
    Eigen::MatrixXd batch_states(static_cast<Eigen::Index>(encoder.dimension()),
                                 static_cast<Eigen::Index>(config.batch_size));
    std::vector<std::size_t> batch_actions(config.batch_size);
    std::vector<double> batch_targets(config.batch_size);

    result.episode_mean_reward.reserve(config.episodes);
    for (std::size_t episode = 0; episode < config.episodes; ++episode) {
        BroadcastEnv env = make_env(episode, env_rng);
        std::vector<double> state = encoder.encode(env.reset());
        double reward_sum = 0.0;

        for (std::size_t t = 0; t < config.steps_per_episode; ++t) {
            const Eigen::VectorXd q = online.forward(state);
            const std::size_t action = epsilon_greedy(
                std::span<const double>(q.data(), static_cast<std::size_t>(q.size())), config.epsilon, agent_rng);
            auto [next_obs, record] = env.step(rates.rate(action));
            std::vector<double> next_state = encoder.encode(next_obs);
            reward_sum += record.reward;
            buffer.push({state, action, record.reward, next_state});
            state = std::move(next_state);

            if (buffer.size() < config.batch_size) continue;

            const auto batch = buffer.sample(config.batch_size, agent_rng);
            for (std::size_t b = 0; b < batch.size(); ++b) {
                const Transition& tr = *batch[b];
                batch_states.col(static_cast<Eigen::Index>(b)) =
                    Eigen::Map<const Eigen::VectorXd>(tr.state.data(), static_cast<Eigen::Index>(tr.state.size()));
                batch_actions[b] = tr.action;
                batch_targets[b] = td_target(tr, target, config.discount);
                if (hooks.on_target) hooks.on_target(tr, batch_targets[b]);
            }
            std::fill(grad.begin(), grad.end(), 0.0);
            online.backward_batch(batch_states, batch_actions, batch_targets, grad, config.huber_delta);
            optimizer.step(online.parameters(), grad);
            if (++result.gradient_steps % config.target_sync_interval == 0) target = online;
        }

        const double mean_reward = reward_sum / static_cast<double>(config.steps_per_episode);
        result.episode_mean_reward.push_back(mean_reward);
        if (hooks.on_episode) hooks.on_episode(episode, mean_reward);
    }
    return result;
}

}  // namespace ebcs
