#include "ebcs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace ebcs {

EpisodeSeeds episode_seeds(std::uint64_t seed, SweepAxis axis, double value, std::size_t episode) {
    const auto value_bits = std::bit_cast<std::uint64_t>(value);
    const auto ep = static_cast<std::uint64_t>(episode);
    std::seed_seq seq{static_cast<std::uint32_t>(seed),       static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(axis),       static_cast<std::uint32_t>(value_bits),
                      static_cast<std::uint32_t>(value_bits >> 32), static_cast<std::uint32_t>(ep),
                      static_cast<std::uint32_t>(ep >> 32)};
    Rng rng(seq);
    EpisodeSeeds seeds;
    seeds.deployment = rng();
    seeds.sampling = rng();
    return seeds;
}

ScenarioConfig scenario_at(const RunConfig& config, SweepAxis axis, double value) {
    ScenarioConfig sc = config.scenario;
    if (axis == SweepAxis::kDistance) {
        sc.distance_b_m = value;
        sc.bss_radius_m = config.eval.fixed_bss_radius_m;
    } else {
        sc.distance_b_m = config.eval.fixed_distance_b_m;
        sc.bss_radius_m = value;
    }
    return sc;
}

std::string deployment_label(SweepAxis axis, double value, std::size_t episode) {
    return std::string(axis_name(axis)) + "=" + format_double(value) + "/" + std::to_string(episode);
}

DeploymentSet to_deployment_set(std::vector<LabeledDeployment> deployments) {
    DeploymentSet set;
    for (auto& [label, dep] : deployments)
        if (!set.emplace(label, std::move(dep)).second)
            throw std::runtime_error("deployments: duplicate label '" + label + "'");
    return set;
}

Deployment eval_deployment(const RunConfig& config, SweepAxis axis, double value, std::size_t episode,
                           const DeploymentSet* replay) {
    if (replay) {
        const std::string label = deployment_label(axis, value, episode);
        auto it = replay->find(label);
        if (it == replay->end()) throw std::runtime_error("deployments: no world labelled '" + label + "'");
        return it->second;
    }
    Rng rng(episode_seeds(config.seed, axis, value, episode).deployment);
    return generate_deployment(scenario_at(config, axis, value), rng);
}

BroadcastEnv make_eval_env(const RunConfig& config, SweepAxis axis, double value, std::size_t episode,
                           const DeploymentSet* replay, RewardFn reward) {
    return BroadcastEnv(eval_deployment(config, axis, value, episode, replay), config.radio, config.rates(),
                        config.scenario.frames_per_step, episode_seeds(config.seed, axis, value, episode).sampling,
                        std::move(reward));
}

EpisodeOutcome run_episode(const RatePolicy& policy, BroadcastEnv env, std::size_t steps,
                           std::vector<StepRecord>* trace) {
    const RateTable rates = env.rates();
    EpisodeAccumulator acc(env.num_stas());
    EpisodeOutcome outcome;
    outcome.rate_counts.assign(rates.size(), 0);
    outcome.actions.reserve(steps);

    ApplicationEnv world(std::move(env), [&](const StepRecord& record) {
        acc.add(record);
        if (trace) trace->push_back(record);
    });

    Observation obs = world.reset();
    for (std::size_t t = 0; t < steps; ++t) {
        const double rate = select_rate(policy, obs);
        const auto index = rates.index_of(rate);
        if (!index) throw std::logic_error("policy returned a rate outside the table");
        ++outcome.rate_counts[*index];
        outcome.actions.push_back(rate);
        obs = world.step(rate);
    }
    outcome.metrics = acc.metrics();
    return outcome;
}

namespace {

std::pair<double, double> mean_and_stddev(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs job(i) for i in [0, jobs) on `workers` threads; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t jobs, std::size_t workers, Job&& job) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < jobs; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < jobs;) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = jobs;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

SweepRow summarize(SweepAxis axis, double value, Method method, std::span<const EpisodeOutcome> outcomes) {
    SweepRow row;
    row.axis = axis;
    row.value = value;
    row.method = method;
    row.episodes = outcomes.size();
    std::vector<double> throughput, success, rate;
    for (const EpisodeOutcome& o : outcomes) {
        throughput.push_back(o.metrics.mean_aggregated_throughput_mbps);
        success.push_back(o.metrics.mean_success_ratio);
        rate.push_back(o.metrics.mean_rate_mbps);
        if (row.rate_counts.size() < o.rate_counts.size()) row.rate_counts.resize(o.rate_counts.size(), 0);
        for (std::size_t k = 0; k < o.rate_counts.size(); ++k) row.rate_counts[k] += o.rate_counts[k];
    }
    std::tie(row.mean_throughput_mbps, row.std_throughput_mbps) = mean_and_stddev(throughput);
    std::tie(row.mean_success_ratio, row.std_success_ratio) = mean_and_stddev(success);
    row.mean_rate_mbps = mean_and_stddev(rate).first;
    return row;
}

std::vector<SweepRow> run_sweep(const RunConfig& config, const RatePolicy& policy, const DeploymentSet* replay) {
    const EvalConfig& ev = config.eval;
    const std::vector<double>& values = ev.values();
    const std::size_t jobs = values.size() * ev.episodes;
    std::vector<EpisodeOutcome> outcomes(jobs);

    parallel_for(jobs, worker_count(ev.workers, jobs), [&](std::size_t job) {
        const double value = values[job / ev.episodes];
        const std::size_t episode = job % ev.episodes;
        outcomes[job] = run_episode(policy, make_eval_env(config, ev.axis, value, episode, replay), ev.steps);
    });

    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    const Method method = policy_method(policy);
    for (std::size_t v = 0; v < values.size(); ++v) {
        std::span<const EpisodeOutcome> slice(outcomes.data() + v * ev.episodes, ev.episodes);
        rows.push_back(summarize(ev.axis, values[v], method, slice));
    }
    return rows;
}

RatePolicy make_policy(Method method, const RunConfig& config, std::shared_ptr<const TrainedModel> model) {
    switch (method) {
        case Method::kMinRate: return MinRatePolicy{config.rates()};
        case Method::kForeRule: return RulePolicy{config.radio, config.rates()};
        case Method::kForeDrl: {
            if (!model) throw std::invalid_argument("fore-drl needs a weights file (--weights)");
            const RateTable configured = config.rates();
            const auto expected = configured.rates();
            const auto actual = model->rates.rates();
            if (!std::equal(expected.begin(), expected.end(), actual.begin(), actual.end()))
                throw std::invalid_argument("weights file rate table differs from the configured rates");
            if (model->encoder.frames_per_step() != config.scenario.frames_per_step ||
                model->encoder.num_bss() != config.scenario.num_bss)
                throw std::invalid_argument("weights file state shape differs from the configured scenario");
            return DrlPolicy{std::move(model)};
        }
    }
    throw std::invalid_argument("unknown method");
}

std::vector<SweepRow> run_sweep_compare(const RunConfig& config, std::shared_ptr<const TrainedModel> model,
                                        const DeploymentSet* replay) {
    std::vector<SweepRow> rows;
    for (Method m : {Method::kMinRate, Method::kForeRule, Method::kForeDrl}) {
        auto part = run_sweep(config, make_policy(m, config, model), replay);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

void write_metrics_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "sweep_axis,sweep_value,method,mean_throughput_mbps,std_throughput_mbps,mean_success_ratio,"
           "std_success_ratio,episodes\n";
    for (const SweepRow& r : rows) {
        out << axis_name(r.axis) << ',' << format_double(r.value) << ',' << method_name(r.method) << ','
            << format_double(r.mean_throughput_mbps) << ',' << format_double(r.std_throughput_mbps) << ','
            << format_double(r.mean_success_ratio) << ',' << format_double(r.std_success_ratio) << ','
            << r.episodes << '\n';
    }
}

std::vector<LabeledDeployment> generate_eval_deployments(const RunConfig& config) {
    std::vector<LabeledDeployment> out;
    for (double value : config.eval.values())
        for (std::size_t ep = 0; ep < config.eval.episodes; ++ep)
            out.push_back({deployment_label(config.eval.axis, value, ep),
                           eval_deployment(config, config.eval.axis, value, ep)});
    return out;
}

EnvFactory training_env_factory(const RunConfig& config) {
    return [config](std::size_t, Rng& rng) {
        const TrainingDistribution& dist = config.training_distribution;
        ScenarioConfig sc = config.scenario;
        sc.distance_b_m = std::uniform_real_distribution<double>(dist.distance_b_m.low, dist.distance_b_m.high)(rng);
        sc.bss_radius_m = std::uniform_real_distribution<double>(dist.bss_radius_m.low, dist.bss_radius_m.high)(rng);
        Deployment dep = generate_deployment(sc, rng);
        const std::uint64_t sampling_seed = rng();
        return BroadcastEnv(std::move(dep), config.radio, config.rates(), sc.frames_per_step, sampling_seed);
    };
}

void write_learning_curve_csv(std::ostream& out, std::span<const double> episode_mean_reward) {
    out << "episode,mean_reward\n";
    for (std::size_t e = 0; e < episode_mean_reward.size(); ++e)
        out << e << ',' << format_double(episode_mean_reward[e]) << '\n';
}

}  // namespace ebcs
