// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria. Pass criterion numbers as arguments to run a
// subset, e.g. `acceptance 1 2 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ebcs/channel.hpp"
#include "ebcs/config.hpp"
#include "ebcs/dqn.hpp"
#include "ebcs/env.hpp"
#include "ebcs/experiment.hpp"
#include "ebcs/policy.hpp"
#include "ebcs/qnetwork.hpp"
#include "ebcs/scenario.hpp"

using namespace ebcs;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "!") + what;
    }
};

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

Rng seeded(std::uint64_t s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s), 0xacce97u};
    return Rng(seq);
}

// 1 ---------------------------------------------------------------------
Verdict closed_form() {
    Verdict v;
    const RadioParams radio;
    const RateTable rates;
    const double expected[] = {-4.59, 6.97, 15.41, 21.55};
    for (std::size_t k = 0; k < rates.size(); ++k) {
        const double db = required_snr(rates.rate(k), radio).db();
        v.require(std::abs(db - expected[k]) <= 0.01, "snr_req(" + format_double(rates.rate(k)) + ")=" + fmt(db) + " dB");
    }
    const double pl = path_loss_db(10.0, radio);
    v.require(std::abs(pl - 66.43) <= 0.01, "PL(10m)=" + fmt(pl) + " dB");
    const double r = compute_reward(51.6, 90, 100, 143.4);
    v.require(std::abs(r - (-0.0360)) <= 1e-4, "reward=" + fmt(r, 5));
    return v;
}

// 2 ---------------------------------------------------------------------
Verdict rule_guarantee() {
    const RadioParams radio;
    const RateTable rates;
    Rng rng = seeded(2);
    std::uniform_real_distribution<double> b_dist(10.0, 100.0), s_dist(5.0, 30.0);
    std::size_t steps = 0, feasible = 0, violations = 0;
    for (int world = 0; world < 100; ++world) {
        ScenarioConfig sc;
        sc.distance_b_m = b_dist(rng);
        sc.bss_radius_m = s_dist(rng);
        BroadcastEnv env(generate_deployment(sc, rng), radio, rates, sc.frames_per_step, rng());
        Observation obs = env.reset();
        for (int t = 0; t < 10; ++t, ++steps) {
            const auto index = fo_re_rule_feasible_index(obs, radio, rates);
            const double rate = fo_re_rule_select(obs, radio, rates);
            auto [next, record] = env.step(rate);
            if (index) {
                ++feasible;
                for (bool ok : record.per_sampled_sta_success) violations += !ok;
            }
            obs = next;
        }
    }
    Verdict v;
    v.require(violations == 0, std::to_string(violations) + " violations over " + std::to_string(steps) + " steps (" +
                                   std::to_string(feasible) + " with a feasible rate)");
    return v;
}

// 3 ---------------------------------------------------------------------
Verdict minrate_ceiling() {
    const RadioParams radio;
    const RateTable rates;
    const RatePolicy policy = MinRatePolicy{rates};
    Rng rng = seeded(3);
    std::uniform_real_distribution<double> b_dist(10.0, 100.0), s_dist(5.0, 20.0);
    std::size_t delivered = 0, attempted = 0;
    for (int ep = 0; ep < 200; ++ep) {
        ScenarioConfig sc;
        sc.distance_b_m = b_dist(rng);
        sc.bss_radius_m = s_dist(rng);
        BroadcastEnv env(generate_deployment(sc, rng), radio, rates, sc.frames_per_step, rng());
        std::vector<StepRecord> trace;
        run_episode(policy, std::move(env), 100, &trace);
        for (const StepRecord& r : trace) {
            delivered += r.success_count;
            attempted += sc.total_stas;
        }
    }
    Verdict v;
    const double ratio = static_cast<double>(delivered) / static_cast<double>(attempted);
    v.require(delivered == attempted, "success ratio " + fmt(ratio, 6) + " over 200 episodes");
    return v;
}

// 4 ---------------------------------------------------------------------
Verdict rule_advantage() {
    RunConfig cfg;
    cfg.eval.axis = SweepAxis::kDistance;
    cfg.eval.distance_values = {20.0, 40.0, 60.0};
    cfg.eval.fixed_bss_radius_m = 10.0;
    cfg.eval.episodes = 200;
    cfg.eval.steps = 100;
    const auto minrate = run_sweep(cfg, make_policy(Method::kMinRate, cfg));
    const auto rule = run_sweep(cfg, make_policy(Method::kForeRule, cfg));
    Verdict v;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const std::string at = "B=" + format_double(rule[i].value) + ": ";
        const double gain = rule[i].mean_throughput_mbps / minrate[i].mean_throughput_mbps;
        v.require(gain >= 3.0, at + "throughput x" + fmt(gain, 2));
        v.require(rule[i].mean_success_ratio >= 0.95, at + "success " + fmt(rule[i].mean_success_ratio));
        if (i > 0)
            v.require(rule[i].mean_throughput_mbps <= rule[i - 1].mean_throughput_mbps,
                      at + "throughput " + fmt(rule[i].mean_throughput_mbps, 1) + " <= " +
                          fmt(rule[i - 1].mean_throughput_mbps, 1));
    }
    return v;
}

// 5 ---------------------------------------------------------------------
Verdict drl_advantage() {
    RunConfig cfg;
    cfg.train.episodes = 2'000;
    cfg.training_distribution.distance_b_m = {10.0, 100.0};
    cfg.training_distribution.bss_radius_m = {5.0, 30.0};
    const StateEncoder encoder(cfg.scenario.frames_per_step, cfg.scenario.num_bss);
    const RateTable rates = cfg.rates();
    TrainResult trained = train(training_env_factory(cfg), encoder, rates, cfg.train);
    auto model = std::make_shared<const TrainedModel>(
        TrainedModel{std::move(trained.network), encoder, rates, cfg.radio.bandwidth_hz});

    cfg.eval.axis = SweepAxis::kRadius;
    cfg.eval.radius_values = {20.0, 25.0, 30.0};
    cfg.eval.fixed_distance_b_m = 40.0;
    cfg.eval.episodes = 200;
    cfg.eval.steps = 100;
    const auto rule = run_sweep(cfg, make_policy(Method::kForeRule, cfg));
    const auto drl = run_sweep(cfg, make_policy(Method::kForeDrl, cfg, model));

    Verdict v;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const std::string at = "sigma=" + format_double(rule[i].value) + ": ";
        const double d = drl[i].mean_success_ratio, r = rule[i].mean_success_ratio;
        v.require(d >= r - 0.01, at + "success drl " + fmt(d) + " vs rule " + fmt(r));
        if (rule[i].value == 30.0) {
            v.require(d >= r + 0.02, at + "margin " + fmt(d - r));
            v.require(drl[i].mean_rate_mbps <= rule[i].mean_rate_mbps,
                      at + "rate drl " + fmt(drl[i].mean_rate_mbps, 2) + " vs rule " + fmt(rule[i].mean_rate_mbps, 2));
        }
    }
    return v;
}

// 6 ---------------------------------------------------------------------
Verdict bandit_oracle() {
    ScenarioConfig sc;
    sc.distance_b_m = 40.0;
    sc.bss_radius_m = 15.0;
    Rng world_rng = seeded(6);
    const Deployment world = generate_deployment(sc, world_rng);
    const RadioParams radio;
    const RateTable rates;

    // The channel is deterministic given the deployment, so the expected
    // reward of each action is its reward on the full STA population.
    const BroadcastEnv probe(world, radio, rates, sc.frames_per_step, 0);
    std::vector<double> value(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k)
        value[k] = compute_reward(rates.rate(k), probe.successes_at(k), sc.total_stas, rates.max_rate());
    const std::size_t best = argmax_lowest(value);

    TrainConfig tc;
    tc.episodes = 600;
    tc.discount = 0.0;
    tc.seed = 6;
    const StateEncoder encoder(sc.frames_per_step, sc.num_bss);
    const EnvFactory factory = [&](std::size_t, Rng& rng) {
        return BroadcastEnv(world, radio, rates, sc.frames_per_step, rng());
    };
    const TrainResult trained = train(factory, encoder, rates, tc);

    BroadcastEnv env(world, radio, rates, sc.frames_per_step, 606);
    Observation obs = env.reset();
    std::size_t matches = 0;
    for (int i = 0; i < 100; ++i) {
        const double chosen = greedy_select(trained.network, encoder, rates, obs);
        matches += *rates.index_of(chosen) == best;
        obs = env.step(chosen).next;
    }
    Verdict v;
    std::string values;
    for (double x : value) values += (values.empty() ? "" : ",") + fmt(x, 3);
    v.require(matches >= 90, std::to_string(matches) + "/100 greedy picks match " + format_double(rates.rate(best)) +
                                 " (expected rewards " + values + ")");
    return v;
}

// 7 ---------------------------------------------------------------------
Verdict numerical_core() {
    Verdict v;

    {  // finite differences on a toy network
        Rng rng = seeded(71);
        QNetwork net({3, 4, 4, 4, 4, 4, 2});
        std::uniform_real_distribution<double> u(-0.8, 0.8);
        for (double& p : net.parameters()) p = u(rng);
        const std::vector<double> x{0.6, -0.9, 0.35};
        double worst = 0.0;
        for (std::size_t action : {0u, 1u}) {
            const double q = net.forward(x)(static_cast<Eigen::Index>(action));
            for (double target : {q + 0.4, q - 3.0}) {
                std::vector<double> grad(net.parameter_count(), 0.0);
                net.backward(x, action, target, grad);
                auto params = net.parameters();
                for (std::size_t i = 0; i < params.size(); ++i) {
                    const double saved = params[i], h = 1e-4;
                    params[i] = saved + h;
                    const double up = huber_loss(net.forward(x)(static_cast<Eigen::Index>(action)), target);
                    params[i] = saved - h;
                    const double down = huber_loss(net.forward(x)(static_cast<Eigen::Index>(action)), target);
                    params[i] = saved;
                    const double fd = (up - down) / (2 * h);
                    worst = std::max(worst, std::abs(fd - grad[i]) / std::max(1e-6, std::abs(fd) + std::abs(grad[i])));
                }
            }
        }
        v.require(worst < 1e-3, "gradient rel. error " + fmt(worst, 8));
    }

    {  // Adam first step
        std::vector<double> p{0.5, -1.0, 2.0}, g{3.0, -0.5, 40.0}, m(3, 0.0), s(3, 0.0);
        const auto before = p;
        AdamSettings settings;
        adam_step(p, g, m, s, 1, settings);
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            worst = std::max(worst, std::abs((p[i] - before[i]) + settings.learning_rate * (g[i] > 0 ? 1 : -1)));
        v.require(worst <= 1e-9, "adam first-step deviation " + fmt(worst, 12));
    }

    {  // Huber branches
        const double quad = huber_loss(0.5, 0.0), lin = huber_loss(3.0, 0.0);
        v.require(std::abs(quad - 0.125) < 1e-12 && std::abs(lin - 2.5) < 1e-12,
                  "huber " + fmt(quad, 3) + "," + fmt(lin, 3));
    }

    {  // FIFO eviction
        ReplayBuffer buf(3);
        for (int i = 0; i < 4; ++i) buf.push({{double(i)}, 0, double(i), {double(i)}});
        v.require(buf.size() == 3 && buf.at(0).reward == 1.0 && buf.at(2).reward == 3.0, "replay FIFO eviction");
    }

    {  // epsilon-greedy frequency
        Rng rng = seeded(77);
        const std::vector<double> q{0.1, 0.9, 0.3, 0.2};
        const int draws = 100'000;
        int greedy = 0;
        for (int i = 0; i < draws; ++i) greedy += epsilon_greedy(q, 0.3, rng) == 1;
        const double freq = static_cast<double>(greedy) / draws;
        v.require(std::abs(freq - 0.775) <= 0.01, "eps-greedy greedy freq " + fmt(freq));
    }

    {  // seed determinism of trained weights
        RunConfig cfg;
        cfg.train.episodes = 3;
        cfg.train.steps_per_episode = 50;
        cfg.train.seed = 7;
        const StateEncoder encoder(cfg.scenario.frames_per_step, cfg.scenario.num_bss);
        auto weights = [&] {
            const TrainResult r = train(training_env_factory(cfg), encoder, cfg.rates(), cfg.train);
            std::ostringstream out;
            save_model(out, {r.network, encoder, cfg.rates(), cfg.radio.bandwidth_hz});
            return out.str();
        };
        v.require(weights() == weights(), "trained weights byte-identical");
    }
    return v;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "closed-form values", 1.0, closed_form},
        {2, "rule reception guarantee", 10.0, rule_guarantee},
        {3, "minimum-rate ceiling", 30.0, minrate_ceiling},
        {4, "rule advantage over minimum rate", 120.0, rule_advantage},
        {5, "learned policy advantage at long radii", 900.0, drl_advantage},
        {6, "bandit oracle equivalence", 600.0, bandit_oracle},
        {7, "numerical core", 60.0, numerical_core},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        v.require(elapsed < c.budget_s, fmt(elapsed, 2) + " s of " + fmt(c.budget_s, 0) + " s");
        failures += !v.pass;
        std::printf("%s  C%d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
