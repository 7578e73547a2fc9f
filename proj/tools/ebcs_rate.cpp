// Command-line front end: learning-phase training, application-phase
// evaluation sweeps, three-way comparison and deployment export.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ebcs/config.hpp"
#include "ebcs/dqn.hpp"
#include "ebcs/experiment.hpp"
#include "ebcs/policy.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> episodes;
    std::string out;
};

struct SweepOptions {
    std::string sweep;
    std::string values;
    std::string weights;
    std::string deployments;
    std::optional<std::size_t> workers;
};

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> values;
    std::stringstream in(list);
    for (std::string item; std::getline(in, item, ',');) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || item.find_first_not_of(" \t", pos) != std::string::npos)
            throw ebcs::ConfigError("--values: bad number '" + item + "'");
        values.push_back(v);
    }
    if (values.empty()) throw ebcs::ConfigError("--values: empty list");
    return values;
}

ebcs::RunConfig load(const CommonOptions& common) {
    ebcs::RunConfig cfg = common.config_path.empty() ? ebcs::parse_config("") : ebcs::load_config(common.config_path);
    if (common.seed) cfg.set_seed(*common.seed);
    return cfg;
}

void apply_sweep(ebcs::RunConfig& cfg, const CommonOptions& common, const SweepOptions& sweep) {
    if (common.episodes) cfg.eval.episodes = *common.episodes;
    if (!sweep.sweep.empty()) {
        auto axis = ebcs::parse_axis(sweep.sweep);
        if (!axis) throw ebcs::ConfigError("--sweep: expected 'distance' or 'radius'");
        cfg.eval.axis = *axis;
    }
    if (!sweep.values.empty()) cfg.eval.values() = parse_values(sweep.values);
    if (sweep.workers) cfg.eval.workers = *sweep.workers;
    cfg.validate();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

std::optional<ebcs::DeploymentSet> load_replay(const std::string& path) {
    if (path.empty()) return std::nullopt;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read deployments file '" + path + "'");
    return ebcs::to_deployment_set(ebcs::read_deployments(in));
}

std::shared_ptr<const ebcs::TrainedModel> load_weights(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_shared<const ebcs::TrainedModel>(ebcs::load_model_file(path));
}

void print_rows(const std::vector<ebcs::SweepRow>& rows) {
    for (const auto& r : rows)
        std::cout << ebcs::axis_name(r.axis) << '=' << r.value << "  " << ebcs::method_name(r.method)
                  << "  throughput=" << r.mean_throughput_mbps << " Mbit/s  success=" << r.mean_success_ratio
                  << "  mean_rate=" << r.mean_rate_mbps << '\n';
}

int cmd_train(const CommonOptions& common, const std::string& curve_path) {
    ebcs::RunConfig cfg = load(common);
    if (common.episodes) cfg.train.episodes = *common.episodes;
    cfg.validate();
    const std::string weights_path = common.out.empty() ? cfg.output.weights : common.out;
    const std::string curve = curve_path.empty() ? cfg.output.learning_curve : curve_path;
    // Fail on unwritable paths before spending time training.
    auto weights_out = open_output(weights_path);
    auto curve_out = open_output(curve);

    const ebcs::StateEncoder encoder(cfg.scenario.frames_per_step, cfg.scenario.num_bss);
    const ebcs::RateTable rates = cfg.rates();
    ebcs::TrainHooks hooks;
    hooks.on_episode = [&](std::size_t episode, double) {
        if ((episode + 1) % 500 == 0) std::cerr << "episode " << episode + 1 << '/' << cfg.train.episodes << '\n';
    };
    ebcs::TrainResult result = ebcs::train(ebcs::training_env_factory(cfg), encoder, rates, cfg.train, hooks);

    ebcs::save_model(weights_out, {result.network, encoder, rates, cfg.radio.bandwidth_hz});
    ebcs::write_learning_curve_csv(curve_out, result.episode_mean_reward);

    const auto& curve_values = result.episode_mean_reward;
    const std::size_t tail = std::min<std::size_t>(1'000, curve_values.size());
    const double tail_mean =
        tail ? std::accumulate(curve_values.end() - static_cast<std::ptrdiff_t>(tail), curve_values.end(), 0.0) /
                   static_cast<double>(tail)
             : 0.0;
    std::cout << "final " << tail << "-episode mean reward: " << tail_mean << '\n';
    std::cout << "weights: " << weights_path << "\nlearning curve: " << curve << '\n';
    return 0;
}

int cmd_eval(const CommonOptions& common, const SweepOptions& sweep, const std::string& method_name,
             const std::string& trace_path) {
    ebcs::RunConfig cfg = load(common);
    if (!method_name.empty()) {
        auto method = ebcs::parse_method(method_name);
        if (!method) throw ebcs::ConfigError("--method: unknown method '" + method_name + "'");
        cfg.method = *method;
    }
    apply_sweep(cfg, common, sweep);
    const std::string weights = sweep.weights.empty() && cfg.method == ebcs::Method::kForeDrl ? cfg.output.weights
                                                                                                : sweep.weights;
    auto model = cfg.method == ebcs::Method::kForeDrl ? load_weights(weights) : nullptr;
    const ebcs::RatePolicy policy = ebcs::make_policy(cfg.method, cfg, model);
    const auto replay = load_replay(sweep.deployments);
    const ebcs::DeploymentSet* replay_ptr = replay ? &*replay : nullptr;

    auto out = open_output(common.out.empty() ? cfg.output.metrics : common.out);
    const auto rows = ebcs::run_sweep(cfg, policy, replay_ptr);
    ebcs::write_metrics_csv(out, rows);
    print_rows(rows);

    if (!trace_path.empty()) {
        std::vector<ebcs::StepRecord> trace;
        const double value = cfg.eval.values().front();
        ebcs::run_episode(policy, ebcs::make_eval_env(cfg, cfg.eval.axis, value, 0, replay_ptr), cfg.eval.steps,
                          &trace);
        auto trace_out = open_output(trace_path);
        ebcs::write_step_trace(trace_out, trace);
    }
    return 0;
}

int cmd_sweep_compare(const CommonOptions& common, const SweepOptions& sweep) {
    ebcs::RunConfig cfg = load(common);
    apply_sweep(cfg, common, sweep);
    auto model = load_weights(sweep.weights.empty() ? cfg.output.weights : sweep.weights);
    const auto replay = load_replay(sweep.deployments);
    auto out = open_output(common.out.empty() ? cfg.output.metrics : common.out);
    const auto rows = ebcs::run_sweep_compare(cfg, model, replay ? &*replay : nullptr);
    ebcs::write_metrics_csv(out, rows);
    print_rows(rows);
    return 0;
}

int cmd_gen_deployments(const CommonOptions& common, const SweepOptions& sweep) {
    ebcs::RunConfig cfg = load(common);
    apply_sweep(cfg, common, sweep);
    auto out = open_output(common.out.empty() ? cfg.output.deployments : common.out);
    const auto deployments = ebcs::generate_eval_deployments(cfg);
    ebcs::write_deployments(out, deployments);
    std::cout << "wrote " << deployments.size() << " deployments\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ACK-less broadcast rate adaptation simulator"};
    app.require_subcommand(1);

    CommonOptions common;
    SweepOptions sweep;
    std::string method;
    std::string curve_path;
    std::string trace_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "YAML run configuration")->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Master seed");
        sub->add_option("--episodes", common.episodes, "Override the episode count");
        sub->add_option("--out", common.out, "Output path");
    };
    auto add_sweep = [&](CLI::App* sub) {
        sub->add_option("--sweep", sweep.sweep, "Sweep axis: distance | radius");
        sub->add_option("--values", sweep.values, "Comma-separated sweep values in metres");
        sub->add_option("--deployments", sweep.deployments, "Replay worlds from a gen-deployments file");
        sub->add_option("--workers", sweep.workers, "Evaluation threads (0: all cores)");
    };

    auto* train = app.add_subcommand("train", "Learning phase: train the Q-network");
    add_common(train);
    train->add_option("--curve", curve_path, "Learning-curve CSV path");

    auto* eval = app.add_subcommand("eval", "Application phase: evaluate one method over a sweep");
    add_common(eval);
    add_sweep(eval);
    eval->add_option("--method", method, "minrate | fore-rule | fore-drl");
    eval->add_option("--weights", sweep.weights, "Weights file for fore-drl");
    eval->add_option("--trace", trace_path, "Write the step trace of the first episode");

    auto* compare = app.add_subcommand("sweep-compare", "Evaluate all three methods on identical worlds");
    add_common(compare);
    add_sweep(compare);
    compare->add_option("--weights", sweep.weights, "Weights file for fore-drl");

    auto* gen = app.add_subcommand("gen-deployments", "Write the evaluation worlds to a file");
    add_common(gen);
    add_sweep(gen);

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) return cmd_train(common, curve_path);
        if (eval->parsed()) return cmd_eval(common, sweep, method, trace_path);
        if (compare->parsed()) return cmd_sweep_compare(common, sweep);
        if (gen->parsed()) return cmd_gen_deployments(common, sweep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
