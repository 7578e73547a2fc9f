#include "ebcs/env.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ebcs {

void EpisodeAccumulator::add(const StepRecord& record) {
    ++steps_;
    throughput_sum_ += record.aggregated_throughput_mbps;
    success_ratio_sum_ += static_cast<double>(record.success_count) / static_cast<double>(total_stas_);
    rate_sum_ += record.action_rate_mbps;
}

EpisodeMetrics EpisodeAccumulator::metrics() const {
    if (steps_ == 0) return {};
    const auto n = static_cast<double>(steps_);
    return {throughput_sum_ / n, success_ratio_sum_ / n, rate_sum_ / n, steps_};
}

double compute_reward(double action_rate_mbps, std::size_t success_count, std::size_t total, double max_rate_mbps) {
    if (success_count > total) throw std::domain_error("reward: success count exceeds total recipients");
    if (!(action_rate_mbps > 0) || !(max_rate_mbps > 0)) throw std::domain_error("reward: rates must be positive");
    const double scaled_rate = action_rate_mbps / max_rate_mbps;
    if (success_count == total) return scaled_rate;
    return -scaled_rate * (1.0 - static_cast<double>(success_count) / static_cast<double>(total));
}

BroadcastEnv::BroadcastEnv(Deployment deployment, RadioParams radio, RateTable rates, std::size_t frames_per_step,
                           std::uint64_t sampling_seed, RewardFn reward)
    : deployment_(std::move(deployment)),
      radio_(radio),
      rates_(std::move(rates)),
      frames_per_step_(frames_per_step),
      sampling_rng_(sampling_seed),
      reward_(std::move(reward)) {
    if (frames_per_step_ > deployment_.num_stas())
        throw std::domain_error("env: frames_per_step exceeds the number of STAs");
    sta_distance_m_.reserve(deployment_.num_stas());
    sta_snr_db_.reserve(deployment_.num_stas());
    for (const Station& s : deployment_.stations) {
        const double d = std::max(distance(deployment_.ebcs_ap, s.position), kMinDistanceM);
        sta_distance_m_.push_back(d);
        sta_snr_db_.push_back(broadcast_snr_db(d, radio_));
    }
}

Observation BroadcastEnv::draw_observation() {
    current_sample_ = sample_uplink_stas(deployment_.num_stas(), frames_per_step_, sampling_rng_);
    Observation obs;
    obs.rss_dbm.reserve(frames_per_step_);
    obs.bssid.reserve(frames_per_step_);
    for (std::size_t idx : current_sample_) {
        obs.rss_dbm.push_back(rss_at_observer_dbm(sta_distance_m_[idx], radio_));
        obs.bssid.push_back(deployment_.stations[idx].bss);
    }
    return obs;
}

Observation BroadcastEnv::reset() {
    current_ = draw_observation();
    return *current_;
}

std::size_t BroadcastEnv::successes_at(std::size_t rate_index) const {
    const double threshold = rates_.required_snr_db(rate_index);
    return static_cast<std::size_t>(
        std::count_if(sta_snr_db_.begin(), sta_snr_db_.end(), [&](double snr) { return snr >= threshold; }));
}

BroadcastEnv::Transition BroadcastEnv::step(double action_rate_mbps) {
    if (!current_) throw std::logic_error("env: step() called before reset()");
    const auto rate_index = rates_.index_of(action_rate_mbps);
    if (!rate_index) throw std::domain_error("env: rate " + format_double(action_rate_mbps) + " is not in the rate table");

    StepRecord record;
    record.action_rate_mbps = action_rate_mbps;
    record.success_count = successes_at(*rate_index);
    record.reward = reward_(action_rate_mbps, record.success_count, deployment_.num_stas(), rates_.max_rate());
    record.aggregated_throughput_mbps = action_rate_mbps * static_cast<double>(record.success_count);
    const double threshold = rates_.required_snr_db(*rate_index);
    record.per_sampled_sta_success.reserve(current_sample_.size());
    for (std::size_t idx : current_sample_) record.per_sampled_sta_success.push_back(sta_snr_db_[idx] >= threshold);

    current_ = draw_observation();
    return {*current_, std::move(record)};
}

ApplicationEnv::ApplicationEnv(BroadcastEnv env, Monitor monitor)
    : env_(std::move(env)), monitor_(std::move(monitor)) {}

Observation ApplicationEnv::reset() { return env_.reset(); }

Observation ApplicationEnv::step(double action_rate_mbps) {
    auto [next, record] = env_.step(action_rate_mbps);
    if (monitor_) monitor_(record);
    return std::move(next);
}

double RssNormalization::apply(double rss_dbm) const {
    const double scaled = 2.0 * (rss_dbm - min_dbm) / (max_dbm - min_dbm) - 1.0;
    return std::clamp(scaled, -1.0, 1.0);
}

StateEncoder::StateEncoder(std::size_t frames_per_step, std::size_t num_bss, RssNormalization norm)
    : frames_per_step_(frames_per_step), num_bss_(num_bss), norm_(norm) {
    if (frames_per_step_ == 0 || num_bss_ == 0) throw std::invalid_argument("encoder: empty state shape");
    if (!(norm_.max_dbm > norm_.min_dbm)) throw std::invalid_argument("encoder: empty RSS normalisation range");
}

void StateEncoder::encode_into(const Observation& obs, std::span<double> out) const {
    if (obs.rss_dbm.size() != frames_per_step_ || obs.bssid.size() != frames_per_step_)
        throw std::invalid_argument("encoder: observation has " + std::to_string(obs.size()) + " frames, expected " +
                                    std::to_string(frames_per_step_));
    if (out.size() != dimension()) throw std::invalid_argument("encoder: output span has the wrong length");
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t stride = 1 + num_bss_;
    for (std::size_t j = 0; j < frames_per_step_; ++j) {
        const std::size_t bss = obs.bssid[j];
        if (bss == 0 || bss > num_bss_)
            throw std::domain_error("encoder: bssid " + std::to_string(bss) + " outside [1, " +
                                    std::to_string(num_bss_) + "]");
        out[j * stride] = norm_.apply(obs.rss_dbm[j]);
        out[j * stride + bss] = 1.0;
    }
}

std::vector<double> StateEncoder::encode(const Observation& obs) const {
    std::vector<double> features(dimension());
    encode_into(obs, features);
    return features;
}

std::vector<double> encode_state(const Observation& obs, std::size_t num_bss, RssNormalization norm) {
    return StateEncoder(obs.size(), num_bss, norm).encode(obs);
}

void write_step_trace(std::ostream& out, std::span<const StepRecord> records) {
    out << "step,action_rate_mbps,success_count,reward,aggregated_throughput_mbps\n";
    for (std::size_t t = 0; t < records.size(); ++t) {
        const StepRecord& r = records[t];
        out << t << ',' << format_double(r.action_rate_mbps) << ',' << r.success_count << ','
            << format_double(r.reward) << ',' << format_double(r.aggregated_throughput_mbps) << '\n';
    }
}

}  // namespace ebcs
