#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "ebcs/channel.hpp"
#include "ebcs/scenario.hpp"

namespace ebcs {

// What the eBCS AP overhears in one step: RSS and BSSID of m uplink frames.
// Entry j of both vectors describes the same STA.
struct Observation {
    std::vector<double> rss_dbm;
    std::vector<std::size_t> bssid;  // 1-based

    std::size_t size() const { return rss_dbm.size(); }
};

struct StepRecord {
    double action_rate_mbps = 0.0;
    std::size_t success_count = 0;
    double reward = 0.0;
    double aggregated_throughput_mbps = 0.0;
    std::vector<bool> per_sampled_sta_success;
};

struct EpisodeMetrics {
    double mean_aggregated_throughput_mbps = 0.0;
    double mean_success_ratio = 0.0;
    double mean_rate_mbps = 0.0;
    std::size_t steps = 0;
};

class EpisodeAccumulator {
public:
    explicit EpisodeAccumulator(std::size_t total_stas) : total_stas_(total_stas) {}

    void add(const StepRecord& record);
    EpisodeMetrics metrics() const;

private:
    std::size_t total_stas_;
    std::size_t steps_ = 0;
    double throughput_sum_ = 0.0;
    double success_ratio_sum_ = 0.0;
    double rate_sum_ = 0.0;
};

// -(a/a_max)(1 - n/N) on any failure, a/a_max when every STA decodes.
double compute_reward(double action_rate_mbps, std::size_t success_count, std::size_t total, double max_rate_mbps);

using RewardFn = std::function<double(double, std::size_t, std::size_t, double)>;

// Learning-phase world: the full StepRecord, including the reward and the
// success count over all N recipients, is returned to the caller.
class BroadcastEnv {
public:
    struct Transition {
        Observation next;
        StepRecord record;
    };

    BroadcastEnv(Deployment deployment, RadioParams radio, RateTable rates, std::size_t frames_per_step,
                 std::uint64_t sampling_seed, RewardFn reward = compute_reward);

    Observation reset();
    Transition step(double action_rate_mbps);

    // Recipients that decode a broadcast at table rate `rate_index`; pure.
    std::size_t successes_at(std::size_t rate_index) const;

    const Deployment& deployment() const { return deployment_; }
    const RadioParams& radio() const { return radio_; }
    const RateTable& rates() const { return rates_; }
    std::size_t frames_per_step() const { return frames_per_step_; }
    std::size_t num_stas() const { return deployment_.num_stas(); }

private:
    Observation draw_observation();

    Deployment deployment_;
    RadioParams radio_;
    RateTable rates_;
    std::size_t frames_per_step_;
    Rng sampling_rng_;
    RewardFn reward_;
    std::vector<double> sta_distance_m_;
    std::vector<double> sta_snr_db_;
    std::vector<std::size_t> current_sample_;
    std::optional<Observation> current_;
};

// Application-phase view. Only observations flow back to the rate
// controller; step outcomes go to an optional monitor owned by whoever runs
// the experiment, never to the controller.
class ApplicationEnv {
public:
    using Monitor = std::function<void(const StepRecord&)>;

    explicit ApplicationEnv(BroadcastEnv env, Monitor monitor = {});

    Observation reset();
    Observation step(double action_rate_mbps);

    std::size_t frames_per_step() const { return env_.frames_per_step(); }

private:
    BroadcastEnv env_;
    Monitor monitor_;
};

// Affine map of [min_dbm, max_dbm] onto [-1, 1], clipped outside.
struct RssNormalization {
    double min_dbm = -100.0;
    double max_dbm = -30.0;

    double apply(double rss_dbm) const;
};

// Network input layout: for each of the m frames, one normalised RSS value
// followed by an I-wide one-hot BSSID.
class StateEncoder {
public:
    StateEncoder(std::size_t frames_per_step, std::size_t num_bss, RssNormalization norm = {});

    std::size_t dimension() const { return frames_per_step_ * (1 + num_bss_); }
    std::size_t frames_per_step() const { return frames_per_step_; }
    std::size_t num_bss() const { return num_bss_; }
    const RssNormalization& normalization() const { return norm_; }

    std::vector<double> encode(const Observation& obs) const;
    void encode_into(const Observation& obs, std::span<double> out) const;

private:
    std::size_t frames_per_step_;
    std::size_t num_bss_;
    RssNormalization norm_;
};

std::vector<double> encode_state(const Observation& obs, std::size_t num_bss, RssNormalization norm = {});

// CSV with header step,action_rate_mbps,success_count,reward,aggregated_throughput_mbps.
void write_step_trace(std::ostream& out, std::span<const StepRecord> records);

}  // namespace ebcs
