#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace ebcs {

// Link-budget parameters. Powers in dBm, frequency in GHz, bandwidth in Hz.
struct RadioParams {
    double carrier_frequency_ghz = 5.0;
    double bandwidth_hz = 20e6;
    double breakpoint_distance_m = 10.0;
    double tx_power_ebcs_dbm = 10.0;
    double tx_power_sta_dbm = 10.0;
    // Thermal floor over 20 MHz (-174 dBm/Hz + 73 dB), rounded, 0 dB noise figure.
    double noise_power_dbm = -101.0;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Discrete broadcast rates in Mbit/s, strictly increasing, with the Shannon
// SNR threshold of every rate cached at construction.
class RateTable {
public:
    static constexpr double kDefaultRates[] = {8.6, 51.6, 103.2, 143.4};

    RateTable();
    explicit RateTable(std::vector<double> rates_mbps, double bandwidth_hz = 20e6);

    std::size_t size() const { return rates_.size(); }
    double rate(std::size_t index) const { return rates_.at(index); }
    double min_rate() const { return rates_.front(); }
    double max_rate() const { return rates_.back(); }
    double required_snr_db(std::size_t index) const { return required_snr_db_.at(index); }
    std::span<const double> rates() const { return rates_; }

    // Exact match lookup; rates are configuration constants, never computed.
    std::optional<std::size_t> index_of(double rate_mbps) const;

private:
    std::vector<double> rates_;
    std::vector<double> required_snr_db_;
};

// Shannon requirement 2^(a/W) - 1 for a rate given in Mbit/s.
struct RequiredSnr {
    double linear;
    double db() const;
};

inline constexpr double kMinDistanceM = 0.1;

// Indoor breakpoint model: free-space-like slope up to the breakpoint,
// 35 dB/decade beyond it. Distances below kMinDistanceM are clamped.
double path_loss_db(double distance_m, const RadioParams& params);

double rss_at_observer_dbm(double distance_m, const RadioParams& params);

// Recovers the link loss from an overheard uplink RSS and projects the
// downlink SNR of the broadcast at that STA.
double estimate_snr_from_rss(double rss_dbm, const RadioParams& params);

RequiredSnr required_snr(double rate_mbps, const RadioParams& params);
RequiredSnr required_snr(double rate_mbps, double bandwidth_hz);

double broadcast_snr_db(double distance_m, const RadioParams& params);

bool broadcast_reception_ok(double distance_m, double rate_mbps, const RadioParams& params);

// Largest distance at which `rate_mbps` is still decodable (closed-form
// inversion of the path-loss model).
double coverage_radius_m(double rate_mbps, const RadioParams& params);

}  // namespace ebcs
