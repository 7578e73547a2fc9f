#include "ebcs/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ebcs {

namespace {

constexpr double kReferenceLossDb = 40.05;
constexpr double kReferenceFrequencyGhz = 2.4;
constexpr double kFarSlopeDbPerDecade = 35.0;
constexpr double kNearSlopeDbPerDecade = 20.0;

double near_intercept_db(const RadioParams& params) {
    return kReferenceLossDb + 20.0 * std::log10(params.carrier_frequency_ghz / kReferenceFrequencyGhz);
}

}  // namespace

void RadioParams::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw std::invalid_argument(std::string("radio.") + field + " must be positive and finite");
    };
    require(std::isfinite(carrier_frequency_ghz) && carrier_frequency_ghz > 0, "carrier_frequency_ghz");
    require(std::isfinite(bandwidth_hz) && bandwidth_hz > 0, "bandwidth_hz");
    require(std::isfinite(breakpoint_distance_m) && breakpoint_distance_m > 0, "breakpoint_distance_m");
    if (!std::isfinite(tx_power_ebcs_dbm) || !std::isfinite(tx_power_sta_dbm) || !std::isfinite(noise_power_dbm))
        throw std::invalid_argument("radio: transmit and noise powers must be finite");
}

RateTable::RateTable() : RateTable(std::vector<double>(std::begin(kDefaultRates), std::end(kDefaultRates))) {}

RateTable::RateTable(std::vector<double> rates_mbps, double bandwidth_hz) : rates_(std::move(rates_mbps)) {
    if (rates_.empty()) throw std::invalid_argument("rates: table must contain at least one rate");
    for (std::size_t k = 0; k < rates_.size(); ++k) {
        if (!(rates_[k] > 0) || !std::isfinite(rates_[k]))
            throw std::invalid_argument("rates[" + std::to_string(k) + "]: must be positive");
        if (k > 0 && !(rates_[k] > rates_[k - 1]))
            throw std::invalid_argument("rates[" + std::to_string(k) + "]: table must be strictly increasing");
    }
    required_snr_db_.reserve(rates_.size());
    for (double r : rates_) required_snr_db_.push_back(required_snr(r, bandwidth_hz).db());
}

std::optional<std::size_t> RateTable::index_of(double rate_mbps) const {
    auto it = std::find(rates_.begin(), rates_.end(), rate_mbps);
    if (it == rates_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - rates_.begin());
}

double RequiredSnr::db() const { return 10.0 * std::log10(linear); }

double path_loss_db(double distance_m, const RadioParams& params) {
    if (!(distance_m > 0)) throw std::domain_error("path_loss: distance must be positive");
    const double d = std::max(distance_m, kMinDistanceM);
    const double d_bp = params.breakpoint_distance_m;
    double loss = near_intercept_db(params) + kNearSlopeDbPerDecade * std::log10(std::min(d, d_bp));
    if (d > d_bp) loss += kFarSlopeDbPerDecade * std::log10(d / d_bp);
    return loss;
}

double rss_at_observer_dbm(double distance_m, const RadioParams& params) {
    return params.tx_power_sta_dbm - path_loss_db(distance_m, params);
}

double estimate_snr_from_rss(double rss_dbm, const RadioParams& params) {
    const double link_loss_db = params.tx_power_sta_dbm - rss_dbm;
    return params.tx_power_ebcs_dbm - link_loss_db - params.noise_power_dbm;
}

RequiredSnr required_snr(double rate_mbps, double bandwidth_hz) {
    if (!(rate_mbps > 0)) throw std::domain_error("required_snr: rate must be positive");
    const double spectral_efficiency = rate_mbps * 1e6 / bandwidth_hz;
    return {std::expm1(spectral_efficiency * std::log(2.0))};
}

RequiredSnr required_snr(double rate_mbps, const RadioParams& params) {
    return required_snr(rate_mbps, params.bandwidth_hz);
}

double broadcast_snr_db(double distance_m, const RadioParams& params) {
    return params.tx_power_ebcs_dbm - path_loss_db(distance_m, params) - params.noise_power_dbm;
}

bool broadcast_reception_ok(double distance_m, double rate_mbps, const RadioParams& params) {
    return broadcast_snr_db(distance_m, params) >= required_snr(rate_mbps, params).db();
}

double coverage_radius_m(double rate_mbps, const RadioParams& params) {
    const double budget_db =
        params.tx_power_ebcs_dbm - params.noise_power_dbm - required_snr(rate_mbps, params).db();
    const double d_bp = params.breakpoint_distance_m;
    const double loss_at_bp = path_loss_db(d_bp, params);
    if (budget_db >= loss_at_bp) return d_bp * std::pow(10.0, (budget_db - loss_at_bp) / kFarSlopeDbPerDecade);
    const double d = std::pow(10.0, (budget_db - near_intercept_db(params)) / kNearSlopeDbPerDecade);
    return d < kMinDistanceM ? 0.0 : d;
}

}  // namespace ebcs
