#include "ebcs/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace ebcs {

std::string_view method_name(Method method) {
    switch (method) {
        case Method::kMinRate: return "minrate";
        case Method::kForeRule: return "fore-rule";
        case Method::kForeDrl: return "fore-drl";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::kMinRate, Method::kForeRule, Method::kForeDrl})
        if (method_name(m) == name) return m;
    return std::nullopt;
}

double min_rate_select(const Observation&, const RateTable& rates) { return rates.min_rate(); }

std::optional<std::size_t> fo_re_rule_feasible_index(const Observation& obs, const RadioParams& params,
                                                     const RateTable& rates) {
    if (obs.rss_dbm.empty()) throw std::domain_error("fo_re_rule: empty observation");
    const double weakest_rss = *std::min_element(obs.rss_dbm.begin(), obs.rss_dbm.end());
    const double worst_snr_db = estimate_snr_from_rss(weakest_rss, params);
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < rates.size(); ++k)
        if (worst_snr_db >= rates.required_snr_db(k)) best = k;
    return best;
}

double fo_re_rule_select(const Observation& obs, const RadioParams& params, const RateTable& rates) {
    const auto index = fo_re_rule_feasible_index(obs, params, rates);
    return index ? rates.rate(*index) : rates.min_rate();
}

double greedy_select(const QNetwork& network, const StateEncoder& encoder, const RateTable& rates,
                     const Observation& obs) {
    if (network.input_size() != encoder.dimension() || network.output_size() != rates.size())
        throw std::invalid_argument("greedy_select: network shape does not match the encoder or rate table");
    return rates.rate(argmax_lowest(network.forward(encoder.encode(obs))));
}

Method policy_method(const RatePolicy& policy) {
    return std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MinRatePolicy>) return Method::kMinRate;
            else if constexpr (std::is_same_v<P, RulePolicy>) return Method::kForeRule;
            else return Method::kForeDrl;
        },
        policy);
}

}  // namespace ebcs
