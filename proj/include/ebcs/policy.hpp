#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "ebcs/channel.hpp"
#include "ebcs/env.hpp"
#include "ebcs/qnetwork.hpp"

namespace ebcs {

enum class Method { kMinRate, kForeRule, kForeDrl };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

double min_rate_select(const Observation& obs, const RateTable& rates);

// Highest rate whose SNR requirement the worst overheard STA still meets;
// the minimum rate when none qualifies. BSSIDs are not consulted.
double fo_re_rule_select(const Observation& obs, const RadioParams& params, const RateTable& rates);

// Table index chosen by fo_re_rule_select, or nullopt when no rate meets
// the worst overheard SNR (the fallback case).
std::optional<std::size_t> fo_re_rule_feasible_index(const Observation& obs, const RadioParams& params,
                                                     const RateTable& rates);

double greedy_select(const QNetwork& network, const StateEncoder& encoder, const RateTable& rates,
                     const Observation& obs);

struct MinRatePolicy {
    RateTable rates;
    double select(const Observation& obs) const { return min_rate_select(obs, rates); }
};

struct RulePolicy {
    RadioParams radio;
    RateTable rates;
    double select(const Observation& obs) const { return fo_re_rule_select(obs, radio, rates); }
};

struct DrlPolicy {
    // Shared so concurrent evaluation workers can hold one frozen network.
    std::shared_ptr<const TrainedModel> model;
    double select(const Observation& obs) const {
        return greedy_select(model->network, model->encoder, model->rates, obs);
    }
};

using RatePolicy = std::variant<MinRatePolicy, RulePolicy, DrlPolicy>;

inline double select_rate(const RatePolicy& policy, const Observation& obs) {
    return std::visit([&](const auto& p) { return p.select(obs); }, policy);
}

Method policy_method(const RatePolicy& policy);

}  // namespace ebcs
