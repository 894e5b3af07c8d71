#include "svq/delay_model.hpp"

#include <cmath>

#include "svq/errors.hpp"

namespace svq {

namespace {

void check_domain(DelayParams params) {
    if (!std::isfinite(params.penalty_per_day) || !std::isfinite(params.excess_days)) {
        throw InvalidParams("delay model parameters must be finite");
    }
    if (params.penalty_per_day < 0.0) {
        throw InvalidParams("penalty_per_day must be >= 0");
    }
    if (params.excess_days < 0.0) {
        throw InvalidParams("excess_days must be >= 0");
    }
}

} // namespace

DelayQuality delay_quality(DelayParams params) {
    check_domain(params);
    const double p = params.penalty_per_day;
    const double tau = params.excess_days;
    return DelayQuality{
        .phi = 1.0 + p * std::exp(-p * tau),
        .phi_max = 1.0 + p,
        .phi_min = 1.0,
    };
}

double average_quality(std::span<const double> scores) {
    if (scores.empty()) {
        throw NoScorableData("average_quality over an empty score set");
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / static_cast<double>(scores.size());
}

DelaySensitivity delay_sensitivity(DelayParams params) {
    check_domain(params);
    const double p = params.penalty_per_day;
    const double tau = params.excess_days;
    const double decay = std::exp(-p * tau);
    return DelaySensitivity{
        .wrt_penalty = (1.0 - p * tau) * decay,
        .wrt_delay = -p * p * decay,
    };
}

double delay_variation(DelayParams params, double delta_penalty, double delta_delay) {
    check_domain(params);
    check_domain(DelayParams{params.penalty_per_day + delta_penalty,
                             params.excess_days + delta_delay});
    const DelaySensitivity s = delay_sensitivity(params);
    return s.wrt_penalty * delta_penalty + s.wrt_delay * delta_delay;
}

} // namespace svq
