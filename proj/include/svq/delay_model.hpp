#pragma once

#include <span>

namespace svq {

/// Parameters of the delay-based quality model: phi(p, tau) = 1 + p*exp(-p*tau)
/// with p >= 0 penalty points per day and tau >= 0 excess delay in days.
/// tau is accepted as a real so curves and derivative checks can sample
/// densely, even though ingestion produces whole days.
struct DelayParams {
    double penalty_per_day = 0.0; // p
    double excess_days = 0.0;     // tau
};

struct DelayQuality {
    double phi;     // 1 + p*exp(-p*tau)
    double phi_max; // 1 + p, attained iff tau == 0
    double phi_min; // 1, approached as tau -> inf, attained at p == 0
};

/// Partial derivatives of phi. d/dtau is always <= 0; d/dp carries the sign
/// of (1 - p*tau).
struct DelaySensitivity {
    double wrt_penalty; // dphi/dp   = (1 - p*tau) * exp(-p*tau)
    double wrt_delay;   // dphi/dtau = -p^2 * exp(-p*tau)
};

/// Throws InvalidParams if p < 0, tau < 0, or either is non-finite.
DelayQuality delay_quality(DelayParams params);

/// Mean of per-request scores. Throws NoScorableData on an empty span.
double average_quality(std::span<const double> scores);

/// Throws InvalidParams on the same domain violations as delay_quality.
DelaySensitivity delay_sensitivity(DelayParams params);

/// First-order estimate of the quality change for perturbations
/// (delta_penalty, delta_delay). The perturbed point must stay inside
/// p >= 0, tau >= 0.
double delay_variation(DelayParams params, double delta_penalty, double delta_delay);

} // namespace svq
