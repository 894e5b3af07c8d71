#pragma once

#include <cstdint>
#include <string>

namespace svq {

/// Parameters of the credit-based quality model:
///   phi = (c*H - p*L) / ((c + p) * (H + L))
/// with c credits per on-time request and p penalty points per late request.
/// Requires c >= 0, p >= 0 and c + p > 0.
struct CreditParams {
    double credit_per_on_time = 1.0; // c
    double penalty_per_late = 1.0;   // p
};

/// Window counts: requests served on or before the agreed day (H) and after
/// it (L). H + L must be >= 1 for scoring.
struct ServedCounts {
    std::int64_t on_time = 0; // H
    std::int64_t late = 0;    // L

    std::int64_t total() const { return on_time + late; }

    friend bool operator==(const ServedCounts&, const ServedCounts&) = default;
};

struct CreditQuality {
    double phi;
    double phi_max; // c / (c + p), attained iff L == 0
    double phi_min; // -p / (c + p), attained iff H == 0
};

/// Count derivatives of phi. Independent of (c, p):
///   dphi/dH = L / (H + L)^2,  dphi/dL = -H / (H + L)^2.
struct CreditSensitivity {
    double wrt_on_time; // >= 0
    double wrt_late;    // <= 0
};

struct CreditExtrema {
    double phi_min;
    double phi_max;
    std::string argmax; // configuration attaining phi_max
    std::string argmin; // configuration attaining phi_min
};

/// Throws InvalidParams when c + p == 0 (or params are out of domain) and
/// NoScorableData when H + L == 0; an empty window is "no data", never 0.
CreditQuality credit_quality(CreditParams params, ServedCounts counts);

/// Takes no (c, p): the derivatives depend only on the counts.
/// Throws NoScorableData when H + L == 0.
CreditSensitivity credit_sensitivity(ServedCounts counts);

/// First-order estimate of the quality change for count perturbations
/// (delta_on_time, delta_late); perturbed counts must stay >= 0 with a
/// positive total.
double credit_variation(ServedCounts counts, double delta_on_time, double delta_late);

/// Closed-form extrema over all count configurations.
CreditExtrema credit_extrema(CreditParams params);

} // namespace svq
