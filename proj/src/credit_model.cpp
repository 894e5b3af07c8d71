#include "svq/credit_model.hpp"

#include <algorithm>
#include <cmath>

#include "svq/errors.hpp"

namespace svq {

namespace {

void check_params(CreditParams params) {
    const double c = params.credit_per_on_time;
    const double p = params.penalty_per_late;
    if (!std::isfinite(c) || !std::isfinite(p)) {
        throw InvalidParams("credit model parameters must be finite");
    }
    if (c < 0.0 || p < 0.0) {
        throw InvalidParams("credits and penalties must be >= 0");
    }
    if (c + p == 0.0) {
        throw InvalidParams("credit model requires c + p > 0");
    }
}

void check_counts(ServedCounts counts) {
    if (counts.on_time < 0 || counts.late < 0) {
        throw InvalidParams("served counts must be >= 0");
    }
    if (counts.total() == 0) {
        throw NoScorableData("credit model requires at least one served request");
    }
}

} // namespace

CreditQuality credit_quality(CreditParams params, ServedCounts counts) {
    check_params(params);
    check_counts(counts);
    const double c = params.credit_per_on_time;
    const double p = params.penalty_per_late;
    const double h = static_cast<double>(counts.on_time);
    const double l = static_cast<double>(counts.late);

    const double phi_max = c / (c + p);
    const double phi_min = -p / (c + p);

    double phi;
    if (counts.late == 0) {
        phi = phi_max; // c*H / ((c+p)*H) reduces exactly
    } else if (counts.on_time == 0) {
        phi = phi_min; // -p*L / ((c+p)*L) reduces exactly
    } else if (c == p) {
        phi = (h - l) / (2.0 * (h + l)); // equal weights cancel exactly
    } else {
        phi = (c * h - p * l) / ((c + p) * (h + l));
    }
    // Interior rounding may drift past the closed bounds by an ulp.
    phi = std::clamp(phi, phi_min, phi_max);

    return CreditQuality{.phi = phi, .phi_max = phi_max, .phi_min = phi_min};
}

CreditSensitivity credit_sensitivity(ServedCounts counts) {
    check_counts(counts);
    const double h = static_cast<double>(counts.on_time);
    const double l = static_cast<double>(counts.late);
    const double total = h + l;
    return CreditSensitivity{
        .wrt_on_time = l / (total * total),
        .wrt_late = -h / (total * total),
    };
}

double credit_variation(ServedCounts counts, double delta_on_time, double delta_late) {
    check_counts(counts);
    const double h2 = static_cast<double>(counts.on_time) + delta_on_time;
    const double l2 = static_cast<double>(counts.late) + delta_late;
    if (!std::isfinite(h2) || !std::isfinite(l2) || h2 < 0.0 || l2 < 0.0 || h2 + l2 <= 0.0) {
        throw InvalidParams("perturbed counts leave the valid domain");
    }
    const CreditSensitivity s = credit_sensitivity(counts);
    return s.wrt_on_time * delta_on_time + s.wrt_late * delta_late;
}

CreditExtrema credit_extrema(CreditParams params) {
    check_params(params);
    const double c = params.credit_per_on_time;
    const double p = params.penalty_per_late;
    return CreditExtrema{
        .phi_min = -p / (c + p),
        .phi_max = c / (c + p),
        .argmax = "L=0",
        .argmin = "H=0",
    };
}

} // namespace svq
