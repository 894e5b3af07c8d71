#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svq/credit_model.hpp"
#include "svq/ingest.hpp"
#include "svq/profile.hpp"

namespace svq {

/// How many days past the agreed day a late request lands. Geometric draws
/// 1 + G with G geometric so the mean equals mean_days; Fixed always lands
/// exactly `days` past due.
struct TauDistribution {
    enum class Kind { Geometric, Fixed };

    Kind kind = Kind::Fixed;
    double mean_days = 1.0;      // Geometric, must be >= 1
    std::int64_t fixed_days = 1; // Fixed, must be >= 1

    static TauDistribution geometric(double mean_days);
    static TauDistribution fixed(std::int64_t days);
    static std::optional<TauDistribution> parse(std::string_view text); // "geometric:<mean>"|"fixed:<days>"
    std::string to_string() const;
};

/// Synthetic workload description. Outcomes are drawn per request as a
/// decision tree: first unserved vs delivered (unserved_prob), then
/// availability (availability_prob), then on-time vs late for delivered
/// requests (late_prob_given_available, applied to arranged deliveries as
/// well). Request days are uniform over the window at day granularity.
struct WorkloadSpec {
    std::uint64_t seed = 0;
    std::int64_t n_requests = 0;
    double availability_prob = 1.0;
    double late_prob_given_available = 0.0;
    double unserved_prob = 0.0;
    TauDistribution tau_distribution = TauDistribution::fixed(1);
    std::vector<std::pair<ContentType, double>> content_type_weights; // empty = uniform named types
    Day window_start_day = days_from_civil(2025, 1, 1);
    std::int64_t window_days = 90;
};

/// Per-record intended outcome, recoverable by classify().
struct GroundTruth {
    ServedCounts counts;        // delivered requests only
    std::int64_t unserved = 0;
    std::vector<ServiceOutcome> outcomes; // aligned with the emitted records
};

struct GeneratedWorkload {
    ObservationWindow window;
    GroundTruth truth;
};

/// Deterministic for a fixed spec: the stream is mt19937_64 with explicit
/// draw mappings, so identical seeds give byte-identical logs on any
/// platform. Throws InvalidParams on spec violations.
GeneratedWorkload generate(const WorkloadSpec& spec);

/// Sidecar ground-truth report (JSON): counts plus per-request outcomes.
void write_ground_truth(std::ostream& out, const GeneratedWorkload& workload);

} // namespace svq
