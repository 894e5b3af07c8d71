#include "svq/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>

#include <json.hpp>

#include "svq/errors.hpp"

namespace svq {

namespace {

// Explicit mappings over the raw mt19937_64 stream. The std::* distributions
// are implementation-defined, so none are used here.
class DrawStream {
public:
    explicit DrawStream(std::uint64_t seed) : rng_(seed) {}

    double uniform01() { // [0, 1), 53-bit resolution
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) { // inclusive
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(rng_() % span);
    }

    // 1 + G with G ~ Geometric(q), q = 1/mean, via inversion; mean(result) = mean.
    std::int64_t tau_geometric(double mean) {
        const double q = 1.0 / mean;
        if (q >= 1.0) return 1;
        const double u = uniform01();
        const double g = std::floor(std::log1p(-u) / std::log1p(-q));
        return 1 + static_cast<std::int64_t>(g);
    }

    std::size_t weighted_index(const std::vector<double>& cumulative) {
        const double u = uniform01() * cumulative.back();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        return std::min(idx, cumulative.size() - 1);
    }

private:
    std::mt19937_64 rng_;
};

void check_prob(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidParams(std::string(name) + " must lie in [0, 1]");
    }
}

void check_spec(const WorkloadSpec& spec) {
    if (spec.n_requests < 1) throw InvalidParams("n_requests must be >= 1");
    check_prob(spec.availability_prob, "availability_prob");
    check_prob(spec.late_prob_given_available, "late_prob_given_available");
    check_prob(spec.unserved_prob, "unserved_prob");
    if (spec.window_days < 1) throw InvalidParams("window_days must be >= 1");
    if (spec.tau_distribution.kind == TauDistribution::Kind::Geometric &&
        !(spec.tau_distribution.mean_days >= 1.0)) {
        throw InvalidParams("geometric tau distribution requires mean_days >= 1");
    }
    if (spec.tau_distribution.kind == TauDistribution::Kind::Fixed &&
        spec.tau_distribution.fixed_days < 1) {
        throw InvalidParams("fixed tau distribution requires days >= 1");
    }
    double weight_sum = 0.0;
    for (const auto& [type, weight] : spec.content_type_weights) {
        if (weight < 0.0) throw InvalidParams("content type weights must be >= 0");
        weight_sum += weight;
    }
    if (!spec.content_type_weights.empty() && weight_sum <= 0.0) {
        throw InvalidParams("content type weights must not all be zero");
    }
}

std::vector<std::pair<ContentType, double>> default_type_weights() {
    std::vector<std::pair<ContentType, double>> weights;
    for (ContentKind kind : {ContentKind::PhysicalBook, ContentKind::Ebook, ContentKind::Video,
                             ContentKind::Slides, ContentKind::Journal, ContentKind::Tutorial,
                             ContentKind::Report, ContentKind::Thesis}) {
        weights.emplace_back(ContentType{kind, {}}, 1.0);
    }
    return weights;
}

std::string zero_padded_id(char prefix, std::int64_t n) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%c%06lld", prefix, static_cast<long long>(n));
    return buf;
}

} // namespace

TauDistribution TauDistribution::geometric(double mean_days) {
    TauDistribution d;
    d.kind = Kind::Geometric;
    d.mean_days = mean_days;
    return d;
}

TauDistribution TauDistribution::fixed(std::int64_t days) {
    TauDistribution d;
    d.kind = Kind::Fixed;
    d.fixed_days = days;
    return d;
}

std::optional<TauDistribution> TauDistribution::parse(std::string_view text) {
    constexpr std::string_view geo = "geometric:";
    constexpr std::string_view fix = "fixed:";
    if (text.substr(0, geo.size()) == geo) {
        const auto payload = text.substr(geo.size());
        double mean = 0.0;
        const char* first = payload.data();
        const char* last = first + payload.size();
        auto [ptr, ec] = std::from_chars(first, last, mean);
        if (ec != std::errc() || ptr != last) return std::nullopt;
        return geometric(mean);
    }
    if (text.substr(0, fix.size()) == fix) {
        const auto payload = text.substr(fix.size());
        std::int64_t days = 0;
        const char* first = payload.data();
        const char* last = first + payload.size();
        auto [ptr, ec] = std::from_chars(first, last, days);
        if (ec != std::errc() || ptr != last) return std::nullopt;
        return fixed(days);
    }
    return std::nullopt;
}

std::string TauDistribution::to_string() const {
    if (kind == Kind::Geometric) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "geometric:%g", mean_days);
        return buf;
    }
    return "fixed:" + std::to_string(fixed_days);
}

GeneratedWorkload generate(const WorkloadSpec& spec) {
    check_spec(spec);
    DrawStream draw(spec.seed);

    const auto weights =
        spec.content_type_weights.empty() ? default_type_weights() : spec.content_type_weights;
    std::vector<double> cumulative;
    cumulative.reserve(weights.size());
    double acc = 0.0;
    for (const auto& [type, weight] : weights) {
        acc += weight;
        cumulative.push_back(acc);
    }

    const std::int64_t content_pool = std::max<std::int64_t>(1, spec.n_requests / 4);
    const std::int64_t user_pool = std::max<std::int64_t>(1, spec.n_requests / 3);
    const Day first_day = spec.window_start_day;
    const Day last_day = spec.window_start_day + spec.window_days - 1;

    GeneratedWorkload out;
    out.window.records.reserve(static_cast<std::size_t>(spec.n_requests));
    out.truth.outcomes.reserve(static_cast<std::size_t>(spec.n_requests));

    for (std::int64_t i = 0; i < spec.n_requests; ++i) {
        ServiceProfileRecord r;
        r.request_id = zero_padded_id('R', i);
        r.user_id = zero_padded_id('U', draw.uniform_int(0, user_pool - 1));
        r.content_id = zero_padded_id('C', draw.uniform_int(0, content_pool - 1));
        r.content_type = weights[draw.weighted_index(cumulative)].first;

        const Day request_day = draw.uniform_int(first_day, last_day);
        r.request_time = start_of_day(request_day);

        const bool unserved = draw.bernoulli(spec.unserved_prob);
        const bool available = draw.bernoulli(spec.availability_prob);
        r.content_availability = available ? Availability::Available : Availability::NotAvailable;

        Day agreed = request_day;
        if (!available) {
            const std::int64_t expected = draw.uniform_int(3, 14);
            r.arrangement_status = ArrangementStatus{ArrangementKind::WillArrange, expected};
            r.notification_status = NotificationStatus::Sent;
            r.notification_time = r.request_time;
            agreed = request_day + expected;
        }

        ServiceOutcome outcome = ServiceOutcome::unserved();
        if (unserved) {
            if (!available) {
                r.arrangement_status = ArrangementStatus{ArrangementKind::WillNotArrange, 0};
                r.user_acceptance = UserAcceptance::NotApplicable;
                r.reasons_not_delivered = "procurement not possible";
            } else {
                r.reasons_not_delivered = "copy missing from shelf";
            }
            ++out.truth.unserved;
        } else {
            if (!available) r.user_acceptance = UserAcceptance::Accepted;
            const bool late = draw.bernoulli(spec.late_prob_given_available);
            if (late) {
                const std::int64_t tau =
                    spec.tau_distribution.kind == TauDistribution::Kind::Fixed
                        ? spec.tau_distribution.fixed_days
                        : draw.tau_geometric(spec.tau_distribution.mean_days);
                r.content_delivery_time = start_of_day(agreed + tau);
                r.excess_delay_days = tau;
                outcome = ServiceOutcome::late(tau);
                ++out.truth.counts.late;
            } else {
                // Anywhere on or before the agreed day is on time.
                const Day delivery_day =
                    available ? request_day : draw.uniform_int(request_day, agreed);
                r.content_delivery_time = start_of_day(delivery_day);
                outcome = ServiceOutcome::on_time();
                ++out.truth.counts.on_time;
            }
        }

        out.truth.outcomes.push_back(outcome);
        out.window.records.push_back(std::move(r));
    }

    // content_hits as ingestion would recompute them
    std::map<std::string, std::int64_t> hits;
    for (const auto& r : out.window.records) ++hits[r.content_id];
    for (auto& r : out.window.records) r.content_hits = hits[r.content_id];

    auto [lo, hi] = std::minmax_element(
        out.window.records.begin(), out.window.records.end(),
        [](const auto& a, const auto& b) { return a.request_time < b.request_time; });
    out.window.start = lo->request_time;
    out.window.end = hi->request_time;
    return out;
}

void write_ground_truth(std::ostream& out, const GeneratedWorkload& workload) {
    nlohmann::ordered_json j;
    j["counts"]["on_time"] = workload.truth.counts.on_time;
    j["counts"]["late"] = workload.truth.counts.late;
    j["counts"]["unserved"] = workload.truth.unserved;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < workload.truth.outcomes.size(); ++i) {
        nlohmann::ordered_json row;
        row["request_id"] = workload.window.records[i].request_id;
        row["outcome"] = to_string(workload.truth.outcomes[i]);
        rows.push_back(std::move(row));
    }
    j["outcomes"] = std::move(rows);
    out << j.dump(2) << '\n';
}

} // namespace svq
