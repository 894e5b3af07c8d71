#include <doctest.h>

#include <cmath>
#include <sstream>

#include "svq/errors.hpp"
#include "svq/simulate.hpp"

using namespace svq;

namespace {

WorkloadSpec base_spec() {
    WorkloadSpec spec;
    spec.seed = 42;
    spec.n_requests = 500;
    spec.availability_prob = 0.8;
    spec.late_prob_given_available = 0.25;
    spec.unserved_prob = 0.05;
    spec.tau_distribution = TauDistribution::geometric(3.0);
    return spec;
}

std::string render(const GeneratedWorkload& workload, LogFormat format) {
    std::ostringstream out;
    write_log(out, workload.window.records, format);
    return out.str();
}

} // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
    const auto spec = base_spec();
    const auto first = generate(spec);
    const auto second = generate(spec);
    CHECK(render(first, LogFormat::RecordPerLine) == render(second, LogFormat::RecordPerLine));
    CHECK(render(first, LogFormat::DelimitedRows) == render(second, LogFormat::DelimitedRows));

    auto reseeded = spec;
    reseeded.seed = 43;
    CHECK(render(first, LogFormat::RecordPerLine) !=
          render(generate(reseeded), LogFormat::RecordPerLine));
}

TEST_CASE("generated records are schema-valid") {
    const auto workload = generate(base_spec());
    for (const auto& r : workload.window.records) {
        CHECK(validate_record(r).empty());
    }
}

TEST_CASE("classification recovers the generator's ground truth exactly") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        auto spec = base_spec();
        spec.seed = seed;
        spec.n_requests = 300;
        const auto workload = generate(spec);

        ServedCounts recovered;
        std::int64_t unserved = 0;
        for (std::size_t i = 0; i < workload.window.records.size(); ++i) {
            const auto outcome = classify(workload.window.records[i]);
            CHECK(outcome == workload.truth.outcomes[i]);
            switch (outcome.kind()) {
            case ServiceOutcome::Kind::OnTime: ++recovered.on_time; break;
            case ServiceOutcome::Kind::Late: ++recovered.late; break;
            case ServiceOutcome::Kind::Unserved: ++unserved; break;
            }
        }
        CHECK(recovered == workload.truth.counts);
        CHECK(unserved == workload.truth.unserved);
    }
}

TEST_CASE("no late and no unserved attains the credit maximum") {
    auto spec = base_spec();
    spec.late_prob_given_available = 0.0;
    spec.unserved_prob = 0.0;
    const auto workload = generate(spec);
    CHECK(workload.truth.counts.late == 0);
    CHECK(workload.truth.unserved == 0);

    const CreditParams params{3.0, 2.0};
    const CreditQuality q = credit_quality(params, workload.truth.counts);
    CHECK(q.phi == q.phi_max);
    CHECK(q.phi == 3.0 / 5.0);
}

TEST_CASE("fixed tau distribution puts every late record the same days past due") {
    auto spec = base_spec();
    spec.tau_distribution = TauDistribution::fixed(4);
    spec.late_prob_given_available = 0.5;
    const auto workload = generate(spec);
    std::int64_t late_seen = 0;
    for (const auto& r : workload.window.records) {
        const auto outcome = classify(r);
        if (outcome.kind() == ServiceOutcome::Kind::Late) {
            ++late_seen;
            CHECK(derive_tau(r) == 4.0);
        }
    }
    CHECK(late_seen > 0);
}

TEST_CASE("geometric tau distribution stays near its mean") {
    auto spec = base_spec();
    spec.n_requests = 20000;
    spec.late_prob_given_available = 1.0;
    spec.unserved_prob = 0.0;
    spec.tau_distribution = TauDistribution::geometric(4.0);
    const auto workload = generate(spec);
    double sum = 0.0;
    std::int64_t n = 0;
    for (std::size_t i = 0; i < workload.truth.outcomes.size(); ++i) {
        if (workload.truth.outcomes[i].kind() == ServiceOutcome::Kind::Late) {
            sum += static_cast<double>(workload.truth.outcomes[i].tau_days());
            ++n;
        }
    }
    REQUIRE(n == spec.n_requests);
    const double mean = sum / static_cast<double>(n);
    CHECK(mean == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("empirical late share lands in the precomputed binomial band") {
    // 99% interval halfwidth for n=10000 at rate 0.3 is 0.0118; the check
    // uses the frozen 0.015 band.
    WorkloadSpec spec;
    spec.seed = 7;
    spec.n_requests = 10000;
    spec.late_prob_given_available = 0.3;
    spec.unserved_prob = 0.0;
    spec.tau_distribution = TauDistribution::fixed(2);
    const auto workload = generate(spec);
    const auto counts = workload.truth.counts;
    REQUIRE(counts.total() == 10000);
    const double share = static_cast<double>(counts.late) / static_cast<double>(counts.total());
    CHECK(std::abs(share - 0.3) <= 0.015);
}

TEST_CASE("spec violations are rejected") {
    auto spec = base_spec();
    spec.n_requests = 0;
    CHECK_THROWS_AS(generate(spec), InvalidParams);

    spec = base_spec();
    spec.late_prob_given_available = 1.5;
    CHECK_THROWS_AS(generate(spec), InvalidParams);

    spec = base_spec();
    spec.tau_distribution = TauDistribution::geometric(0.5);
    CHECK_THROWS_AS(generate(spec), InvalidParams);

    spec = base_spec();
    spec.content_type_weights = {{ContentType{ContentKind::Ebook, {}}, 0.0}};
    CHECK_THROWS_AS(generate(spec), InvalidParams);
}

TEST_CASE("tau distribution parsing") {
    const auto geo = TauDistribution::parse("geometric:3.5");
    REQUIRE(geo);
    CHECK(geo->kind == TauDistribution::Kind::Geometric);
    CHECK(geo->mean_days == 3.5);
    CHECK(geo->to_string() == "geometric:3.5");

    const auto fixed = TauDistribution::parse("fixed:4");
    REQUIRE(fixed);
    CHECK(fixed->kind == TauDistribution::Kind::Fixed);
    CHECK(fixed->fixed_days == 4);

    CHECK_FALSE(TauDistribution::parse("uniform:2").has_value());
    CHECK_FALSE(TauDistribution::parse("fixed:x").has_value());
}

TEST_CASE("ground truth sidecar lists every request") {
    const auto workload = generate(base_spec());
    std::ostringstream out;
    write_ground_truth(out, workload);
    const std::string text = out.str();
    CHECK(text.find("\"on_time\"") != std::string::npos);
    CHECK(text.find("R000000") != std::string::npos);
    CHECK(text.find("R000499") != std::string::npos);
}
