#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "svq/cli.hpp"
#include "svq/report.hpp"
#include "svq/simulate.hpp"

using namespace svq;

namespace {

struct TempFile {
    std::string path;

    explicit TempFile(std::string name, const std::string& contents = {})
        : path(std::move(name)) {
        if (!contents.empty()) {
            std::ofstream out(path, std::ios::binary);
            out << contents;
        }
    }
    ~TempFile() { std::remove(path.c_str()); }
};

std::string jsonl_line(const char* id, const char* request, const char* delivery,
                       const char* type = "Ebook") {
    std::string line = R"({"request_id":")" + std::string(id) +
                       R"(","request_time":")" + request +
                       R"(","user_id":"U1","content_id":"C-)" + id +
                       R"(","content_type":")" + type +
                       R"(","content_availability":"Available")";
    if (delivery != nullptr) {
        line += R"(,"content_delivery_time":")" + std::string(delivery) + R"(")";
    } else {
        line += R"(,"reasons_not_delivered":"missing")";
    }
    line += "}\n";
    return line;
}

} // namespace

TEST_CASE("delay-vs-tau curve hits its anchors and decreases") {
    const CurveTable table = curve_quality_vs_delay();
    REQUIRE(table.series.size() == 2);
    REQUIRE(table.x.size() == 101);
    CHECK(table.x.front() == 0.0);
    CHECK(table.series[0].front() == 2.0); // p=1 at tau=0
    CHECK(table.series[1].front() == 3.0); // p=2 at tau=0
    for (const auto& series : table.series) {
        for (std::size_t i = 1; i < series.size(); ++i) {
            CHECK(series[i] < series[i - 1]);
        }
    }
}

TEST_CASE("quality-vs-penalty curve starts at one and peaks at p = 1/tau") {
    const CurveTable table = curve_quality_vs_penalty();
    REQUIRE(table.series.size() == 2);
    CHECK(table.series[0].front() == 1.0); // p=0 scores exactly 1
    CHECK(table.series[1].front() == 1.0);

    const auto& tau1 = table.series[0];
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < tau1.size(); ++i) {
        if (tau1[i] > tau1[argmax]) argmax = i;
    }
    CHECK(table.x[argmax] == 1.0);
    CHECK(tau1[argmax] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("credit curve crosses zero exactly where late equals on-time") {
    const CurveTable table = curve_quality_vs_late();
    REQUIRE(table.series.size() == 2);
    REQUIRE(table.x.size() == 41);
    const auto check_series = [&table](std::size_t idx, std::int64_t on_time) {
        const auto& series = table.series[idx];
        for (std::size_t i = 1; i < series.size(); ++i) CHECK(series[i] < series[i - 1]);
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto late = static_cast<std::int64_t>(table.x[i]);
            if (late == on_time) CHECK(series[i] == 0.0);
            if (late > on_time) CHECK(series[i] < 0.0);
            if (late < on_time) CHECK(series[i] > 0.0);
        }
    };
    check_series(0, 10);
    check_series(1, 20);
}

TEST_CASE("curve tables render as commented tab-separated columns") {
    std::ostringstream out;
    write_curve(out, curve_quality_vs_late({10}, 2));
    const std::string text = out.str();
    CHECK(text.find("# L\tphi[H=10]") != std::string::npos);
    CHECK(text.find("\n0\t0.5\n") != std::string::npos);
    CHECK(text.find("\n2\t") != std::string::npos);
}

TEST_CASE("alert evaluation thresholds") {
    QualityReport report;
    report.overall.counts = ServedCounts{4, 6};
    report.overall.credit = CreditSummary{.params = {1.0, 1.0},
                                          .phi = -0.1,
                                          .phi_min = -0.5,
                                          .phi_max = 0.5,
                                          .sensitivity = {}};

    SUBCASE("negative quality raises one alert") {
        const auto alerts = alert_evaluation(report, AlertThresholds{0.0});
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].code == "credit_quality_below_threshold");
        CHECK(alerts[0].message.find("negative") != std::string::npos);
        CHECK(alerts[0].counts == ServedCounts{4, 6});
    }
    SUBCASE("healthy quality stays quiet") {
        report.overall.credit->phi = 0.4;
        CHECK(alert_evaluation(report, AlertThresholds{0.0}).empty());
    }
    SUBCASE("a raised threshold fires on positive quality") {
        report.overall.credit->phi = 0.4;
        const auto alerts = alert_evaluation(report, AlertThresholds{0.45});
        REQUIRE(alerts.size() == 1);
        CHECK(alerts[0].threshold == 0.45);
    }
    SUBCASE("no credit section, no credit alerts") {
        report.overall.credit.reset();
        CHECK(alert_evaluation(report, AlertThresholds{0.0}).empty());
    }
}

TEST_CASE("score command produces a consistent report") {
    std::string log;
    // Two Ebooks on time, one Video a day late, one Video unserved.
    log += jsonl_line("r1", "2025-06-01T08:00:00Z", "2025-06-01T09:00:00Z");
    log += jsonl_line("r2", "2025-06-02T08:00:00Z", "2025-06-02T09:00:00Z");
    log += jsonl_line("r3", "2025-06-03T08:00:00Z", "2025-06-04T09:00:00Z", "Video");
    log += jsonl_line("r4", "2025-06-04T08:00:00Z", nullptr, "Video");
    TempFile input("score_cmd_input.jsonl", log);

    cli::ScoreArgs args;
    args.input_path = input.path;
    args.penalty_per_day = 1.0;
    args.credit_params = CreditParams{1.0, 1.0};
    args.policy.mode = UnservedPolicy::Mode::Exclude;

    std::ostringstream out, err;
    REQUIRE(cli::score_command(args, out, err) == cli::exit_ok);

    const auto report = nlohmann::json::parse(out.str());
    CHECK(report["schema_version"] == 1);
    CHECK(report["records"]["classified"] == 4);
    CHECK(report["overall"]["scored"]["on_time"] == 2);
    CHECK(report["overall"]["scored"]["late"] == 1);
    CHECK(report["overall"]["outcomes"]["unserved"] == 1);

    const double mean = report["overall"]["delay"]["mean_phi"].get<double>();
    const double lo = report["overall"]["delay"]["min_phi"].get<double>();
    const double hi = report["overall"]["delay"]["max_phi"].get<double>();
    CHECK(lo <= mean);
    CHECK(mean <= hi);

    const double phi = report["overall"]["credit"]["phi"].get<double>();
    CHECK(phi >= report["overall"]["credit"]["phi_min"].get<double>());
    CHECK(phi <= report["overall"]["credit"]["phi_max"].get<double>());

    // Per-type counts must add up to the overall ones.
    std::int64_t h = 0, l = 0;
    for (const auto& [type, slice] : report["by_content_type"].items()) {
        h += slice["scored"]["on_time"].get<std::int64_t>();
        l += slice["scored"]["late"].get<std::int64_t>();
    }
    CHECK(h == 2);
    CHECK(l == 1);

    // The unserved-only check: a Video slice exists with credit data present.
    CHECK(report["by_content_type"].contains("Video"));
    CHECK(report["by_content_type"].contains("Ebook"));
}

TEST_CASE("score command anchors: all on time") {
    std::string log;
    log += jsonl_line("r1", "2025-06-01T08:00:00Z", "2025-06-01T09:00:00Z");
    log += jsonl_line("r2", "2025-06-02T08:00:00Z", "2025-06-02T09:00:00Z");
    TempFile input("score_cmd_ontime.jsonl", log);

    cli::ScoreArgs args;
    args.input_path = input.path;
    args.penalty_per_day = 1.0;
    args.credit_params = CreditParams{1.0, 1.0};

    std::ostringstream out, err;
    REQUIRE(cli::score_command(args, out, err) == cli::exit_ok);
    const auto report = nlohmann::json::parse(out.str());
    CHECK(report["overall"]["delay"]["mean_phi"].get<double>() == 2.0);
    CHECK(report["overall"]["credit"]["phi"].get<double>() == 0.5);
    CHECK(report["alerts"].empty());
}

TEST_CASE("score command exit codes") {
    SUBCASE("empty input scores nothing") {
        TempFile input("score_cmd_empty.jsonl", "\n");
        cli::ScoreArgs args;
        args.input_path = input.path;
        std::ostringstream out, err;
        CHECK(cli::score_command(args, out, err) == cli::exit_no_data);
        CHECK(err.str().find("no scorable requests") != std::string::npos);
    }
    SUBCASE("unparseable input is a parse failure") {
        TempFile input("score_cmd_garbage.jsonl", "{nope\nstill nope\n");
        cli::ScoreArgs args;
        args.input_path = input.path;
        std::ostringstream out, err;
        CHECK(cli::score_command(args, out, err) == cli::exit_parse_failure);
    }
    SUBCASE("bad parameters are rejected up front") {
        TempFile input("score_cmd_params.jsonl",
                       jsonl_line("r1", "2025-06-01T08:00:00Z", "2025-06-01T09:00:00Z"));
        cli::ScoreArgs args;
        args.input_path = input.path;
        args.penalty_per_day = -1.0;
        std::ostringstream out, err;
        CHECK(cli::score_command(args, out, err) == cli::exit_invalid_params);

        args.penalty_per_day = 1.0;
        args.credit_params = CreditParams{0.0, 0.0};
        std::ostringstream out2, err2;
        CHECK(cli::score_command(args, out2, err2) == cli::exit_invalid_params);
    }
    SUBCASE("missing file is a parse failure") {
        cli::ScoreArgs args;
        args.input_path = "does_not_exist.jsonl";
        std::ostringstream out, err;
        CHECK(cli::score_command(args, out, err) == cli::exit_parse_failure);
    }
}

TEST_CASE("score command output is byte-identical across runs") {
    auto spec = WorkloadSpec{};
    spec.seed = 2024;
    spec.n_requests = 200;
    spec.availability_prob = 0.7;
    spec.late_prob_given_available = 0.3;
    spec.unserved_prob = 0.1;
    spec.tau_distribution = TauDistribution::geometric(2.5);
    const auto workload = generate(spec);
    std::ostringstream log;
    write_log(log, workload.window.records, LogFormat::RecordPerLine);
    TempFile input("score_cmd_det.jsonl", log.str());

    cli::ScoreArgs args;
    args.input_path = input.path;
    std::ostringstream first, second, err;
    REQUIRE(cli::score_command(args, first, err) == cli::exit_ok);
    REQUIRE(cli::score_command(args, second, err) == cli::exit_ok);
    CHECK(first.str() == second.str());
    CHECK(!first.str().empty());

    // Breakdown sums reproduce the overall counts on a mixed workload.
    const auto report = nlohmann::json::parse(first.str());
    std::int64_t h = 0, l = 0, unserved = 0;
    for (const auto& [type, slice] : report["by_content_type"].items()) {
        h += slice["scored"]["on_time"].get<std::int64_t>();
        l += slice["scored"]["late"].get<std::int64_t>();
        unserved += slice["outcomes"]["unserved"].get<std::int64_t>();
    }
    CHECK(h == report["overall"]["scored"]["on_time"].get<std::int64_t>());
    CHECK(l == report["overall"]["scored"]["late"].get<std::int64_t>());
    CHECK(unserved == report["overall"]["outcomes"]["unserved"].get<std::int64_t>());
    const double mean = report["overall"]["delay"]["mean_phi"].get<double>();
    CHECK(mean >= report["overall"]["delay"]["min_phi"].get<double>());
    CHECK(mean <= report["overall"]["delay"]["max_phi"].get<double>());
}

TEST_CASE("curves command writes the selected figure") {
    cli::CurvesArgs args;
    args.figure = "fig1";
    std::ostringstream out, err;
    REQUIRE(cli::curves_command(args, out, err) == cli::exit_ok);
    CHECK(out.str().find("# tau\tphi[p=1]\tphi[p=2]") != std::string::npos);

    args.figure = "fig9";
    std::ostringstream out2, err2;
    CHECK(cli::curves_command(args, out2, err2) == cli::exit_invalid_params);

    args.figure = "fig2";
    args.step = -0.5;
    std::ostringstream out3, err3;
    CHECK(cli::curves_command(args, out3, err3) == cli::exit_invalid_params);
}

TEST_CASE("validate command flags bad rows and returns nonzero") {
    std::string log = jsonl_line("r1", "2025-06-01T08:00:00Z", "2025-06-01T09:00:00Z");
    TempFile good("validate_good.jsonl", log);
    std::ostringstream out, err;
    cli::ValidateArgs args;
    args.input_path = good.path;
    CHECK(cli::validate_command(args, out, err) == cli::exit_ok);
    CHECK(out.str().find("1 valid, 0 rejected, 0 malformed") != std::string::npos);

    // Delivery precedes the request: parses, fails validation.
    std::string bad_log = jsonl_line("r9", "2025-06-02T08:00:00Z", "2025-06-01T09:00:00Z");
    TempFile bad("validate_bad.jsonl", bad_log);
    std::ostringstream out2, err2;
    cli::ValidateArgs bad_args;
    bad_args.input_path = bad.path;
    CHECK(cli::validate_command(bad_args, out2, err2) == cli::exit_parse_failure);
    CHECK(out2.str().find("delivery_before_request") != std::string::npos);
}

TEST_CASE("simulate command honors --out and sidecar determinism") {
    cli::SimulateArgs args;
    args.spec.seed = 99;
    args.spec.n_requests = 50;
    args.spec.late_prob_given_available = 0.2;

    std::ostringstream first, second, err;
    REQUIRE(cli::simulate_command(args, first, err) == cli::exit_ok);
    REQUIRE(cli::simulate_command(args, second, err) == cli::exit_ok);
    CHECK(first.str() == second.str());

    args.spec.n_requests = -1;
    std::ostringstream out3, err3;
    CHECK(cli::simulate_command(args, out3, err3) == cli::exit_invalid_params);
}
