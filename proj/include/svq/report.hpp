#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "svq/credit_model.hpp"
#include "svq/delay_model.hpp"
#include "svq/ingest.hpp"

namespace svq {

struct ModelSelection {
    bool delay = true;
    bool credit = true;
};

struct AlertThresholds {
    double credit_phi = 0.0; // alert when credit phi falls below this
};

struct ScoreConfig {
    ModelSelection models;
    double penalty_per_day = 1.0; // delay-model p
    CreditParams credit_params;
    UnservedPolicy policy;
    AlertThresholds thresholds;
};

struct Alert {
    std::string code;
    std::string message;
    double phi = 0.0;
    double threshold = 0.0;
    ServedCounts counts;
    std::int64_t unserved = 0;
};

struct DelaySummary {
    double penalty_per_day = 0.0;
    std::int64_t n_scored = 0;
    double mean_phi = 0.0;
    double min_phi = 0.0;
    double max_phi = 0.0;
    double phi_upper_bound = 0.0; // 1 + p
    double phi_lower_bound = 1.0;
};

struct CreditSummary {
    CreditParams params;
    double phi = 0.0;
    double phi_min = 0.0;
    double phi_max = 0.0;
    CreditSensitivity sensitivity{};
};

/// Scoring results for one slice of the window (whole window or a single
/// content type). Model summaries are absent when the slice has nothing to
/// score; "no data" is never reported as zero.
struct SliceReport {
    std::int64_t records = 0;
    ServedCounts counts; // after the unserved policy
    std::int64_t outcome_on_time = 0;
    std::int64_t outcome_late = 0;
    std::int64_t outcome_unserved = 0;
    std::int64_t unserved_excluded = 0;
    std::int64_t promoted_late = 0;
    std::optional<DelaySummary> delay;
    std::optional<CreditSummary> credit;
};

struct ContentHitsEntry {
    std::string content_id;
    std::int64_t hits = 0;
};

struct QualityReport {
    Timestamp window_start{};
    Timestamp window_end{};
    std::int64_t records_parsed = 0;   // rows that parsed at all
    std::int64_t records_rejected = 0; // quarantined by validation
    std::int64_t records_unclassifiable = 0;
    SliceReport overall;
    std::vector<std::pair<std::string, SliceReport>> by_content_type; // key-sorted
    std::vector<ContentHitsEntry> top_content;                        // by hits desc
    std::vector<Alert> alerts;
    std::vector<std::string> warnings;
    UnservedPolicy policy;
};

struct ParseStats {
    std::int64_t records_parsed = 0;
    std::int64_t records_rejected = 0;
};

/// Scores a classified window under both models and assembles the report,
/// including the per-content-type breakdown (partition first, then score;
/// the credit score is not linear in partitions).
QualityReport build_report(const ClassifiedWindow& window, Timestamp window_start,
                           Timestamp window_end, const ParseStats& stats,
                           const ScoreConfig& config);

/// Alerts for a finished report: one alert when the overall credit score
/// falls below the threshold, carrying the contributing counts.
std::vector<Alert> alert_evaluation(const QualityReport& report,
                                    const AlertThresholds& thresholds);

/// Stable JSON rendering (schema_version 1); identical reports serialize to
/// identical bytes.
void write_report_json(std::ostream& out, const QualityReport& report);

/// A curve table: one x column and one or more named series, emitted as
/// tab-separated columns with a '#' header, ready for gnuplot-style tools.
struct CurveTable {
    std::string title;
    std::string x_name;
    std::vector<std::string> series_names;
    std::vector<double> x;
    std::vector<std::vector<double>> series; // series[j][i] pairs with x[i]
};

/// Quality against excess delay, one series per penalty value.
CurveTable curve_quality_vs_delay(const std::vector<double>& penalties = {1.0, 2.0},
                                  double tau_max = 10.0, double step = 0.1);

/// Quality against penalty points, one series per delay value.
CurveTable curve_quality_vs_penalty(const std::vector<double>& delays = {1.0, 2.0},
                                    double penalty_max = 5.0, double step = 0.05);

/// Credit quality against the late count with equal credit and penalty
/// weights, one series per on-time count.
CurveTable curve_quality_vs_late(const std::vector<std::int64_t>& on_time = {10, 20},
                                 std::int64_t late_max = 40, double weight = 1.0);

void write_curve(std::ostream& out, const CurveTable& table);

} // namespace svq
