#include "svq/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include <json.hpp>

#include "svq/errors.hpp"

namespace svq {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

SliceReport score_slice(const std::vector<const ScoredRow*>& rows, const ScoreConfig& config) {
    SliceReport slice;
    slice.records = static_cast<std::int64_t>(rows.size());

    std::vector<double> delay_scores;
    for (const ScoredRow* row : rows) {
        switch (row->outcome.kind()) {
        case ServiceOutcome::Kind::OnTime: ++slice.outcome_on_time; break;
        case ServiceOutcome::Kind::Late: ++slice.outcome_late; break;
        case ServiceOutcome::Kind::Unserved: ++slice.outcome_unserved; break;
        }
        if (!row->scored) {
            if (row->outcome.kind() == ServiceOutcome::Kind::Unserved) ++slice.unserved_excluded;
            continue;
        }
        if (row->counted_late) {
            ++slice.counts.late;
            if (row->outcome.kind() == ServiceOutcome::Kind::Unserved) ++slice.promoted_late;
        } else {
            ++slice.counts.on_time;
        }
        if (config.models.delay) {
            delay_scores.push_back(
                delay_quality(DelayParams{config.penalty_per_day, row->tau_days}).phi);
        }
    }

    if (config.models.delay && !delay_scores.empty()) {
        DelaySummary summary;
        summary.penalty_per_day = config.penalty_per_day;
        summary.n_scored = static_cast<std::int64_t>(delay_scores.size());
        summary.mean_phi = average_quality(delay_scores);
        const auto [lo, hi] = std::minmax_element(delay_scores.begin(), delay_scores.end());
        summary.min_phi = *lo;
        summary.max_phi = *hi;
        summary.phi_upper_bound = 1.0 + config.penalty_per_day;
        summary.phi_lower_bound = 1.0;
        slice.delay = summary;
    }
    if (config.models.credit && slice.counts.total() >= 1) {
        const CreditQuality q = credit_quality(config.credit_params, slice.counts);
        slice.credit = CreditSummary{
            .params = config.credit_params,
            .phi = q.phi,
            .phi_min = q.phi_min,
            .phi_max = q.phi_max,
            .sensitivity = credit_sensitivity(slice.counts),
        };
    }
    return slice;
}

ordered_json slice_to_json(const SliceReport& slice) {
    ordered_json j;
    j["records"] = slice.records;
    j["outcomes"]["on_time"] = slice.outcome_on_time;
    j["outcomes"]["late"] = slice.outcome_late;
    j["outcomes"]["unserved"] = slice.outcome_unserved;
    j["scored"]["on_time"] = slice.counts.on_time;
    j["scored"]["late"] = slice.counts.late;
    j["scored"]["promoted_late"] = slice.promoted_late;
    j["scored"]["unserved_excluded"] = slice.unserved_excluded;
    if (slice.delay) {
        const DelaySummary& d = *slice.delay;
        ordered_json dj;
        dj["penalty_per_day"] = d.penalty_per_day;
        dj["n_scored"] = d.n_scored;
        dj["mean_phi"] = d.mean_phi;
        dj["min_phi"] = d.min_phi;
        dj["max_phi"] = d.max_phi;
        dj["phi_upper_bound"] = d.phi_upper_bound;
        dj["phi_lower_bound"] = d.phi_lower_bound;
        j["delay"] = std::move(dj);
    } else {
        j["delay"] = nullptr;
    }
    if (slice.credit) {
        const CreditSummary& c = *slice.credit;
        ordered_json cj;
        cj["credit"] = c.params.credit_per_on_time;
        cj["penalty"] = c.params.penalty_per_late;
        cj["phi"] = c.phi;
        cj["phi_min"] = c.phi_min;
        cj["phi_max"] = c.phi_max;
        cj["sensitivity"]["wrt_on_time"] = c.sensitivity.wrt_on_time;
        cj["sensitivity"]["wrt_late"] = c.sensitivity.wrt_late;
        j["credit"] = std::move(cj);
    } else {
        j["credit"] = nullptr;
    }
    return j;
}

} // namespace

QualityReport build_report(const ClassifiedWindow& window, Timestamp window_start,
                           Timestamp window_end, const ParseStats& stats,
                           const ScoreConfig& config) {
    QualityReport report;
    report.window_start = window_start;
    report.window_end = window_end;
    report.records_parsed = stats.records_parsed;
    report.records_rejected = stats.records_rejected;
    report.records_unclassifiable = static_cast<std::int64_t>(window.unclassifiable.size());
    report.policy = config.policy;
    report.warnings = window.warnings;

    std::vector<const ScoredRow*> all_rows;
    all_rows.reserve(window.rows.size());
    std::map<std::string, std::vector<const ScoredRow*>> by_type;
    for (const ScoredRow& row : window.rows) {
        all_rows.push_back(&row);
        by_type[to_string(row.record.content_type)].push_back(&row);
    }

    report.overall = score_slice(all_rows, config);
    for (const auto& [type, rows] : by_type) {
        report.by_content_type.emplace_back(type, score_slice(rows, config));
    }

    std::map<std::string, std::int64_t> hits;
    for (const ScoredRow& row : window.rows) ++hits[row.record.content_id];
    for (const auto& rec : window.unclassifiable) ++hits[rec.record.content_id];
    std::vector<ContentHitsEntry> ranked;
    ranked.reserve(hits.size());
    for (const auto& [id, count] : hits) ranked.push_back(ContentHitsEntry{id, count});
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.hits != b.hits) return a.hits > b.hits;
        return a.content_id < b.content_id;
    });
    if (ranked.size() > 20) ranked.resize(20);
    report.top_content = std::move(ranked);

    report.alerts = alert_evaluation(report, config.thresholds);
    return report;
}

std::vector<Alert> alert_evaluation(const QualityReport& report,
                                    const AlertThresholds& thresholds) {
    std::vector<Alert> alerts;
    if (report.overall.credit && report.overall.credit->phi < thresholds.credit_phi) {
        const double phi = report.overall.credit->phi;
        Alert alert;
        alert.code = "credit_quality_below_threshold";
        alert.message = phi < 0.0
                            ? "credit-based service quality is negative; corrective measures needed"
                            : "credit-based service quality fell below the configured threshold";
        alert.phi = phi;
        alert.threshold = thresholds.credit_phi;
        alert.counts = report.overall.counts;
        alert.unserved = report.overall.unserved_excluded;
        alerts.push_back(std::move(alert));
    }
    return alerts;
}

void write_report_json(std::ostream& out, const QualityReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["window"]["start"] = format_rfc3339(report.window_start);
    j["window"]["end"] = format_rfc3339(report.window_end);
    j["records"]["parsed"] = report.records_parsed;
    j["records"]["rejected"] = report.records_rejected;
    j["records"]["unclassifiable"] = report.records_unclassifiable;
    j["records"]["classified"] = report.overall.records;
    j["unserved_policy"] = report.policy.to_string();
    j["overall"] = slice_to_json(report.overall);
    ordered_json types = ordered_json::object();
    for (const auto& [type, slice] : report.by_content_type) {
        types[type] = slice_to_json(slice);
    }
    j["by_content_type"] = std::move(types);
    auto top = ordered_json::array();
    for (const auto& entry : report.top_content) {
        ordered_json e;
        e["content_id"] = entry.content_id;
        e["hits"] = entry.hits;
        top.push_back(std::move(e));
    }
    j["top_content"] = std::move(top);
    auto alerts = ordered_json::array();
    for (const Alert& alert : report.alerts) {
        ordered_json a;
        a["code"] = alert.code;
        a["message"] = alert.message;
        a["phi"] = alert.phi;
        a["threshold"] = alert.threshold;
        a["counts"]["on_time"] = alert.counts.on_time;
        a["counts"]["late"] = alert.counts.late;
        a["counts"]["unserved_excluded"] = alert.unserved;
        alerts.push_back(std::move(a));
    }
    j["alerts"] = std::move(alerts);
    j["warnings"] = report.warnings;
    out << j.dump(2) << '\n';
}

CurveTable curve_quality_vs_delay(const std::vector<double>& penalties, double tau_max,
                                  double step) {
    if (penalties.empty()) throw InvalidParams("at least one penalty series is required");
    if (!(step > 0.0) || !(tau_max >= 0.0)) {
        throw InvalidParams("curve grid requires step > 0 and tau_max >= 0");
    }
    CurveTable table;
    table.title = "quality vs excess delay (days)";
    table.x_name = "tau";
    const auto n = static_cast<std::size_t>(std::floor(tau_max / step + 0.5)) + 1;
    for (double p : penalties) {
        table.series_names.push_back("phi[p=" + format_double(p) + "]");
        table.series.emplace_back();
        table.series.back().reserve(n);
    }
    table.x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = static_cast<double>(i) * step;
        table.x.push_back(tau);
        for (std::size_t s = 0; s < penalties.size(); ++s) {
            table.series[s].push_back(delay_quality(DelayParams{penalties[s], tau}).phi);
        }
    }
    return table;
}

CurveTable curve_quality_vs_penalty(const std::vector<double>& delays, double penalty_max,
                                    double step) {
    if (delays.empty()) throw InvalidParams("at least one delay series is required");
    if (!(step > 0.0) || !(penalty_max >= 0.0)) {
        throw InvalidParams("curve grid requires step > 0 and penalty_max >= 0");
    }
    CurveTable table;
    table.title = "quality vs penalty points per day";
    table.x_name = "p";
    const auto n = static_cast<std::size_t>(std::floor(penalty_max / step + 0.5)) + 1;
    for (double tau : delays) {
        table.series_names.push_back("phi[tau=" + format_double(tau) + "]");
        table.series.emplace_back();
        table.series.back().reserve(n);
    }
    table.x.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = static_cast<double>(i) * step;
        table.x.push_back(p);
        for (std::size_t s = 0; s < delays.size(); ++s) {
            table.series[s].push_back(delay_quality(DelayParams{p, delays[s]}).phi);
        }
    }
    return table;
}

CurveTable curve_quality_vs_late(const std::vector<std::int64_t>& on_time,
                                 std::int64_t late_max, double weight) {
    if (on_time.empty()) throw InvalidParams("at least one on-time series is required");
    if (late_max < 0) throw InvalidParams("late_max must be >= 0");
    if (!(weight > 0.0)) throw InvalidParams("weight must be > 0");
    for (std::int64_t h : on_time) {
        if (h < 1) throw InvalidParams("on-time series values must be >= 1");
    }
    CurveTable table;
    table.title = "credit quality vs late count (equal credit and penalty weights)";
    table.x_name = "L";
    const CreditParams params{weight, weight};
    for (std::int64_t h : on_time) {
        table.series_names.push_back("phi[H=" + std::to_string(h) + "]");
        table.series.emplace_back();
    }
    for (std::int64_t l = 0; l <= late_max; ++l) {
        table.x.push_back(static_cast<double>(l));
        for (std::size_t s = 0; s < on_time.size(); ++s) {
            table.series[s].push_back(
                credit_quality(params, ServedCounts{on_time[s], l}).phi);
        }
    }
    return table;
}

void write_curve(std::ostream& out, const CurveTable& table) {
    out << "# " << table.title << '\n';
    out << "# " << table.x_name;
    for (const auto& name : table.series_names) out << '\t' << name;
    out << '\n';
    for (std::size_t i = 0; i < table.x.size(); ++i) {
        out << format_double(table.x[i]);
        for (const auto& series : table.series) out << '\t' << format_double(series[i]);
        out << '\n';
    }
}

} // namespace svq
