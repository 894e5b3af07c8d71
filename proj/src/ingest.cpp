#include "svq/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "svq/errors.hpp"

namespace svq {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kCanonicalFields[] = {
    "request_id",       "request_time",
    "user_id",          "content_id",
    "content_type",     "content_hits",
    "content_availability", "content_delivery_time",
    "arrangement_status",   "notification_status",
    "notification_time",    "user_acceptance",
    "reasons_not_delivered", "excess_delay_days",
};

bool is_canonical_field(std::string_view name) {
    for (std::string_view f : kCanonicalFields) {
        if (f == name) return true;
    }
    return false;
}

// ---- CSV primitives ----

std::string csv_escape(std::string_view value) {
    if (value.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(value);
    }
    std::string out;
    out.reserve(value.size() + 2);
    out.push_back('"');
    for (char c : value) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Reads one CSV record, honoring quoted fields (including embedded commas,
// quotes, and newlines). Returns false when the stream is exhausted.
class CsvReader {
public:
    explicit CsvReader(std::istream& in) : in_(in) {}

    bool read(std::vector<std::string>& fields, std::size_t& start_line) {
        fields.clear();
        for (;;) {
            if (in_.peek() == std::char_traits<char>::eof()) return false;
            start_line = line_;
            std::string field;
            bool any_content = false;
            bool in_quotes = false;
            bool record_done = false;
            while (!record_done) {
                const int ci = in_.get();
                if (ci == std::char_traits<char>::eof()) {
                    record_done = true;
                    break;
                }
                const char c = static_cast<char>(ci);
                if (in_quotes) {
                    if (c == '"') {
                        if (in_.peek() == '"') {
                            in_.get();
                            field.push_back('"');
                        } else {
                            in_quotes = false;
                        }
                    } else {
                        if (c == '\n') ++line_;
                        field.push_back(c);
                    }
                    continue;
                }
                switch (c) {
                case '"':
                    in_quotes = true;
                    any_content = true;
                    break;
                case ',':
                    fields.push_back(std::move(field));
                    field.clear();
                    any_content = true;
                    break;
                case '\r':
                    break;
                case '\n':
                    ++line_;
                    record_done = true;
                    break;
                default:
                    field.push_back(c);
                    any_content = true;
                    break;
                }
            }
            fields.push_back(std::move(field));
            if (fields.size() == 1 && fields[0].empty() && !any_content) {
                fields.clear();
                continue; // blank line
            }
            return true;
        }
    }

private:
    std::istream& in_;
    std::size_t line_ = 1;
};

// ---- row -> record ----

struct FieldErrorSink {
    std::vector<ParseError>& errors;
    std::size_t line;
    bool failed = false;

    void fail(std::string_view field, std::string message) {
        errors.push_back(ParseError{line, std::string(field), std::move(message)});
        failed = true;
    }
};

std::optional<std::int64_t> parse_int64(std::string_view text) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    return value;
}

// Builds a record from (field, value) string pairs; an empty value on a
// canonical field means absent. Empty extension values are dropped only when
// empty_ext_means_absent (CSV cells cannot distinguish "" from absent).
// Reports at most one error per row and returns nullopt on failure.
std::optional<ServiceProfileRecord> record_from_fields(
    const std::vector<std::pair<std::string, std::string>>& fields, FieldErrorSink& sink,
    bool empty_ext_means_absent) {
    ServiceProfileRecord r;
    bool have[6] = {}; // required: id, time, user, content, type, availability

    for (const auto& [name, value] : fields) {
        if (value.empty() && (is_canonical_field(name) || empty_ext_means_absent)) continue;
        if (name == "request_id") {
            r.request_id = value;
            have[0] = true;
        } else if (name == "request_time") {
            auto t = parse_rfc3339(value);
            if (!t) { sink.fail(name, "invalid RFC 3339 timestamp: " + value); return std::nullopt; }
            r.request_time = *t;
            have[1] = true;
        } else if (name == "user_id") {
            r.user_id = value;
            have[2] = true;
        } else if (name == "content_id") {
            r.content_id = value;
            have[3] = true;
        } else if (name == "content_type") {
            auto t = parse_content_type(value);
            if (!t) { sink.fail(name, "unknown content type: " + value); return std::nullopt; }
            r.content_type = *t;
            have[4] = true;
        } else if (name == "content_hits") {
            auto n = parse_int64(value);
            if (!n) { sink.fail(name, "not an integer: " + value); return std::nullopt; }
            r.content_hits = *n; // recomputed later; parsed only to catch bad data
        } else if (name == "content_availability") {
            auto a = parse_availability(value);
            if (!a) { sink.fail(name, "unknown availability: " + value); return std::nullopt; }
            r.content_availability = *a;
            have[5] = true;
        } else if (name == "content_delivery_time") {
            auto t = parse_rfc3339(value);
            if (!t) { sink.fail(name, "invalid RFC 3339 timestamp: " + value); return std::nullopt; }
            r.content_delivery_time = *t;
        } else if (name == "arrangement_status") {
            auto a = parse_arrangement_status(value);
            if (!a) { sink.fail(name, "unknown arrangement status: " + value); return std::nullopt; }
            r.arrangement_status = *a;
        } else if (name == "notification_status") {
            auto n = parse_notification_status(value);
            if (!n) { sink.fail(name, "unknown notification status: " + value); return std::nullopt; }
            r.notification_status = *n;
        } else if (name == "notification_time") {
            auto t = parse_rfc3339(value);
            if (!t) { sink.fail(name, "invalid RFC 3339 timestamp: " + value); return std::nullopt; }
            r.notification_time = *t;
        } else if (name == "user_acceptance") {
            auto u = parse_user_acceptance(value);
            if (!u) { sink.fail(name, "unknown user acceptance: " + value); return std::nullopt; }
            r.user_acceptance = *u;
        } else if (name == "reasons_not_delivered") {
            r.reasons_not_delivered = value;
        } else if (name == "excess_delay_days") {
            auto n = parse_int64(value);
            if (!n) { sink.fail(name, "not an integer: " + value); return std::nullopt; }
            r.excess_delay_days = *n;
        } else {
            r.extensions[name] = value; // open-ended attribute set
        }
    }

    static constexpr std::string_view required[] = {
        "request_id", "request_time", "user_id", "content_id", "content_type",
        "content_availability"};
    for (std::size_t i = 0; i < std::size(required); ++i) {
        if (!have[i]) {
            sink.fail(required[i], "required field missing");
            return std::nullopt;
        }
    }
    return r;
}

std::optional<ServiceProfileRecord> record_from_json_line(const std::string& text,
                                                          FieldErrorSink& sink) {
    const auto j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
        sink.fail("", "line is not a JSON object");
        return std::nullopt;
    }
    std::vector<std::pair<std::string, std::string>> fields;
    fields.reserve(j.size());
    for (const auto& [key, value] : j.items()) {
        if (value.is_null()) continue;
        if (value.is_string()) {
            fields.emplace_back(key, value.get<std::string>());
        } else {
            fields.emplace_back(key, value.dump());
        }
    }
    return record_from_fields(fields, sink, /*empty_ext_means_absent=*/false);
}

// ---- record -> row ----

std::vector<std::pair<std::string, std::string>> record_to_fields(const ServiceProfileRecord& r) {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(14 + r.extensions.size());
    out.emplace_back("request_id", r.request_id);
    out.emplace_back("request_time", format_rfc3339(r.request_time));
    out.emplace_back("user_id", r.user_id);
    out.emplace_back("content_id", r.content_id);
    out.emplace_back("content_type", to_string(r.content_type));
    out.emplace_back("content_hits", std::to_string(r.content_hits));
    out.emplace_back("content_availability", std::string(to_string(r.content_availability)));
    out.emplace_back("content_delivery_time",
                     r.content_delivery_time ? format_rfc3339(*r.content_delivery_time) : "");
    out.emplace_back("arrangement_status", to_string(r.arrangement_status));
    out.emplace_back("notification_status", std::string(to_string(r.notification_status)));
    out.emplace_back("notification_time",
                     r.notification_time ? format_rfc3339(*r.notification_time) : "");
    out.emplace_back("user_acceptance", std::string(to_string(r.user_acceptance)));
    out.emplace_back("reasons_not_delivered", r.reasons_not_delivered.value_or(""));
    out.emplace_back("excess_delay_days",
                     r.excess_delay_days ? std::to_string(*r.excess_delay_days) : "");
    return out;
}

ordered_json record_to_json(const ServiceProfileRecord& r) {
    ordered_json j;
    j["request_id"] = r.request_id;
    j["request_time"] = format_rfc3339(r.request_time);
    j["user_id"] = r.user_id;
    j["content_id"] = r.content_id;
    j["content_type"] = to_string(r.content_type);
    j["content_hits"] = r.content_hits;
    j["content_availability"] = to_string(r.content_availability);
    if (r.content_delivery_time) {
        j["content_delivery_time"] = format_rfc3339(*r.content_delivery_time);
    }
    j["arrangement_status"] = to_string(r.arrangement_status);
    j["notification_status"] = to_string(r.notification_status);
    if (r.notification_time) {
        j["notification_time"] = format_rfc3339(*r.notification_time);
    }
    j["user_acceptance"] = to_string(r.user_acceptance);
    if (r.reasons_not_delivered) {
        j["reasons_not_delivered"] = *r.reasons_not_delivered;
    }
    if (r.excess_delay_days) {
        j["excess_delay_days"] = *r.excess_delay_days;
    }
    for (const auto& [key, value] : r.extensions) {
        if (!is_canonical_field(key)) j[key] = value;
    }
    return j;
}

std::vector<std::string> extension_header(std::span<const ServiceProfileRecord> records) {
    std::set<std::string> keys;
    for (const auto& r : records) {
        for (const auto& [key, value] : r.extensions) {
            if (!is_canonical_field(key)) keys.insert(key);
        }
    }
    return {keys.begin(), keys.end()};
}

void write_csv_header(std::ostream& out, const std::vector<std::string>& extensions,
                      bool with_violations) {
    bool first = true;
    for (std::string_view f : kCanonicalFields) {
        if (!first) out << ',';
        out << f;
        first = false;
    }
    for (const auto& key : extensions) out << ',' << csv_escape(key);
    if (with_violations) out << ",violations";
    out << '\n';
}

void write_csv_row(std::ostream& out, const ServiceProfileRecord& r,
                   const std::vector<std::string>& extensions,
                   const std::string* violations) {
    bool first = true;
    for (const auto& [name, value] : record_to_fields(r)) {
        if (!first) out << ',';
        out << csv_escape(value);
        first = false;
    }
    for (const auto& key : extensions) {
        out << ',';
        auto it = r.extensions.find(key);
        if (it != r.extensions.end()) out << csv_escape(it->second);
    }
    if (violations) out << ',' << csv_escape(*violations);
    out << '\n';
}

std::string join_violation_codes(const std::vector<Violation>& violations) {
    std::string joined;
    for (const auto& v : violations) {
        if (!joined.empty()) joined.push_back(';');
        joined += to_string(v.code);
    }
    return joined;
}

} // namespace

std::optional<LogFormat> parse_log_format(std::string_view text) {
    if (text == "rows") return LogFormat::DelimitedRows;
    if (text == "records") return LogFormat::RecordPerLine;
    return std::nullopt;
}

std::string_view to_string(LogFormat format) {
    return format == LogFormat::DelimitedRows ? "rows" : "records";
}

ParseResult parse_log(std::istream& in, const ParseOptions& options) {
    ParseResult result;
    std::vector<std::pair<ServiceProfileRecord, std::size_t>> parsed; // record, line

    auto over_cap = [&result, &options]() {
        if (result.errors.size() >= options.max_errors) {
            result.truncated = true;
            return true;
        }
        return false;
    };

    if (options.format == LogFormat::DelimitedRows) {
        CsvReader reader(in);
        std::vector<std::string> header;
        std::size_t line = 0;
        if (reader.read(header, line)) {
            std::set<std::string_view> seen;
            for (const auto& name : header) {
                if (!seen.insert(name).second) {
                    throw ParseFailure("duplicate column in header: " + name);
                }
            }
            std::vector<std::string> row;
            while (!result.truncated && reader.read(row, line)) {
                ++result.rows_seen;
                if (row.size() != header.size()) {
                    result.errors.push_back(ParseError{
                        line, "",
                        "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(row.size())});
                    if (over_cap()) break;
                    continue;
                }
                std::vector<std::pair<std::string, std::string>> fields;
                fields.reserve(row.size());
                for (std::size_t i = 0; i < row.size(); ++i) {
                    fields.emplace_back(header[i], row[i]);
                }
                FieldErrorSink sink{result.errors, line};
                if (auto record = record_from_fields(fields, sink,
                                                      /*empty_ext_means_absent=*/true)) {
                    parsed.emplace_back(std::move(*record), line);
                } else if (over_cap()) {
                    break;
                }
            }
        }
    } else {
        std::string text;
        std::size_t line = 0;
        while (!result.truncated && std::getline(in, text)) {
            ++line;
            if (!text.empty() && text.back() == '\r') text.pop_back();
            if (text.empty()) continue;
            ++result.rows_seen;
            FieldErrorSink sink{result.errors, line};
            if (auto record = record_from_json_line(text, sink)) {
                parsed.emplace_back(std::move(*record), line);
            } else if (over_cap()) {
                break;
            }
        }
    }

    // Quarantine invariant violations; keep the rest.
    for (auto& [record, line] : parsed) {
        record.content_hits = 1; // provisional, recomputed below
        auto violations = validate_record(record);
        if (violations.empty()) {
            result.window.records.push_back(std::move(record));
        } else {
            result.rejected.push_back(RejectedRecord{line, std::move(record), std::move(violations)});
        }
    }

    // ContentHits is per-window: count requests per content over kept records.
    std::map<std::string, std::int64_t> hits;
    for (const auto& r : result.window.records) ++hits[r.content_id];
    for (auto& r : result.window.records) r.content_hits = hits[r.content_id];

    if (!result.window.records.empty()) {
        auto [lo, hi] = std::minmax_element(
            result.window.records.begin(), result.window.records.end(),
            [](const auto& a, const auto& b) { return a.request_time < b.request_time; });
        result.window.start = lo->request_time;
        result.window.end = hi->request_time;
    }
    return result;
}

void write_log(std::ostream& out, std::span<const ServiceProfileRecord> records,
               LogFormat format) {
    if (format == LogFormat::DelimitedRows) {
        const auto extensions = extension_header(records);
        write_csv_header(out, extensions, /*with_violations=*/false);
        for (const auto& r : records) write_csv_row(out, r, extensions, nullptr);
    } else {
        for (const auto& r : records) out << record_to_json(r).dump() << '\n';
    }
}

void write_rejects(std::ostream& out, std::span<const RejectedRecord> rejected,
                   LogFormat format) {
    if (format == LogFormat::DelimitedRows) {
        std::vector<ServiceProfileRecord> records;
        records.reserve(rejected.size());
        for (const auto& rr : rejected) records.push_back(rr.record);
        const auto extensions = extension_header(records);
        write_csv_header(out, extensions, /*with_violations=*/true);
        for (const auto& rr : rejected) {
            const std::string joined = join_violation_codes(rr.violations);
            write_csv_row(out, rr.record, extensions, &joined);
        }
    } else {
        for (const auto& rr : rejected) {
            ordered_json j = record_to_json(rr.record);
            ordered_json codes = ordered_json::array();
            for (const auto& v : rr.violations) codes.push_back(to_string(v.code));
            j["violations"] = std::move(codes);
            out << j.dump() << '\n';
        }
    }
}

std::optional<Day> agreed_day(const ServiceProfileRecord& record) {
    if (record.content_availability == Availability::Available) {
        return day_of(record.request_time);
    }
    if (record.arrangement_status.kind == ArrangementKind::WillArrange &&
        record.user_acceptance == UserAcceptance::Accepted) {
        return day_of(record.request_time) + record.arrangement_status.expected_days;
    }
    return std::nullopt;
}

ServiceOutcome classify(const ServiceProfileRecord& record) {
    if (!record.content_delivery_time) {
        return ServiceOutcome::unserved();
    }
    const auto agreed = agreed_day(record);
    if (!agreed) {
        throw ClassificationError("record " + record.request_id +
                                  ": delivered but no agreed day is derivable");
    }
    const std::int64_t past_due = day_of(*record.content_delivery_time) - *agreed;
    if (past_due <= 0) return ServiceOutcome::on_time();
    return ServiceOutcome::late(past_due);
}

double derive_tau(const ServiceProfileRecord& record, std::vector<std::string>* warnings) {
    std::optional<std::int64_t> computed;
    const ServiceOutcome outcome = classify(record);
    if (outcome.kind() == ServiceOutcome::Kind::OnTime) {
        computed = 0;
    } else if (outcome.kind() == ServiceOutcome::Kind::Late) {
        computed = outcome.tau_days();
    }

    if (record.excess_delay_days) {
        if (computed && *computed != *record.excess_delay_days && warnings) {
            warnings->push_back("record " + record.request_id + ": stored excess_delay_days=" +
                                std::to_string(*record.excess_delay_days) +
                                " disagrees with derived " + std::to_string(*computed) +
                                "; stored value wins");
        }
        return static_cast<double>(*record.excess_delay_days);
    }
    if (computed) return static_cast<double>(*computed);
    throw ClassificationError("record " + record.request_id +
                              ": no excess-delay source (unserved, no stored column)");
}

std::optional<UnservedPolicy> UnservedPolicy::parse(std::string_view text) {
    UnservedPolicy policy;
    if (text == "exclude") {
        policy.mode = Mode::Exclude;
        return policy;
    }
    if (text == "late") {
        policy.mode = Mode::Late;
        return policy;
    }
    constexpr std::string_view prefix = "horizon:";
    if (text.substr(0, prefix.size()) == prefix) {
        auto days = parse_int64(text.substr(prefix.size()));
        if (!days || *days < 0) return std::nullopt;
        policy.mode = Mode::Horizon;
        policy.horizon_days = *days;
        return policy;
    }
    return std::nullopt;
}

std::string UnservedPolicy::to_string() const {
    switch (mode) {
    case Mode::Exclude: return "exclude";
    case Mode::Late: return "late";
    case Mode::Horizon: return "horizon:" + std::to_string(horizon_days);
    }
    return {};
}

namespace {

bool rejected_timeline(const ServiceProfileRecord& r) {
    return r.arrangement_status.kind == ArrangementKind::WillArrange &&
           r.user_acceptance == UserAcceptance::Rejected;
}

// Excess delay assigned to an unserved request scored as late: days between
// the window end and the agreed (or request) day, at least 1.
double promoted_tau(const ServiceProfileRecord& r, Day end_day,
                    std::vector<std::string>& warnings) {
    const Day agreed = agreed_day(r).value_or(day_of(r.request_time));
    const std::int64_t policy_tau = std::max<std::int64_t>(1, end_day - agreed);
    if (r.excess_delay_days) {
        if (*r.excess_delay_days != policy_tau) {
            warnings.push_back("record " + r.request_id + ": stored excess_delay_days=" +
                               std::to_string(*r.excess_delay_days) +
                               " supersedes horizon-derived " + std::to_string(policy_tau));
        }
        return static_cast<double>(*r.excess_delay_days);
    }
    return static_cast<double>(policy_tau);
}

} // namespace

ClassifiedWindow classify_window(const ObservationWindow& window, const UnservedPolicy& policy) {
    ClassifiedWindow out;
    const Day end_day = day_of(window.end);

    for (std::size_t i = 0; i < window.records.size(); ++i) {
        const ServiceProfileRecord& record = window.records[i];
        ScoredRow row;
        row.record = record;
        try {
            row.outcome = classify(record);
        } catch (const ClassificationError& e) {
            out.unclassifiable.push_back(UnclassifiableRecord{i, record, e.what()});
            continue;
        }

        switch (row.outcome.kind()) {
        case ServiceOutcome::Kind::OnTime:
        case ServiceOutcome::Kind::Late:
            row.scored = true;
            row.counted_late = row.outcome.kind() == ServiceOutcome::Kind::Late;
            row.tau_days = derive_tau(record, &out.warnings);
            break;
        case ServiceOutcome::Kind::Unserved: {
            bool promote = false;
            if (rejected_timeline(record) && !policy.include_rejected_timeline) {
                ++out.excluded_rejected_timeline;
            } else {
                switch (policy.mode) {
                case UnservedPolicy::Mode::Exclude:
                    break;
                case UnservedPolicy::Mode::Late:
                    promote = true;
                    break;
                case UnservedPolicy::Mode::Horizon:
                    promote = (end_day - day_of(record.request_time)) > policy.horizon_days;
                    break;
                }
            }
            if (promote) {
                row.scored = true;
                row.counted_late = true;
                row.tau_days = promoted_tau(record, end_day, out.warnings);
                ++out.promoted_late;
            } else {
                ++out.unserved;
            }
            break;
        }
        }

        if (row.scored) {
            if (row.counted_late) {
                ++out.counts.late;
            } else {
                ++out.counts.on_time;
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

ServedCounts build_counts(const ObservationWindow& window, const UnservedPolicy& policy) {
    return classify_window(window, policy).counts;
}

} // namespace svq
