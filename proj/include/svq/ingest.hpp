#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "svq/credit_model.hpp"
#include "svq/profile.hpp"
#include "svq/time.hpp"

namespace svq {

/// Input encodings. DelimitedRows is comma-separated with a required header
/// row; RecordPerLine is one JSON object per line. Both use the snake_case
/// field names of ServiceProfileRecord, RFC 3339 timestamps, and the literal
/// enumeration spellings ("WillArrange(7)", "Other(label)", ...). An empty
/// CSV cell or an absent JSON key is an absent optional field.
enum class LogFormat { DelimitedRows, RecordPerLine };

std::optional<LogFormat> parse_log_format(std::string_view text); // "rows" | "records"
std::string_view to_string(LogFormat format);

/// The records collected over one observation span. Bounds are derived from
/// the data: start/end are the min/max request_time of the kept records.
struct ObservationWindow {
    Timestamp start{};
    Timestamp end{};
    std::vector<ServiceProfileRecord> records;
};

struct ParseError {
    std::size_t line = 0; // 1-based physical line
    std::string field;    // offending field, when known
    std::string message;
};

struct RejectedRecord {
    std::size_t line = 0;
    ServiceProfileRecord record;
    std::vector<Violation> violations;
};

struct ParseResult {
    ObservationWindow window;
    std::vector<RejectedRecord> rejected; // parsed but invariant-violating rows
    std::vector<ParseError> errors;       // rows that could not be parsed
    bool truncated = false;               // error cap reached, input abandoned
    std::size_t rows_seen = 0;
};

struct ParseOptions {
    LogFormat format = LogFormat::RecordPerLine;
    std::size_t max_errors = 100;
};

/// Single pass over the stream: rows that parse and validate land in the
/// window, invalid rows are quarantined with their violations, malformed
/// rows are reported with line and field. content_hits is recomputed per
/// content_id over the kept records; the input column is ignored.
ParseResult parse_log(std::istream& in, const ParseOptions& options);

/// Inverse of parse_log for round-tripping windows to disk.
void write_log(std::ostream& out, std::span<const ServiceProfileRecord> records,
               LogFormat format);

/// Same layout as the input plus a trailing "violations" field.
void write_rejects(std::ostream& out, std::span<const RejectedRecord> rejected,
                   LogFormat format);

/// Day the library committed to deliver by: the request day for available
/// content, request day + expected_days for an accepted procurement.
/// Empty when no commitment can be derived.
std::optional<Day> agreed_day(const ServiceProfileRecord& record);

/// OnTime / Late(tau) / Unserved for a valid record, comparing UTC calendar
/// days. Throws ClassificationError for a delivered record with no derivable
/// agreed day (e.g. a procurement the user never accepted).
ServiceOutcome classify(const ServiceProfileRecord& record);

/// Excess delay in days for scoring. The stored excess_delay_days column
/// wins over the classified value; a disagreement is reported through
/// `warnings` (the ledger is authoritative, the derivation may lack the true
/// agreed day). Throws ClassificationError when neither source exists.
double derive_tau(const ServiceProfileRecord& record,
                  std::vector<std::string>* warnings = nullptr);

/// Placement of never-delivered requests in the credit counts. Horizon (the
/// default) scores unserved requests older than horizon_days as late and
/// leaves younger ones out; Exclude and Late are the always-out / always-late
/// alternatives. Requests whose procurement timeline the user rejected are
/// excluded from scoring unless include_rejected_timeline is set.
struct UnservedPolicy {
    enum class Mode { Exclude, Late, Horizon };

    Mode mode = Mode::Horizon;
    std::int64_t horizon_days = 90;
    bool include_rejected_timeline = false;

    static std::optional<UnservedPolicy> parse(std::string_view text); // "exclude"|"late"|"horizon:<days>"
    std::string to_string() const;
};

/// One classified record, plus how the active policy scored it.
struct ScoredRow {
    ServiceProfileRecord record;
    ServiceOutcome outcome = ServiceOutcome::unserved();
    bool scored = false;       // participates in (H, L)
    bool counted_late = false; // scored on the L side
    double tau_days = 0.0;     // delay-model tau when scored
};

struct UnclassifiableRecord {
    std::size_t index = 0; // position within the window
    ServiceProfileRecord record;
    std::string reason;
};

struct ClassifiedWindow {
    std::vector<ScoredRow> rows;
    ServedCounts counts;                         // after the unserved policy
    std::int64_t unserved = 0;                   // residual unserved, not scored
    std::int64_t promoted_late = 0;              // unserved scored late by policy
    std::int64_t excluded_rejected_timeline = 0; // subset of `unserved`
    std::vector<UnclassifiableRecord> unclassifiable;
    std::vector<std::string> warnings;
};

ClassifiedWindow classify_window(const ObservationWindow& window,
                                 const UnservedPolicy& policy);

/// (H, L) for the window under the policy.
ServedCounts build_counts(const ObservationWindow& window, const UnservedPolicy& policy);

} // namespace svq
