#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "svq/time.hpp"

namespace svq {

enum class ContentKind {
    PhysicalBook,
    Ebook,
    Video,
    Slides,
    Journal,
    Tutorial,
    Report,
    Thesis,
    Other, // carries a non-empty label
};

/// Requested content category. Other carries a free-form label.
struct ContentType {
    ContentKind kind = ContentKind::Other;
    std::string other_label; // meaningful only for Other

    friend bool operator==(const ContentType&, const ContentType&) = default;
    friend auto operator<=>(const ContentType&, const ContentType&) = default;
};

/// "PhysicalBook", "Ebook", ... or "Other(<label>)".
std::string to_string(const ContentType& t);
std::optional<ContentType> parse_content_type(std::string_view text);

enum class Availability { Available, NotAvailable };

enum class ArrangementKind { NotNeeded, WillArrange, WillNotArrange };

/// Whether the library will procure unavailable content, and the day count
/// it quoted for doing so.
struct ArrangementStatus {
    ArrangementKind kind = ArrangementKind::NotNeeded;
    std::int64_t expected_days = 0; // meaningful only for WillArrange

    friend bool operator==(const ArrangementStatus&, const ArrangementStatus&) = default;
};

/// "NotNeeded", "WillArrange(<days>)" or "WillNotArrange".
std::string to_string(const ArrangementStatus& a);
std::optional<ArrangementStatus> parse_arrangement_status(std::string_view text);

enum class NotificationStatus { Sent, NotSent };
enum class UserAcceptance { Accepted, Rejected, NotApplicable };

std::string_view to_string(Availability a);
std::string_view to_string(NotificationStatus n);
std::string_view to_string(UserAcceptance u);
std::optional<Availability> parse_availability(std::string_view text);
std::optional<NotificationStatus> parse_notification_status(std::string_view text);
std::optional<UserAcceptance> parse_user_acceptance(std::string_view text);

/// One request's service ledger entry: what was asked for, whether and when
/// it was delivered, and how the procurement handshake went. The attribute
/// set is open ended; unrecognized input columns ride along in `extensions`
/// and are preserved on round-trip but ignored by scoring.
struct ServiceProfileRecord {
    std::string request_id;
    Timestamp request_time{};
    std::string user_id;
    std::string content_id;
    ContentType content_type{};
    std::int64_t content_hits = 1; // requests for this content within the window
    Availability content_availability = Availability::Available;
    std::optional<Timestamp> content_delivery_time;
    ArrangementStatus arrangement_status{};
    NotificationStatus notification_status = NotificationStatus::NotSent;
    std::optional<Timestamp> notification_time;
    UserAcceptance user_acceptance = UserAcceptance::NotApplicable;
    std::optional<std::string> reasons_not_delivered;
    std::optional<std::int64_t> excess_delay_days; // days beyond the agreed day
    std::map<std::string, std::string> extensions;

    friend bool operator==(const ServiceProfileRecord&, const ServiceProfileRecord&) = default;
};

enum class ViolationCode {
    DeliveryBeforeRequest,     // content_delivery_time < request_time
    NotificationBeforeRequest, // notification_time < request_time
    NotificationWithoutSent,   // notification_time present but status NotSent
    NegativeExcessDelay,       // excess_delay_days < 0
    ReasonsWithDelivery,       // reasons_not_delivered and a delivery time both present
    ContentHitsNotPositive,    // content_hits < 1
    EmptyOtherLabel,           // ContentType::Other with an empty label
    NegativeExpectedDays,      // WillArrange with expected_days < 0
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string detail;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Pure, deterministic invariant check; returns every violation found
/// (empty list = valid record). Violations are data, not failures.
std::vector<Violation> validate_record(const ServiceProfileRecord& record);

/// How a request was resolved within the observation window.
class ServiceOutcome {
public:
    enum class Kind { OnTime, Late, Unserved };

    static ServiceOutcome on_time() { return ServiceOutcome(Kind::OnTime, 0); }
    static ServiceOutcome late(std::int64_t tau_days); // requires tau_days >= 1
    static ServiceOutcome unserved() { return ServiceOutcome(Kind::Unserved, 0); }

    Kind kind() const { return kind_; }
    /// Whole days past the agreed day; defined only for Late.
    std::int64_t tau_days() const { return tau_days_; }

    friend bool operator==(const ServiceOutcome&, const ServiceOutcome&) = default;

private:
    ServiceOutcome(Kind kind, std::int64_t tau) : kind_(kind), tau_days_(tau) {}

    Kind kind_;
    std::int64_t tau_days_;
};

std::string to_string(const ServiceOutcome& outcome);

} // namespace svq
