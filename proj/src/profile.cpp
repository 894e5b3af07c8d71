#include "svq/profile.hpp"

#include <array>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace svq {

namespace {

constexpr std::array<std::pair<ContentKind, std::string_view>, 8> kNamedKinds = {{
    {ContentKind::PhysicalBook, "PhysicalBook"},
    {ContentKind::Ebook, "Ebook"},
    {ContentKind::Video, "Video"},
    {ContentKind::Slides, "Slides"},
    {ContentKind::Journal, "Journal"},
    {ContentKind::Tutorial, "Tutorial"},
    {ContentKind::Report, "Report"},
    {ContentKind::Thesis, "Thesis"},
}};

// "Name(payload)" -> payload, if text is exactly that shape.
std::optional<std::string_view> strip_payload(std::string_view text, std::string_view name) {
    if (text.size() < name.size() + 2) return std::nullopt;
    if (text.substr(0, name.size()) != name) return std::nullopt;
    if (text[name.size()] != '(' || text.back() != ')') return std::nullopt;
    return text.substr(name.size() + 1, text.size() - name.size() - 2);
}

} // namespace

std::string to_string(const ContentType& t) {
    for (const auto& [kind, name] : kNamedKinds) {
        if (t.kind == kind) return std::string(name);
    }
    return "Other(" + t.other_label + ")";
}

std::optional<ContentType> parse_content_type(std::string_view text) {
    for (const auto& [kind, name] : kNamedKinds) {
        if (text == name) return ContentType{kind, {}};
    }
    if (auto label = strip_payload(text, "Other")) {
        return ContentType{ContentKind::Other, std::string(*label)};
    }
    return std::nullopt;
}

std::string to_string(const ArrangementStatus& a) {
    switch (a.kind) {
    case ArrangementKind::NotNeeded: return "NotNeeded";
    case ArrangementKind::WillNotArrange: return "WillNotArrange";
    case ArrangementKind::WillArrange:
        return "WillArrange(" + std::to_string(a.expected_days) + ")";
    }
    return {};
}

std::optional<ArrangementStatus> parse_arrangement_status(std::string_view text) {
    if (text == "NotNeeded") return ArrangementStatus{ArrangementKind::NotNeeded, 0};
    if (text == "WillNotArrange") return ArrangementStatus{ArrangementKind::WillNotArrange, 0};
    if (auto payload = strip_payload(text, "WillArrange")) {
        std::int64_t days = 0;
        const char* first = payload->data();
        const char* last = first + payload->size();
        auto [ptr, ec] = std::from_chars(first, last, days);
        if (ec != std::errc() || ptr != last) return std::nullopt;
        return ArrangementStatus{ArrangementKind::WillArrange, days};
    }
    return std::nullopt;
}

std::string_view to_string(Availability a) {
    return a == Availability::Available ? "Available" : "NotAvailable";
}

std::string_view to_string(NotificationStatus n) {
    return n == NotificationStatus::Sent ? "Sent" : "NotSent";
}

std::string_view to_string(UserAcceptance u) {
    switch (u) {
    case UserAcceptance::Accepted: return "Accepted";
    case UserAcceptance::Rejected: return "Rejected";
    case UserAcceptance::NotApplicable: return "NotApplicable";
    }
    return {};
}

std::optional<Availability> parse_availability(std::string_view text) {
    if (text == "Available") return Availability::Available;
    if (text == "NotAvailable") return Availability::NotAvailable;
    return std::nullopt;
}

std::optional<NotificationStatus> parse_notification_status(std::string_view text) {
    if (text == "Sent") return NotificationStatus::Sent;
    if (text == "NotSent") return NotificationStatus::NotSent;
    return std::nullopt;
}

std::optional<UserAcceptance> parse_user_acceptance(std::string_view text) {
    if (text == "Accepted") return UserAcceptance::Accepted;
    if (text == "Rejected") return UserAcceptance::Rejected;
    if (text == "NotApplicable") return UserAcceptance::NotApplicable;
    return std::nullopt;
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
    case ViolationCode::DeliveryBeforeRequest: return "delivery_before_request";
    case ViolationCode::NotificationBeforeRequest: return "notification_before_request";
    case ViolationCode::NotificationWithoutSent: return "notification_without_sent";
    case ViolationCode::NegativeExcessDelay: return "negative_excess_delay";
    case ViolationCode::ReasonsWithDelivery: return "reasons_with_delivery";
    case ViolationCode::ContentHitsNotPositive: return "content_hits_not_positive";
    case ViolationCode::EmptyOtherLabel: return "empty_other_label";
    case ViolationCode::NegativeExpectedDays: return "negative_expected_days";
    }
    return {};
}

std::vector<Violation> validate_record(const ServiceProfileRecord& r) {
    std::vector<Violation> out;
    auto add = [&out](ViolationCode code, std::string detail) {
        out.push_back(Violation{code, std::move(detail)});
    };

    if (r.content_delivery_time && *r.content_delivery_time < r.request_time) {
        add(ViolationCode::DeliveryBeforeRequest,
            "content_delivery_time precedes request_time");
    }
    if (r.notification_time && *r.notification_time < r.request_time) {
        add(ViolationCode::NotificationBeforeRequest,
            "notification_time precedes request_time");
    }
    if (r.notification_time && r.notification_status != NotificationStatus::Sent) {
        add(ViolationCode::NotificationWithoutSent,
            "notification_time present but notification_status is NotSent");
    }
    if (r.excess_delay_days && *r.excess_delay_days < 0) {
        add(ViolationCode::NegativeExcessDelay, "excess_delay_days is negative");
    }
    if (r.reasons_not_delivered && r.content_delivery_time) {
        add(ViolationCode::ReasonsWithDelivery,
            "reasons_not_delivered and content_delivery_time are mutually exclusive");
    }
    if (r.content_hits < 1) {
        add(ViolationCode::ContentHitsNotPositive, "content_hits must be at least 1");
    }
    if (r.content_type.kind == ContentKind::Other && r.content_type.other_label.empty()) {
        add(ViolationCode::EmptyOtherLabel, "ContentType Other requires a label");
    }
    if (r.arrangement_status.kind == ArrangementKind::WillArrange &&
        r.arrangement_status.expected_days < 0) {
        add(ViolationCode::NegativeExpectedDays, "WillArrange expected_days is negative");
    }
    return out;
}

ServiceOutcome ServiceOutcome::late(std::int64_t tau_days) {
    if (tau_days < 1) {
        throw std::invalid_argument("Late outcome requires tau_days >= 1");
    }
    return ServiceOutcome(Kind::Late, tau_days);
}

std::string to_string(const ServiceOutcome& outcome) {
    switch (outcome.kind()) {
    case ServiceOutcome::Kind::OnTime: return "OnTime";
    case ServiceOutcome::Kind::Unserved: return "Unserved";
    case ServiceOutcome::Kind::Late:
        return "Late(" + std::to_string(outcome.tau_days()) + ")";
    }
    return {};
}

} // namespace svq
