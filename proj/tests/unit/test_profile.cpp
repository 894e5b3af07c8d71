#include <doctest.h>

#include <stdexcept>

#include "svq/profile.hpp"

using namespace svq;

namespace {

// A fully consistent delivered record every invariant test perturbs.
ServiceProfileRecord valid_record() {
    ServiceProfileRecord r;
    r.request_id = "R42";
    r.request_time = *parse_rfc3339("2025-03-01T10:00:00Z");
    r.user_id = "U7";
    r.content_id = "C9";
    r.content_type = ContentType{ContentKind::Ebook, {}};
    r.content_hits = 1;
    r.content_availability = Availability::Available;
    r.content_delivery_time = *parse_rfc3339("2025-03-01T15:00:00Z");
    return r;
}

bool has_only(const std::vector<Violation>& violations, ViolationCode code) {
    return violations.size() == 1 && violations[0].code == code;
}

} // namespace

TEST_CASE("a consistent record validates cleanly") {
    CHECK(validate_record(valid_record()).empty());
}

TEST_CASE("each invariant maps to exactly one violation code") {
    SUBCASE("delivery before request") {
        auto r = valid_record();
        r.content_delivery_time = *parse_rfc3339("2025-02-28T10:00:00Z");
        CHECK(has_only(validate_record(r), ViolationCode::DeliveryBeforeRequest));
    }
    SUBCASE("notification before request") {
        auto r = valid_record();
        r.notification_status = NotificationStatus::Sent;
        r.notification_time = *parse_rfc3339("2025-02-28T10:00:00Z");
        CHECK(has_only(validate_record(r), ViolationCode::NotificationBeforeRequest));
    }
    SUBCASE("notification time without sent status") {
        auto r = valid_record();
        r.notification_time = *parse_rfc3339("2025-03-01T11:00:00Z");
        r.notification_status = NotificationStatus::NotSent;
        CHECK(has_only(validate_record(r), ViolationCode::NotificationWithoutSent));
    }
    SUBCASE("negative excess delay") {
        auto r = valid_record();
        r.excess_delay_days = -2;
        CHECK(has_only(validate_record(r), ViolationCode::NegativeExcessDelay));
    }
    SUBCASE("reasons alongside a delivery") {
        auto r = valid_record();
        r.reasons_not_delivered = "lost in transit";
        CHECK(has_only(validate_record(r), ViolationCode::ReasonsWithDelivery));
    }
    SUBCASE("content hits below one") {
        auto r = valid_record();
        r.content_hits = 0;
        CHECK(has_only(validate_record(r), ViolationCode::ContentHitsNotPositive));
    }
    SUBCASE("Other content type with empty label") {
        auto r = valid_record();
        r.content_type = ContentType{ContentKind::Other, ""};
        CHECK(has_only(validate_record(r), ViolationCode::EmptyOtherLabel));
    }
    SUBCASE("negative expected days") {
        auto r = valid_record();
        r.arrangement_status = ArrangementStatus{ArrangementKind::WillArrange, -1};
        CHECK(has_only(validate_record(r), ViolationCode::NegativeExpectedDays));
    }
}

TEST_CASE("validation is pure and reports every violation") {
    auto r = valid_record();
    r.content_delivery_time = *parse_rfc3339("2025-02-28T10:00:00Z");
    r.reasons_not_delivered = "never shipped";
    r.content_hits = 0;
    const auto first = validate_record(r);
    const auto second = validate_record(r);
    CHECK(first == second);
    CHECK(first.size() == 3);
}

TEST_CASE("enumeration spellings round trip") {
    for (const char* name : {"PhysicalBook", "Ebook", "Video", "Slides", "Journal",
                             "Tutorial", "Report", "Thesis", "Other(microfilm)"}) {
        const auto parsed = parse_content_type(name);
        REQUIRE(parsed.has_value());
        CHECK(to_string(*parsed) == name);
    }
    CHECK_FALSE(parse_content_type("Paperback").has_value());
    const auto empty_other = parse_content_type("Other()");
    REQUIRE(empty_other.has_value());
    CHECK(empty_other->other_label.empty()); // validate_record flags this downstream

    for (const char* name : {"NotNeeded", "WillArrange(7)", "WillNotArrange"}) {
        const auto parsed = parse_arrangement_status(name);
        REQUIRE(parsed.has_value());
        CHECK(to_string(*parsed) == name);
    }
    CHECK_FALSE(parse_arrangement_status("WillArrange(week)").has_value());
    CHECK_FALSE(parse_arrangement_status("WillArrange").has_value());
}

TEST_CASE("outcome type forbids zero-day lateness") {
    CHECK_THROWS_AS(ServiceOutcome::late(0), std::invalid_argument);
    CHECK(ServiceOutcome::late(1).tau_days() == 1);
    CHECK(to_string(ServiceOutcome::late(3)) == "Late(3)");
    CHECK(to_string(ServiceOutcome::on_time()) == "OnTime");
    CHECK(to_string(ServiceOutcome::unserved()) == "Unserved");
}
