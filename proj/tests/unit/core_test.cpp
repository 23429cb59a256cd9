#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tada/core/image.hpp"
#include "tada/core/json.hpp"
#include "tada/core/lifecycle.hpp"
#include "tada/core/review.hpp"
#include "tada/core/validation.hpp"

using namespace tada;

namespace {

ImageCapture image(int w, int h) { return ImageCapture{ImageKind::Before, std::string(64, 'a'), w, h, MediaType::Png}; }

EatingOccasion occasion(LifecycleState state, std::int64_t version = 1) {
    EatingOccasion o;
    o.occasion_id = "o1";
    o.before = image(100, 100);
    o.after = ImageCapture{ImageKind::After, std::string(64, 'b'), 100, 100, MediaType::Png};
    o.state = state;
    o.version = version;
    return o;
}

bool has_field(const Violations& v, const std::string& field) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.field == field; });
}

} // namespace

TEST(Timestamp, ParsesUtcAndOffsets) {
    EXPECT_EQ(Timestamp::parse("2021-05-01T12:30:00Z").to_string(), "2021-05-01T12:30:00Z");
    EXPECT_EQ(Timestamp::parse("2021-05-01T14:30:00+02:00"), Timestamp::parse("2021-05-01T12:30:00Z"));
    EXPECT_EQ(Timestamp::parse("2021-05-01T12:30:00.250Z").to_string(), "2021-05-01T12:30:00.250Z");
    EXPECT_EQ(Timestamp::parse("1970-01-01T00:00:01Z").unix_ms(), 1000);
}

TEST(Timestamp, RejectsMalformed) {
    for (const char* bad : {"", "2021-05-01", "2021-13-01T00:00:00Z", "2021-02-30T00:00:00Z", "2021-05-01T24:00:00Z",
                            "2021-05-01T12:30:00", "2021-05-01T12:30:60Z", "yesterday"})
        EXPECT_THROW(Timestamp::parse(bad), InvalidValue) << bad;
}

TEST(Timestamp, RoundTripsRandomInstants) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> ms(0, 4102444800000);
    for (int i = 0; i < 2000; ++i) {
        const auto t = Timestamp::from_unix_ms(ms(rng));
        EXPECT_EQ(Timestamp::parse(t.to_string()), t);
    }
}

TEST(FoodCode, AcceptsOneToEightDigits) {
    EXPECT_TRUE(FoodCode::is_valid("58100100"));
    EXPECT_TRUE(FoodCode::is_valid("1"));
    EXPECT_FALSE(FoodCode::is_valid(""));
    EXPECT_FALSE(FoodCode::is_valid("123456789"));
    EXPECT_FALSE(FoodCode::is_valid("12a4"));
    EXPECT_THROW(FoodCode("x"), InvalidValue);
}

TEST(Initials, OneToFourUppercase) {
    EXPECT_TRUE(Initials::is_valid("AB"));
    EXPECT_TRUE(Initials::is_valid("ABCD"));
    EXPECT_FALSE(Initials::is_valid(""));
    EXPECT_FALSE(Initials::is_valid("ab"));
    EXPECT_FALSE(Initials::is_valid("ABCDE"));
    EXPECT_THROW(Initials("a1"), InvalidValue);
}

TEST(Lifecycle, FirstLegalTransitionBumpsVersion) {
    const auto next = advance_state(occasion(LifecycleState::Uploaded, 1), LifecycleState::Analyzed);
    EXPECT_EQ(next.state, LifecycleState::Analyzed);
    EXPECT_EQ(next.version, 2);
}

TEST(Lifecycle, SkipAndBackwardAreIllegal) {
    EXPECT_THROW(advance_state(occasion(LifecycleState::Uploaded), LifecycleState::Refined), IllegalTransition);
    EXPECT_THROW(advance_state(occasion(LifecycleState::Finalized), LifecycleState::Uploaded), IllegalTransition);
    EXPECT_THROW(advance_state(occasion(LifecycleState::Analyzed), LifecycleState::Analyzed), IllegalTransition);
}

TEST(Lifecycle, MissingAfterImageBlocksAnalysis) {
    auto o = occasion(LifecycleState::Uploaded);
    o.after.reset();
    EXPECT_THROW(advance_state(o, LifecycleState::Analyzed), IllegalTransition);
}

TEST(Lifecycle, RandomSequencesStayOnThePath) {
    const std::vector<LifecycleState> path{LifecycleState::Uploaded, LifecycleState::Analyzed,
                                           LifecycleState::ParticipantReviewed, LifecycleState::Refined,
                                           LifecycleState::Finalized};
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> pick(0, 4);
    for (int trial = 0; trial < 2000; ++trial) {
        auto o = occasion(LifecycleState::Uploaded, 1);
        std::vector<LifecycleState> seen{o.state};
        for (int step = 0; step < 12; ++step) {
            const auto target = path[static_cast<std::size_t>(pick(rng))];
            try {
                const auto next = advance_state(o, target);
                ASSERT_EQ(next.version, o.version + 1);
                o = next;
                seen.push_back(o.state);
            } catch (const IllegalTransition&) {
                ASSERT_NE(next_state(o.state), std::optional(target));
            }
        }
        ASSERT_LE(seen.size(), path.size());
        for (std::size_t i = 0; i < seen.size(); ++i) ASSERT_EQ(seen[i], path[i]);
    }
}

TEST(ValidateBox, Examples) {
    EXPECT_TRUE(validate_box({0, 0, 10, 10}, image(100, 100)).empty());
    const auto edge = validate_box({95, 95, 10, 10}, image(100, 100));
    EXPECT_EQ(edge.size(), 2u);
    EXPECT_TRUE(has_field(validate_box({0, 0, 0, 5}, image(100, 100)), "box.w_px"));
}

TEST(ValidateBox, ExhaustiveEightByEight) {
    const auto img = image(8, 8);
    int accepted = 0;
    for (int x = -2; x <= 9; ++x)
        for (int y = -2; y <= 9; ++y)
            for (int w = -1; w <= 10; ++w)
                for (int h = -1; h <= 10; ++h) {
                    const bool oracle = x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= 8 && y + h <= 8;
                    const bool ok = validate_box({x, y, w, h}, img).empty();
                    ASSERT_EQ(ok, oracle) << x << ',' << y << ',' << w << ',' << h;
                    accepted += ok;
                }
    EXPECT_EQ(accepted, 1296);
}

TEST(ValidateBox, NoOverflowNearIntMax) {
    const int big = std::numeric_limits<int>::max();
    EXPECT_FALSE(validate_box({big, 0, big, 1}, image(100, 100)).empty());
    EXPECT_FALSE(validate_box({1, 1, big, big}, image(100, 100)).empty());
}

TEST(ValidateMetadata, RangeRules) {
    CaptureMetadata m;
    m.gps = GeoPoint{123, 0};
    EXPECT_TRUE(has_field(validate_metadata(m), "gps.latitude"));
    m.gps = GeoPoint{45, -181};
    EXPECT_TRUE(has_field(validate_metadata(m), "gps.longitude"));
    m.gps.reset();
    m.fiducial_scale_mm_per_px = 0.5;
    EXPECT_TRUE(has_field(validate_metadata(m), "fiducial_scale_mm_per_px"));
    m.fiducial_marker_present = true;
    EXPECT_TRUE(validate_metadata(m).empty());
    m.fiducial_scale_mm_per_px = 0.0;
    EXPECT_FALSE(validate_metadata(m).empty());
}

TEST(MergeReview, IdentityReview) {
    const std::vector<PredictedFood> p{{"p1", "pasta", std::nullopt, {1, 2}, 0.9}, {"p2", "bread", std::nullopt, {3, 4}, 0.8}};
    ParticipantReview r{{{"p1", Confirmed{}}, {"p2", Confirmed{}}}, {}, {}};
    const auto out = merge_review(p, r);
    EXPECT_EQ(out, (std::vector<ConfirmedFood>{{"pasta", {1, 2}}, {"bread", {3, 4}}}));
}

TEST(MergeReview, RelabelRemoveAdd) {
    const std::vector<PredictedFood> p{{"p1", "pasta", std::nullopt, {1, 2}, 0.9}, {"p2", "bread", std::nullopt, {3, 4}, 0.8}};
    ParticipantReview r{{{"p1", Relabeled{"lasagna"}}, {"p2", Removed{}}}, {{"water", {5, 6}}}, {}};
    EXPECT_EQ(merge_review(p, r), (std::vector<ConfirmedFood>{{"lasagna", {1, 2}}, {"water", {5, 6}}}));
    EXPECT_EQ(merge_review(p, r), merge_review(p, r));
}

TEST(MergeReview, UnknownAndDuplicate) {
    const std::vector<PredictedFood> p{{"p1", "pasta", std::nullopt, {1, 2}, 0.9}};
    EXPECT_THROW(merge_review(p, ParticipantReview{{{"p9", Confirmed{}}}, {}, {}}), UnknownPrediction);
    EXPECT_THROW(merge_review(p, ParticipantReview{{{"p1", Confirmed{}}, {"p1", Removed{}}}, {}, {}}), DuplicateVerdict);
}

TEST(MergeReview, CardinalityProperty) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = static_cast<int>(rng() % 6);
        std::vector<PredictedFood> p;
        ParticipantReview r;
        int kept = 0;
        for (int i = 0; i < n; ++i) {
            const auto id = "p" + std::to_string(i + 1);
            p.push_back({id, "food" + std::to_string(i), std::nullopt, {i, i}, 0.5});
            switch (rng() % 3) {
            case 0: r.verdicts.push_back({id, Confirmed{}}); ++kept; break;
            case 1: r.verdicts.push_back({id, Relabeled{"x" + std::to_string(i)}}); ++kept; break;
            default: r.verdicts.push_back({id, Removed{}}); break;
            }
        }
        const int adds = static_cast<int>(rng() % 3);
        for (int i = 0; i < adds; ++i) r.additions.push_back({"added", {i, 0}});
        std::shuffle(r.verdicts.begin(), r.verdicts.end(), rng);
        const auto out = merge_review(p, r);
        ASSERT_EQ(static_cast<int>(out.size()), kept + adds);
    }
}

TEST(ProbeImage, PngAndJpegHeaders) {
    const auto png = test::make_png(37, 21);
    const auto info = probe_image(std::as_bytes(std::span(png.data(), png.size())));
    EXPECT_EQ(info.media_type, MediaType::Png);
    EXPECT_EQ(info.width_px, 37);
    EXPECT_EQ(info.height_px, 21);

    const auto jpg = test::make_jpeg(640, 480);
    const auto jinfo = probe_image(std::as_bytes(std::span(jpg.data(), jpg.size())));
    EXPECT_EQ(jinfo.media_type, MediaType::Jpeg);
    EXPECT_EQ(jinfo.width_px, 640);
    EXPECT_EQ(jinfo.height_px, 480);
}

TEST(ProbeImage, RealJpegFixture) {
    const auto bytes = test::read_file(test::data_dir() / "images" / "lunch-before.jpg");
    const auto info = probe_image(std::as_bytes(std::span(bytes.data(), bytes.size())));
    EXPECT_EQ(info.width_px, 640);
    EXPECT_EQ(info.height_px, 480);
}

TEST(ProbeImage, RejectsGarbage) {
    for (const std::string bad : {std::string("hello"), std::string("\x89PNG\r\n\x1a\n", 8), std::string("\xFF\xD8\xFF", 3)})
        EXPECT_THROW(probe_image(std::as_bytes(std::span(bad.data(), bad.size()))), DecodeError);
}

TEST(Json, OccasionRoundTrip) {
    auto o = occasion(LifecycleState::Refined, 4);
    o.metadata.captured_at = Timestamp::parse("2021-05-01T12:30:00Z");
    o.metadata.gps = GeoPoint{40.4, -86.9};
    o.metadata.exif = {{"Make", "Phone"}};
    const Json j = o;
    EXPECT_EQ(j.get<EatingOccasion>(), o);
    EXPECT_FALSE(j["metadata"].contains("camera_pose_angle"));
}

TEST(Json, AnnotationRoundTripAndFieldErrors) {
    ResearcherAnnotation a;
    a.annotation_id = "a1";
    a.initials = Initials("AB");
    a.box = {1, 2, 3, 4};
    a.label = "potato";
    a.food_code = FoodCode("58100100");
    a.energy_kcal = 23.25;
    a.energy_source = EnergySource::Manual;
    a.created_at = Timestamp::from_unix_ms(1000);
    EXPECT_EQ(Json(a).get<ResearcherAnnotation>(), a);

    Json bad = a;
    bad["initials"] = "ab";
    try {
        (void)bad.get<ResearcherAnnotation>();
        FAIL();
    } catch (const InvalidValue& e) {
        EXPECT_EQ(e.field(), "initials");
    }
}

TEST(Json, ReviewVerdictShapes) {
    ParticipantReview r{{{"p1", Relabeled{"water"}}, {"p2", Removed{}}, {"p3", Confirmed{}}},
                        {{"banana", {3, 4}}},
                        Timestamp::from_unix_ms(5)};
    const Json j = r;
    EXPECT_EQ(j["verdicts"][0]["verdict"], "Relabeled");
    EXPECT_EQ(j["verdicts"][0]["new_label"], "water");
    EXPECT_EQ(j.get<ParticipantReview>(), r);
}
