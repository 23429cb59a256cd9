#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tada/core/time.hpp"

namespace tada {

using OccasionId = std::string;
using ParticipantId = std::string;
using StudyId = std::string;
using PredictionId = std::string;
using AnnotationId = std::string;

/// FNDDS-style numeric food code: 1 to 8 decimal digits.
class FoodCode {
public:
    /// Throws InvalidValue("food_code", ...) on anything but 1-8 digits.
    explicit FoodCode(std::string code);

    static bool is_valid(std::string_view code) noexcept;

    const std::string& str() const noexcept { return code_; }

    friend auto operator<=>(const FoodCode&, const FoodCode&) = default;

private:
    std::string code_;
};

/// Researcher initials: 1 to 4 uppercase ASCII letters. "SYS" marks system drafts.
class Initials {
public:
    explicit Initials(std::string value);

    static bool is_valid(std::string_view value) noexcept;
    static Initials system() { return Initials("SYS"); }

    const std::string& str() const noexcept { return value_; }

    friend auto operator<=>(const Initials&, const Initials&) = default;

private:
    std::string value_;
};

enum class LifecycleState { Uploaded, Analyzed, ParticipantReviewed, Refined, Finalized };

std::string_view to_string(LifecycleState state) noexcept;
/// Throws InvalidValue("state", ...) for unknown names.
LifecycleState parse_lifecycle_state(std::string_view text);

enum class ImageKind { Before, After };
enum class MediaType { Jpeg, Png };

std::string_view to_string(ImageKind kind) noexcept;
std::string_view to_string(MediaType type) noexcept;
std::string_view mime_type(MediaType type) noexcept;
MediaType parse_media_type(std::string_view text);

struct GeoPoint {
    double latitude = 0.0;
    double longitude = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct CaptureMetadata {
    Timestamp captured_at;
    std::optional<GeoPoint> gps;
    std::optional<double> camera_pose_angle;
    std::map<std::string, std::string> exif;
    bool fiducial_marker_present = false;
    std::optional<double> fiducial_scale_mm_per_px;

    friend bool operator==(const CaptureMetadata&, const CaptureMetadata&) = default;
};

struct ImageCapture {
    ImageKind kind = ImageKind::Before;
    std::string content_hash;
    int width_px = 0;
    int height_px = 0;
    MediaType media_type = MediaType::Jpeg;

    friend bool operator==(const ImageCapture&, const ImageCapture&) = default;
};

/// Image-space point, origin top-left, y down.
struct PinLocation {
    int x_px = 0;
    int y_px = 0;

    friend bool operator==(const PinLocation&, const PinLocation&) = default;
};

struct BoundingBox {
    int x_px = 0;
    int y_px = 0;
    int w_px = 0;
    int h_px = 0;

    std::int64_t area() const noexcept { return std::int64_t{w_px} * h_px; }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct PredictedFood {
    PredictionId prediction_id;
    std::string label;
    std::optional<FoodCode> food_code;
    PinLocation pin;
    double confidence = 0.0;

    friend bool operator==(const PredictedFood&, const PredictedFood&) = default;
};

struct Confirmed {
    friend bool operator==(const Confirmed&, const Confirmed&) = default;
};
struct Relabeled {
    std::string new_label;
    friend bool operator==(const Relabeled&, const Relabeled&) = default;
};
struct Removed {
    friend bool operator==(const Removed&, const Removed&) = default;
};
using Verdict = std::variant<Confirmed, Relabeled, Removed>;

struct ReviewVerdict {
    PredictionId prediction_id;
    Verdict verdict;

    friend bool operator==(const ReviewVerdict&, const ReviewVerdict&) = default;
};

struct AddedFood {
    std::string label;
    PinLocation pin;

    friend bool operator==(const AddedFood&, const AddedFood&) = default;
};

struct ParticipantReview {
    std::vector<ReviewVerdict> verdicts;
    std::vector<AddedFood> additions;
    Timestamp submitted_at;

    friend bool operator==(const ParticipantReview&, const ParticipantReview&) = default;
};

/// A participant-confirmed food: what merge_review produces.
struct ConfirmedFood {
    std::string label;
    PinLocation pin;

    friend bool operator==(const ConfirmedFood&, const ConfirmedFood&) = default;
};

enum class EnergySource { Estimated, Manual };
std::string_view to_string(EnergySource source) noexcept;
EnergySource parse_energy_source(std::string_view text);

struct ResearcherAnnotation {
    AnnotationId annotation_id;
    Initials initials = Initials::system();
    BoundingBox box;
    std::string label;
    std::optional<FoodCode> food_code;
    bool free_text = false;
    std::optional<double> energy_kcal;
    std::optional<EnergySource> energy_source;
    Timestamp created_at;

    friend bool operator==(const ResearcherAnnotation&, const ResearcherAnnotation&) = default;
};

struct EatingOccasion {
    OccasionId occasion_id;
    ParticipantId participant_id;
    StudyId study_id;
    ImageCapture before;
    std::optional<ImageCapture> after;
    CaptureMetadata metadata;
    LifecycleState state = LifecycleState::Uploaded;
    std::int64_t version = 0;

    friend bool operator==(const EatingOccasion&, const EatingOccasion&) = default;
};

} // namespace tada
