#include "tada/core/validation.hpp"

#include <cmath>

namespace tada {

Violations validate_box(const BoundingBox& box, const ImageCapture& image) {
    Violations out;
    if (box.w_px < 1) out.push_back({"box.w_px", "must be >= 1"});
    if (box.h_px < 1) out.push_back({"box.h_px", "must be >= 1"});
    if (box.x_px < 0) out.push_back({"box.x_px", "must be >= 0"});
    if (box.y_px < 0) out.push_back({"box.y_px", "must be >= 0"});
    // 64-bit sums: client-supplied ints may be near INT_MAX.
    if (std::int64_t{box.x_px} + box.w_px > image.width_px)
        out.push_back({"box.x_px", "box exceeds right edge (x + w > " + std::to_string(image.width_px) + ")"});
    if (std::int64_t{box.y_px} + box.h_px > image.height_px)
        out.push_back({"box.y_px", "box exceeds bottom edge (y + h > " + std::to_string(image.height_px) + ")"});
    return out;
}

Violations validate_pin(const PinLocation& pin, const ImageCapture& image, const std::string& field) {
    Violations out;
    if (pin.x_px < 0 || pin.x_px >= image.width_px)
        out.push_back({field + ".x_px", "must be in [0, " + std::to_string(image.width_px) + ")"});
    if (pin.y_px < 0 || pin.y_px >= image.height_px)
        out.push_back({field + ".y_px", "must be in [0, " + std::to_string(image.height_px) + ")"});
    return out;
}

Violations validate_metadata(const CaptureMetadata& metadata) {
    Violations out;
    if (metadata.gps) {
        const auto& g = *metadata.gps;
        if (!std::isfinite(g.latitude) || g.latitude < -90.0 || g.latitude > 90.0)
            out.push_back({"gps.latitude", "must be in [-90, 90]"});
        if (!std::isfinite(g.longitude) || g.longitude < -180.0 || g.longitude > 180.0)
            out.push_back({"gps.longitude", "must be in [-180, 180]"});
    }
    if (metadata.camera_pose_angle) {
        const double a = *metadata.camera_pose_angle;
        if (!std::isfinite(a) || a < -90.0 || a > 90.0) out.push_back({"camera_pose_angle", "must be in [-90, 90]"});
    }
    if (metadata.fiducial_scale_mm_per_px) {
        const double s = *metadata.fiducial_scale_mm_per_px;
        if (!std::isfinite(s) || s <= 0.0) out.push_back({"fiducial_scale_mm_per_px", "must be > 0"});
        if (!metadata.fiducial_marker_present)
            out.push_back({"fiducial_scale_mm_per_px", "present without fiducial_marker_present"});
    }
    return out;
}

} // namespace tada
