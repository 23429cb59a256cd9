#pragma once

#include <string>
#include <vector>

#include "tada/core/types.hpp"

namespace tada {

/// One failed constraint: the field path and what went wrong.
struct Violation {
    std::string field;
    std::string reason;

    friend bool operator==(const Violation&, const Violation&) = default;
};

using Violations = std::vector<Violation>;

/// Empty result means the box lies fully inside `image` with w, h >= 1.
Violations validate_box(const BoundingBox& box, const ImageCapture& image);

Violations validate_pin(const PinLocation& pin, const ImageCapture& image, const std::string& field = "pin");

/// Range checks only (lat/lon, pose angle, fiducial scale/flag pairing).
Violations validate_metadata(const CaptureMetadata& metadata);

} // namespace tada
