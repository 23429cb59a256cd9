#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tada/core/types.hpp"
#include "tada/food/database.hpp"

namespace tada::analysis {

/// Assumed food surface density of the portion stub, g/mm^2. Not a physical
/// measurement.
inline constexpr double kSurfaceDensityGPerMm2 = 0.01;

struct FoodEnergy {
    std::string label;
    double kcal = 0.0;

    friend bool operator==(const FoodEnergy&, const FoodEnergy&) = default;
};

struct EnergyEstimate {
    std::vector<FoodEnergy> per_food;
    double total_kcal = 0.0;

    friend bool operator==(const EnergyEstimate&, const EnergyEstimate&) = default;
};

struct PortionEstimate {
    double kcal = 0.0;
    /// False when scale or energy density is missing; kcal is then 0.
    bool estimated = false;
};

/// kcal = area_px * s^2 * 0.01 g/mm^2 * e / 100, where s is the fiducial
/// scale (mm/px) and e the energy density (kcal/100 g).
PortionEstimate estimate_portion(const BoundingBox& box, const food::FoodItem* item, const CaptureMetadata& metadata);

/// Square of side max(1, min(w, h) / 4) centered on the pin, clipped to the image.
BoundingBox draft_box(const PinLocation& pin, const ImageCapture& image);

struct RefineResult {
    std::vector<ResearcherAnnotation> drafts;
    EnergyEstimate estimate;
};

/// One SYS draft per confirmed food with ids a1..an. Labels are never
/// changed; they are only resolved against `db` to attach a code.
RefineResult refine(std::span<const ConfirmedFood> confirmed, const ImageCapture& before, const food::FoodDatabase& db,
                    const CaptureMetadata& metadata, Timestamp now);

} // namespace tada::analysis
