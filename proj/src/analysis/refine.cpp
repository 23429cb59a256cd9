#include "tada/analysis/refine.hpp"

#include <algorithm>
#include <cmath>

namespace tada::analysis {

PortionEstimate estimate_portion(const BoundingBox& box, const food::FoodItem* item, const CaptureMetadata& metadata) {
    if (!metadata.fiducial_scale_mm_per_px || !item || !item->energy_kcal_per_100g) return {};
    const double s = *metadata.fiducial_scale_mm_per_px;
    const double area_mm2 = static_cast<double>(box.area()) * s * s;
    const double grams = area_mm2 * kSurfaceDensityGPerMm2;
    return {grams * *item->energy_kcal_per_100g / 100.0, true};
}

namespace {

// Clip one axis of a side-length square centered at `center`.
std::pair<int, int> clip_span(int center, int side, int limit) {
    const int start = static_cast<int>(std::floor(center - side / 2.0));
    int lo = std::max(0, start);
    int hi = std::min(limit, start + side);
    if (hi <= lo) hi = std::min(limit, lo + 1);
    if (hi <= lo) lo = hi - 1;
    return {lo, hi - lo};
}

} // namespace

BoundingBox draft_box(const PinLocation& pin, const ImageCapture& image) {
    const int side = std::max(1, std::min(image.width_px, image.height_px) / 4);
    const auto [x, w] = clip_span(pin.x_px, side, image.width_px);
    const auto [y, h] = clip_span(pin.y_px, side, image.height_px);
    return {x, y, w, h};
}

RefineResult refine(std::span<const ConfirmedFood> confirmed, const ImageCapture& before, const food::FoodDatabase& db,
                    const CaptureMetadata& metadata, Timestamp now) {
    RefineResult result;
    for (std::size_t i = 0; i < confirmed.size(); ++i) {
        const auto& food = confirmed[i];
        ResearcherAnnotation draft;
        draft.annotation_id = "a" + std::to_string(i + 1);
        draft.initials = Initials::system();
        draft.box = draft_box(food.pin, before);
        draft.label = food.label;
        draft.created_at = now;

        std::optional<food::FoodItem> item;
        try {
            if (const auto resolution = db.resolve(food.label); const auto* m = std::get_if<food::Matched>(&resolution))
                item = m->item;
            else
                draft.free_text = true;
        } catch (const food::Ambiguous&) {
            // Left without a code for the researcher to disambiguate.
        } catch (const food::EmptyEntry&) {
            draft.free_text = true;
        }
        if (item) draft.food_code = item->code;

        const auto portion = estimate_portion(draft.box, item ? &*item : nullptr, metadata);
        if (portion.estimated) {
            draft.energy_kcal = portion.kcal;
            draft.energy_source = EnergySource::Estimated;
        }
        result.estimate.per_food.push_back({food.label, portion.kcal});
        result.estimate.total_kcal += portion.kcal;
        result.drafts.push_back(std::move(draft));
    }
    return result;
}

} // namespace tada::analysis
