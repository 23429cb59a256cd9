#include "tada/server/export.hpp"

#include <charconv>
#include <set>
#include <sstream>

namespace tada::server {

namespace {

bool exported(const store::OccasionRecord& r) { return r.state() == LifecycleState::Finalized; }

std::string number(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

} // namespace

std::string csv_cell(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string export_json(const StudyId& study_id, std::span<const store::OccasionRecord> records) {
    Json occasions = Json::array();
    std::set<std::string> images;
    std::optional<Timestamp> as_of;
    std::size_t annotation_count = 0;

    for (const auto& r : records) {
        if (!exported(r)) continue;
        const auto& o = r.occasion;
        Json entry{{"occasion_id", o.occasion_id},
                   {"participant_id", o.participant_id},
                   {"study_id", o.study_id},
                   {"state", o.state},
                   {"version", o.version},
                   {"metadata", o.metadata},
                   {"images", Json{{"before", o.before}}},
                   {"predictions", r.predictions},
                   {"participant_confirmed_foods", r.confirmed},
                   {"researcher_annotations", r.annotations},
                   {"lifecycle_history", r.history}};
        if (o.after) entry["images"]["after"] = *o.after;
        if (r.review) entry["participant_review"] = *r.review;
        if (r.estimate) entry["energy_estimate"] = *r.estimate;

        images.insert(o.before.content_hash);
        if (o.after) images.insert(o.after->content_hash);
        for (const auto& h : r.history)
            if (!as_of || h.at > *as_of) as_of = h.at;
        annotation_count += r.annotations.size();
        occasions.push_back(std::move(entry));
    }

    Json manifest{{"study_id", study_id},
                  {"schema_version", kExportSchemaVersion},
                  {"occasion_count", occasions.size()},
                  {"annotation_count", annotation_count},
                  {"images", images}};
    manifest["exported_at"] = as_of ? Json(*as_of) : Json(nullptr);

    return Json{{"manifest", manifest}, {"occasions", occasions}}.dump(2) + "\n";
}

std::string export_csv(std::span<const store::OccasionRecord> records) {
    std::ostringstream out;
    out << "occasion_id,participant_id,initials,label,food_code,x,y,w,h,energy_kcal,state\n";
    for (const auto& r : records) {
        if (!exported(r)) continue;
        for (const auto& a : r.annotations) {
            out << csv_cell(r.occasion.occasion_id) << ',' << csv_cell(r.occasion.participant_id) << ','
                << a.initials.str() << ',' << csv_cell(a.label) << ',' << (a.food_code ? a.food_code->str() : "")
                << ',' << a.box.x_px << ',' << a.box.y_px << ',' << a.box.w_px << ',' << a.box.h_px << ','
                << (a.energy_kcal ? number(*a.energy_kcal) : "") << ',' << to_string(r.state()) << '\n';
        }
    }
    return out.str();
}

} // namespace tada::server
