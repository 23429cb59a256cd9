#include "tada/core/json.hpp"

#include <limits>

#include "tada/core/errors.hpp"

namespace tada {

namespace {

// Field readers that report the offending field by name instead of leaking
// nlohmann's type_error text.
const Json& require(const Json& j, const char* key) {
    if (!j.is_object()) throw InvalidValue(key, "enclosing value is not an object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) throw InvalidValue(key, "missing");
    return *it;
}

template <typename T>
T get_as(const Json& v, const char* key) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidValue(key, "wrong type");
    }
}

template <typename T>
T field(const Json& j, const char* key) {
    return get_as<T>(require(j, key), key);
}

template <typename T>
std::optional<T> opt_field(const Json& j, const char* key) {
    if (!j.is_object()) throw InvalidValue(key, "enclosing value is not an object");
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return get_as<T>(*it, key);
}

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

std::string string_of(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_string()) throw InvalidValue(key, "expected string");
    return v.get<std::string>();
}

int int_of(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number_integer()) throw InvalidValue(key, "expected integer");
    const auto wide = v.get<std::int64_t>();
    if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max())
        throw InvalidValue(key, "out of range");
    return static_cast<int>(wide);
}

double number_of(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number()) throw InvalidValue(key, "expected number");
    return v.get<double>();
}

std::optional<double> opt_number(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw InvalidValue(key, "expected number");
    return it->get<double>();
}

} // namespace

void to_json(Json& j, const Timestamp& t) { j = t.to_string(); }
void from_json(const Json& j, Timestamp& t) {
    if (!j.is_string()) throw InvalidValue("timestamp", "expected RFC 3339 string");
    t = Timestamp::parse(j.get<std::string>());
}

void to_json(Json& j, LifecycleState s) { j = std::string(to_string(s)); }
void from_json(const Json& j, LifecycleState& s) { s = parse_lifecycle_state(get_as<std::string>(j, "state")); }

void to_json(Json& j, ImageKind k) { j = std::string(to_string(k)); }
void from_json(const Json& j, ImageKind& k) {
    const auto text = get_as<std::string>(j, "kind");
    if (text == "Before")
        k = ImageKind::Before;
    else if (text == "After")
        k = ImageKind::After;
    else
        throw InvalidValue("kind", "unknown value '" + text + "'");
}

void to_json(Json& j, MediaType m) { j = std::string(to_string(m)); }
void from_json(const Json& j, MediaType& m) { m = parse_media_type(get_as<std::string>(j, "media_type")); }

void to_json(Json& j, EnergySource s) { j = std::string(to_string(s)); }
void from_json(const Json& j, EnergySource& s) { s = parse_energy_source(get_as<std::string>(j, "energy_source")); }

void to_json(Json& j, const GeoPoint& g) { j = Json{{"latitude", g.latitude}, {"longitude", g.longitude}}; }
void from_json(const Json& j, GeoPoint& g) {
    try {
        g.latitude = number_of(j, "latitude");
    } catch (const InvalidValue& e) {
        throw InvalidValue("gps.latitude", e.what());
    }
    try {
        g.longitude = number_of(j, "longitude");
    } catch (const InvalidValue& e) {
        throw InvalidValue("gps.longitude", e.what());
    }
}

void to_json(Json& j, const CaptureMetadata& m) {
    j = Json::object();
    j["captured_at"] = m.captured_at;
    put_opt(j, "gps", m.gps);
    put_opt(j, "camera_pose_angle", m.camera_pose_angle);
    j["exif"] = m.exif;
    j["fiducial_marker_present"] = m.fiducial_marker_present;
    put_opt(j, "fiducial_scale_mm_per_px", m.fiducial_scale_mm_per_px);
}

void from_json(const Json& j, CaptureMetadata& m) {
    if (!j.is_object()) throw InvalidValue("metadata", "expected object");
    try {
        m.captured_at = Timestamp::parse(string_of(j, "captured_at"));
    } catch (const InvalidValue& e) {
        throw InvalidValue("captured_at", e.what());
    }
    if (const auto it = j.find("gps"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw InvalidValue("gps", "expected object");
        m.gps = it->get<GeoPoint>();
    } else {
        m.gps.reset();
    }
    m.camera_pose_angle = opt_number(j, "camera_pose_angle");
    m.exif.clear();
    if (const auto it = j.find("exif"); it != j.end() && !it->is_null()) {
        if (!it->is_object()) throw InvalidValue("exif", "expected flat object of strings");
        for (const auto& [k, v] : it->items()) {
            if (!v.is_string()) throw InvalidValue("exif." + k, "expected string");
            m.exif.emplace(k, v.get<std::string>());
        }
    }
    m.fiducial_marker_present = opt_field<bool>(j, "fiducial_marker_present").value_or(false);
    m.fiducial_scale_mm_per_px = opt_number(j, "fiducial_scale_mm_per_px");
}

void to_json(Json& j, const ImageCapture& c) {
    j = Json{{"kind", c.kind},
             {"content_hash", c.content_hash},
             {"width_px", c.width_px},
             {"height_px", c.height_px},
             {"media_type", c.media_type}};
}

void from_json(const Json& j, ImageCapture& c) {
    c.kind = field<ImageKind>(j, "kind");
    c.content_hash = string_of(j, "content_hash");
    c.width_px = int_of(j, "width_px");
    c.height_px = int_of(j, "height_px");
    c.media_type = field<MediaType>(j, "media_type");
}

void to_json(Json& j, const PinLocation& p) { j = Json{{"x_px", p.x_px}, {"y_px", p.y_px}}; }
void from_json(const Json& j, PinLocation& p) {
    p.x_px = int_of(j, "x_px");
    p.y_px = int_of(j, "y_px");
}

void to_json(Json& j, const BoundingBox& b) {
    j = Json{{"x_px", b.x_px}, {"y_px", b.y_px}, {"w_px", b.w_px}, {"h_px", b.h_px}};
}
void from_json(const Json& j, BoundingBox& b) {
    b.x_px = int_of(j, "x_px");
    b.y_px = int_of(j, "y_px");
    b.w_px = int_of(j, "w_px");
    b.h_px = int_of(j, "h_px");
}

void to_json(Json& j, const PredictedFood& p) {
    j = Json{{"prediction_id", p.prediction_id}, {"label", p.label}, {"pin", p.pin}, {"confidence", p.confidence}};
    put_opt(j, "food_code", p.food_code);
}

void from_json(const Json& j, PredictedFood& p) {
    p.prediction_id = string_of(j, "prediction_id");
    p.label = string_of(j, "label");
    p.food_code = opt_field<FoodCode>(j, "food_code");
    p.pin = field<PinLocation>(j, "pin");
    p.confidence = number_of(j, "confidence");
}

void to_json(Json& j, const ReviewVerdict& v) {
    j = Json{{"prediction_id", v.prediction_id}};
    std::visit(
        [&](const auto& verdict) {
            using V = std::decay_t<decltype(verdict)>;
            if constexpr (std::is_same_v<V, Confirmed>) {
                j["verdict"] = "Confirmed";
            } else if constexpr (std::is_same_v<V, Relabeled>) {
                j["verdict"] = "Relabeled";
                j["new_label"] = verdict.new_label;
            } else {
                j["verdict"] = "Removed";
            }
        },
        v.verdict);
}

void from_json(const Json& j, ReviewVerdict& v) {
    v.prediction_id = string_of(j, "prediction_id");
    const auto kind = string_of(j, "verdict");
    if (kind == "Confirmed") {
        v.verdict = Confirmed{};
    } else if (kind == "Removed") {
        v.verdict = Removed{};
    } else if (kind == "Relabeled") {
        auto label = string_of(j, "new_label");
        if (label.empty()) throw InvalidValue("new_label", "must be non-empty");
        v.verdict = Relabeled{std::move(label)};
    } else {
        throw InvalidValue("verdict", "unknown value '" + kind + "'");
    }
}

void to_json(Json& j, const AddedFood& a) { j = Json{{"label", a.label}, {"pin", a.pin}}; }
void from_json(const Json& j, AddedFood& a) {
    a.label = string_of(j, "label");
    a.pin = field<PinLocation>(j, "pin");
}

void to_json(Json& j, const ParticipantReview& r) {
    j = Json{{"verdicts", r.verdicts}, {"additions", r.additions}, {"submitted_at", r.submitted_at}};
}

void from_json(const Json& j, ParticipantReview& r) {
    r.verdicts = opt_field<std::vector<ReviewVerdict>>(j, "verdicts").value_or(std::vector<ReviewVerdict>{});
    r.additions = opt_field<std::vector<AddedFood>>(j, "additions").value_or(std::vector<AddedFood>{});
    r.submitted_at = field<Timestamp>(j, "submitted_at");
}

void to_json(Json& j, const ConfirmedFood& c) { j = Json{{"label", c.label}, {"pin", c.pin}}; }
void from_json(const Json& j, ConfirmedFood& c) {
    c.label = string_of(j, "label");
    c.pin = field<PinLocation>(j, "pin");
}

void to_json(Json& j, const ResearcherAnnotation& a) {
    j = Json{{"annotation_id", a.annotation_id},
             {"initials", a.initials},
             {"box", a.box},
             {"label", a.label},
             {"free_text", a.free_text},
             {"created_at", a.created_at}};
    put_opt(j, "food_code", a.food_code);
    put_opt(j, "energy_kcal", a.energy_kcal);
    put_opt(j, "energy_source", a.energy_source);
}

void from_json(const Json& j, ResearcherAnnotation& a) {
    a.annotation_id = string_of(j, "annotation_id");
    a.initials = field<Initials>(j, "initials");
    a.box = field<BoundingBox>(j, "box");
    a.label = string_of(j, "label");
    a.food_code = opt_field<FoodCode>(j, "food_code");
    a.free_text = opt_field<bool>(j, "free_text").value_or(false);
    a.energy_kcal = opt_number(j, "energy_kcal");
    a.energy_source = opt_field<EnergySource>(j, "energy_source");
    a.created_at = field<Timestamp>(j, "created_at");
}

void to_json(Json& j, const EatingOccasion& o) {
    j = Json{{"occasion_id", o.occasion_id},
             {"participant_id", o.participant_id},
             {"study_id", o.study_id},
             {"before", o.before},
             {"metadata", o.metadata},
             {"state", o.state},
             {"version", o.version}};
    put_opt(j, "after", o.after);
}

void from_json(const Json& j, EatingOccasion& o) {
    o.occasion_id = string_of(j, "occasion_id");
    o.participant_id = string_of(j, "participant_id");
    o.study_id = string_of(j, "study_id");
    o.before = field<ImageCapture>(j, "before");
    o.after = opt_field<ImageCapture>(j, "after");
    o.metadata = field<CaptureMetadata>(j, "metadata");
    o.state = field<LifecycleState>(j, "state");
    o.version = field<std::int64_t>(j, "version");
}

} // namespace tada

tada::FoodCode nlohmann::adl_serializer<tada::FoodCode>::from_json(const json& j) {
    if (!j.is_string()) throw tada::InvalidValue("food_code", "expected string");
    return tada::FoodCode(j.get<std::string>());
}

tada::Initials nlohmann::adl_serializer<tada::Initials>::from_json(const json& j) {
    if (!j.is_string()) throw tada::InvalidValue("initials", "expected string");
    return tada::Initials(j.get<std::string>());
}
