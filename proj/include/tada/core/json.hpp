#pragma once

// nlohmann/json bindings for the domain types. Field names are snake_case,
// timestamps RFC 3339 strings, enums their names.

#include <nlohmann/json.hpp>

#include "tada/core/types.hpp"

namespace tada {

using Json = nlohmann::json;

void to_json(Json& j, const Timestamp& t);
void from_json(const Json& j, Timestamp& t);
void to_json(Json& j, LifecycleState s);
void from_json(const Json& j, LifecycleState& s);
void to_json(Json& j, ImageKind k);
void from_json(const Json& j, ImageKind& k);
void to_json(Json& j, MediaType m);
void from_json(const Json& j, MediaType& m);
void to_json(Json& j, EnergySource s);
void from_json(const Json& j, EnergySource& s);
void to_json(Json& j, const GeoPoint& g);
void from_json(const Json& j, GeoPoint& g);
void to_json(Json& j, const CaptureMetadata& m);
void from_json(const Json& j, CaptureMetadata& m);
void to_json(Json& j, const ImageCapture& c);
void from_json(const Json& j, ImageCapture& c);
void to_json(Json& j, const PinLocation& p);
void from_json(const Json& j, PinLocation& p);
void to_json(Json& j, const BoundingBox& b);
void from_json(const Json& j, BoundingBox& b);
void to_json(Json& j, const PredictedFood& p);
void from_json(const Json& j, PredictedFood& p);
void to_json(Json& j, const ReviewVerdict& v);
void from_json(const Json& j, ReviewVerdict& v);
void to_json(Json& j, const AddedFood& a);
void from_json(const Json& j, AddedFood& a);
void to_json(Json& j, const ParticipantReview& r);
void from_json(const Json& j, ParticipantReview& r);
void to_json(Json& j, const ConfirmedFood& c);
void from_json(const Json& j, ConfirmedFood& c);
void to_json(Json& j, const ResearcherAnnotation& a);
void from_json(const Json& j, ResearcherAnnotation& a);
void to_json(Json& j, const EatingOccasion& o);
void from_json(const Json& j, EatingOccasion& o);

/// Deterministic serialization: sorted keys, no whitespace.
inline std::string canonical(const Json& j) { return j.dump(); }

} // namespace tada

// FoodCode and Initials have no valid default value, so they deserialize by
// construction.
template <>
struct nlohmann::adl_serializer<tada::FoodCode> {
    static tada::FoodCode from_json(const json& j);
    static void to_json(json& j, const tada::FoodCode& c) { j = c.str(); }
};

template <>
struct nlohmann::adl_serializer<tada::Initials> {
    static tada::Initials from_json(const json& j);
    static void to_json(json& j, const tada::Initials& i) { j = i.str(); }
};
