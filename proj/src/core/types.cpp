#include "tada/core/types.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "tada/core/errors.hpp"

namespace tada {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<std::pair<E, std::string_view>, N>& names, const char* field) {
    for (const auto& [value, name] : names)
        if (name == text) return value;
    throw InvalidValue(field, "unknown value '" + std::string(text) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E value, const std::array<std::pair<E, std::string_view>, N>& names) {
    for (const auto& [v, name] : names)
        if (v == value) return name;
    return "?";
}

constexpr std::array<std::pair<LifecycleState, std::string_view>, 5> kStates{{
    {LifecycleState::Uploaded, "Uploaded"},
    {LifecycleState::Analyzed, "Analyzed"},
    {LifecycleState::ParticipantReviewed, "ParticipantReviewed"},
    {LifecycleState::Refined, "Refined"},
    {LifecycleState::Finalized, "Finalized"},
}};

constexpr std::array<std::pair<ImageKind, std::string_view>, 2> kKinds{{
    {ImageKind::Before, "Before"},
    {ImageKind::After, "After"},
}};

constexpr std::array<std::pair<MediaType, std::string_view>, 2> kMedia{{
    {MediaType::Jpeg, "JPEG"},
    {MediaType::Png, "PNG"},
}};

constexpr std::array<std::pair<EnergySource, std::string_view>, 2> kSources{{
    {EnergySource::Estimated, "estimated"},
    {EnergySource::Manual, "manual"},
}};

} // namespace

FoodCode::FoodCode(std::string code) : code_(std::move(code)) {
    if (!is_valid(code_)) throw InvalidValue("food_code", "expected 1-8 decimal digits, got '" + code_ + "'");
}

bool FoodCode::is_valid(std::string_view code) noexcept {
    return !code.empty() && code.size() <= 8 &&
           std::all_of(code.begin(), code.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

Initials::Initials(std::string value) : value_(std::move(value)) {
    if (!is_valid(value_)) throw InvalidValue("initials", "expected 1-4 uppercase letters, got '" + value_ + "'");
}

bool Initials::is_valid(std::string_view value) noexcept {
    return !value.empty() && value.size() <= 4 &&
           std::all_of(value.begin(), value.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::string_view to_string(LifecycleState state) noexcept { return enum_name(state, kStates); }
LifecycleState parse_lifecycle_state(std::string_view text) { return parse_enum(text, kStates, "state"); }

std::string_view to_string(ImageKind kind) noexcept { return enum_name(kind, kKinds); }
std::string_view to_string(MediaType type) noexcept { return enum_name(type, kMedia); }
MediaType parse_media_type(std::string_view text) { return parse_enum(text, kMedia, "media_type"); }

std::string_view mime_type(MediaType type) noexcept {
    return type == MediaType::Png ? "image/png" : "image/jpeg";
}

std::string_view to_string(EnergySource source) noexcept { return enum_name(source, kSources); }
EnergySource parse_energy_source(std::string_view text) { return parse_enum(text, kSources, "energy_source"); }

} // namespace tada
