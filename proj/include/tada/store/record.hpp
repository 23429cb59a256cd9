#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tada/analysis/refine.hpp"
#include "tada/core/json.hpp"
#include "tada/core/types.hpp"

namespace tada::store {

struct HistoryEntry {
    LifecycleState state = LifecycleState::Uploaded;
    std::int64_t version = 0;
    Timestamp at;

    friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// Everything stored for one occasion. Participant-confirmed foods and
/// researcher annotations are kept in separate fields and never merged.
struct OccasionRecord {
    EatingOccasion occasion;
    std::string before_name;
    std::string after_name;
    std::string analyzer_id;
    std::vector<PredictedFood> predictions;
    std::optional<ParticipantReview> review;
    std::vector<ConfirmedFood> confirmed;
    std::vector<ResearcherAnnotation> annotations;
    std::optional<analysis::EnergyEstimate> estimate;
    std::vector<HistoryEntry> history;
    std::int64_t next_annotation_seq = 1;

    std::int64_t version() const noexcept { return occasion.version; }
    LifecycleState state() const noexcept { return occasion.state; }

    friend bool operator==(const OccasionRecord&, const OccasionRecord&) = default;
};

struct ParticipantActor {
    ParticipantId participant_id;
    friend bool operator==(const ParticipantActor&, const ParticipantActor&) = default;
};
struct ResearcherActor {
    Initials initials;
    friend bool operator==(const ResearcherActor&, const ResearcherActor&) = default;
};
struct SystemActor {
    friend bool operator==(const SystemActor&, const SystemActor&) = default;
};
using Actor = std::variant<ParticipantActor, ResearcherActor, SystemActor>;

enum class AuditAction { Uploaded, Analyzed, ReviewSubmitted, Refined, AnnotationSaved, AnnotationDeleted, Finalized };

std::string_view to_string(AuditAction action) noexcept;
AuditAction parse_audit_action(std::string_view text);

struct AuditEvent {
    std::int64_t seq = 0;
    OccasionId occasion_id;
    Actor actor = SystemActor{};
    AuditAction action = AuditAction::Uploaded;
    /// Canonical JSON snapshot of the OccasionRecord after the mutation.
    Json payload;
    Timestamp at;

    friend bool operator==(const AuditEvent&, const AuditEvent&) = default;
};

void to_json(Json& j, const HistoryEntry& h);
void from_json(const Json& j, HistoryEntry& h);
void to_json(Json& j, const OccasionRecord& r);
void from_json(const Json& j, OccasionRecord& r);
void to_json(Json& j, const Actor& a);
void from_json(const Json& j, Actor& a);
void to_json(Json& j, const AuditEvent& e);
void from_json(const Json& j, AuditEvent& e);

} // namespace tada::store

namespace tada::analysis {
void to_json(Json& j, const FoodEnergy& f);
void from_json(const Json& j, FoodEnergy& f);
void to_json(Json& j, const EnergyEstimate& e);
void from_json(const Json& j, EnergyEstimate& e);
} // namespace tada::analysis
