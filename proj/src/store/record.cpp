#include "tada/store/record.hpp"

#include <array>

#include "tada/core/errors.hpp"

namespace tada::analysis {

void to_json(Json& j, const FoodEnergy& f) { j = Json{{"label", f.label}, {"kcal", f.kcal}}; }
void from_json(const Json& j, FoodEnergy& f) {
    f.label = j.at("label").get<std::string>();
    f.kcal = j.at("kcal").get<double>();
}

void to_json(Json& j, const EnergyEstimate& e) { j = Json{{"per_food", e.per_food}, {"total_kcal", e.total_kcal}}; }
void from_json(const Json& j, EnergyEstimate& e) {
    e.per_food = j.at("per_food").get<std::vector<FoodEnergy>>();
    e.total_kcal = j.at("total_kcal").get<double>();
}

} // namespace tada::analysis

namespace tada::store {

namespace {

constexpr std::array<std::pair<AuditAction, std::string_view>, 7> kActions{{
    {AuditAction::Uploaded, "Uploaded"},
    {AuditAction::Analyzed, "Analyzed"},
    {AuditAction::ReviewSubmitted, "ReviewSubmitted"},
    {AuditAction::Refined, "Refined"},
    {AuditAction::AnnotationSaved, "AnnotationSaved"},
    {AuditAction::AnnotationDeleted, "AnnotationDeleted"},
    {AuditAction::Finalized, "Finalized"},
}};

} // namespace

std::string_view to_string(AuditAction action) noexcept {
    for (const auto& [a, name] : kActions)
        if (a == action) return name;
    return "?";
}

AuditAction parse_audit_action(std::string_view text) {
    for (const auto& [a, name] : kActions)
        if (name == text) return a;
    throw InvalidValue("action", "unknown audit action '" + std::string(text) + "'");
}

void to_json(Json& j, const HistoryEntry& h) { j = Json{{"state", h.state}, {"version", h.version}, {"at", h.at}}; }
void from_json(const Json& j, HistoryEntry& h) {
    h.state = j.at("state").get<LifecycleState>();
    h.version = j.at("version").get<std::int64_t>();
    h.at = j.at("at").get<Timestamp>();
}

void to_json(Json& j, const OccasionRecord& r) {
    j = Json{{"occasion", r.occasion},
             {"before_name", r.before_name},
             {"after_name", r.after_name},
             {"analyzer_id", r.analyzer_id},
             {"predictions", r.predictions},
             {"confirmed", r.confirmed},
             {"annotations", r.annotations},
             {"history", r.history},
             {"next_annotation_seq", r.next_annotation_seq}};
    if (r.review) j["review"] = *r.review;
    if (r.estimate) j["estimate"] = *r.estimate;
}

void from_json(const Json& j, OccasionRecord& r) {
    r.occasion = j.at("occasion").get<EatingOccasion>();
    r.before_name = j.value("before_name", "");
    r.after_name = j.value("after_name", "");
    r.analyzer_id = j.value("analyzer_id", "");
    r.predictions = j.at("predictions").get<std::vector<PredictedFood>>();
    r.confirmed = j.at("confirmed").get<std::vector<ConfirmedFood>>();
    r.annotations = j.at("annotations").get<std::vector<ResearcherAnnotation>>();
    r.history = j.at("history").get<std::vector<HistoryEntry>>();
    r.next_annotation_seq = j.at("next_annotation_seq").get<std::int64_t>();
    r.review.reset();
    if (const auto it = j.find("review"); it != j.end()) r.review = it->get<ParticipantReview>();
    r.estimate.reset();
    if (const auto it = j.find("estimate"); it != j.end()) r.estimate = it->get<analysis::EnergyEstimate>();
}

void to_json(Json& j, const Actor& a) {
    std::visit(
        [&](const auto& actor) {
            using A = std::decay_t<decltype(actor)>;
            if constexpr (std::is_same_v<A, ParticipantActor>)
                j = Json{{"kind", "Participant"}, {"participant_id", actor.participant_id}};
            else if constexpr (std::is_same_v<A, ResearcherActor>)
                j = Json{{"kind", "Researcher"}, {"initials", actor.initials}};
            else
                j = Json{{"kind", "System"}};
        },
        a);
}

void from_json(const Json& j, Actor& a) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "Participant")
        a = ParticipantActor{j.at("participant_id").get<std::string>()};
    else if (kind == "Researcher")
        a = ResearcherActor{j.at("initials").get<Initials>()};
    else if (kind == "System")
        a = SystemActor{};
    else
        throw InvalidValue("actor.kind", "unknown actor '" + kind + "'");
}

void to_json(Json& j, const AuditEvent& e) {
    j = Json{{"seq", e.seq},
             {"occasion_id", e.occasion_id},
             {"actor", e.actor},
             {"action", std::string(to_string(e.action))},
             {"payload", e.payload},
             {"at", e.at}};
}

void from_json(const Json& j, AuditEvent& e) {
    e.seq = j.at("seq").get<std::int64_t>();
    e.occasion_id = j.at("occasion_id").get<std::string>();
    e.actor = j.at("actor").get<Actor>();
    e.action = parse_audit_action(j.at("action").get<std::string>());
    e.payload = j.at("payload");
    e.at = j.at("at").get<Timestamp>();
}

} // namespace tada::store
