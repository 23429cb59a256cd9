#include "tada/store/replay.hpp"

#include <algorithm>
#include <optional>

#include "tada/core/lifecycle.hpp"

namespace tada::store {

namespace {

std::optional<LifecycleState> entered_state(AuditAction action) {
    switch (action) {
    case AuditAction::Uploaded: return LifecycleState::Uploaded;
    case AuditAction::Analyzed: return LifecycleState::Analyzed;
    case AuditAction::ReviewSubmitted: return LifecycleState::ParticipantReviewed;
    case AuditAction::Refined: return LifecycleState::Refined;
    case AuditAction::Finalized: return LifecycleState::Finalized;
    case AuditAction::AnnotationSaved:
    case AuditAction::AnnotationDeleted: return std::nullopt;
    }
    return std::nullopt;
}

[[noreturn]] void fail(const AuditEvent& e, const std::string& why) {
    throw ReplayError("event seq " + std::to_string(e.seq) + " (" + std::string(to_string(e.action)) + "): " + why);
}

bool is_subsequence_minus_one(const std::vector<ResearcherAnnotation>& before,
                              const std::vector<ResearcherAnnotation>& after) {
    if (after.size() + 1 != before.size()) return false;
    std::size_t j = 0;
    bool skipped = false;
    for (const auto& a : before) {
        if (j < after.size() && a == after[j]) {
            ++j;
        } else if (!skipped) {
            skipped = true;
        } else {
            return false;
        }
    }
    return j == after.size();
}

} // namespace

OccasionRecord replay(std::span<const AuditEvent> events) {
    std::optional<OccasionRecord> current;
    std::int64_t last_seq = 0;

    for (const auto& e : events) {
        if (e.seq <= last_seq) fail(e, "sequence numbers not increasing");
        last_seq = e.seq;

        OccasionRecord next;
        try {
            next = e.payload.get<OccasionRecord>();
        } catch (const std::exception& ex) {
            fail(e, std::string("unreadable snapshot: ") + ex.what());
        }
        if (next.occasion.occasion_id != e.occasion_id) fail(e, "snapshot belongs to another occasion");

        if (!current) {
            if (e.action != AuditAction::Uploaded) fail(e, "trail must start with Uploaded");
            if (next.version() != 1 || next.state() != LifecycleState::Uploaded) fail(e, "first snapshot must be v1 Uploaded");
            current = std::move(next);
            continue;
        }

        if (next.version() != current->version() + 1) fail(e, "version gap");
        if (const auto target = entered_state(e.action)) {
            if (e.action == AuditAction::Uploaded) fail(e, "duplicate Uploaded");
            if (next_state(current->state()) != *target || next.state() != *target) fail(e, "state change does not match action");
        } else {
            if (current->state() != LifecycleState::Refined || next.state() != LifecycleState::Refined)
                fail(e, "annotation edits are only legal while Refined");
            if (e.action == AuditAction::AnnotationDeleted && !is_subsequence_minus_one(current->annotations, next.annotations))
                fail(e, "deletion must remove exactly one annotation");
        }
        if (next.occasion.participant_id != current->occasion.participant_id ||
            next.occasion.study_id != current->occasion.study_id || next.occasion.before != current->occasion.before ||
            next.occasion.after != current->occasion.after)
            fail(e, "immutable occasion fields changed");
        current = std::move(next);
    }

    if (!current) throw ReplayError("empty audit trail");
    return *std::move(current);
}

} // namespace tada::store
