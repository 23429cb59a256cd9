#include "tada/core/lifecycle.hpp"

namespace tada {

IllegalTransition::IllegalTransition(LifecycleState from, LifecycleState to)
    : Error("illegal transition " + std::string(to_string(from)) + " -> " + std::string(to_string(to))),
      from_(from),
      to_(to) {}

std::optional<LifecycleState> next_state(LifecycleState state) noexcept {
    switch (state) {
    case LifecycleState::Uploaded: return LifecycleState::Analyzed;
    case LifecycleState::Analyzed: return LifecycleState::ParticipantReviewed;
    case LifecycleState::ParticipantReviewed: return LifecycleState::Refined;
    case LifecycleState::Refined: return LifecycleState::Finalized;
    case LifecycleState::Finalized: return std::nullopt;
    }
    return std::nullopt;
}

EatingOccasion advance_state(const EatingOccasion& occasion, LifecycleState target) {
    const auto next = next_state(occasion.state);
    if (!next || *next != target) throw IllegalTransition(occasion.state, target);
    if (occasion.state == LifecycleState::Uploaded && !occasion.after) throw IllegalTransition(occasion.state, target);

    EatingOccasion out = occasion;
    out.state = target;
    out.version = occasion.version + 1;
    return out;
}

} // namespace tada
