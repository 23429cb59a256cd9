#pragma once

#include <optional>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada {

/// Raised when a requested state change is not the immediate successor.
class IllegalTransition : public Error {
public:
    IllegalTransition(LifecycleState from, LifecycleState to);

    LifecycleState from() const noexcept { return from_; }
    LifecycleState to() const noexcept { return to_; }

private:
    LifecycleState from_;
    LifecycleState to_;
};

/// Successor in Uploaded -> Analyzed -> ParticipantReviewed -> Refined -> Finalized.
std::optional<LifecycleState> next_state(LifecycleState state) noexcept;

/// Returns a copy advanced to `target` with version + 1. A missing after
/// image blocks every move out of Uploaded.
EatingOccasion advance_state(const EatingOccasion& occasion, LifecycleState target);

} // namespace tada
