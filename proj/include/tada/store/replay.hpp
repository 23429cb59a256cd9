#pragma once

#include <span>

#include "tada/core/errors.hpp"
#include "tada/store/record.hpp"

namespace tada::store {

class ReplayError : public Error {
public:
    using Error::Error;
};

/// Folds an occasion's audit trail into the record it describes, checking
/// along the way that versions run 1..n without gaps, that each action
/// matches the state change it claims, and that deletions remove exactly one
/// annotation.
OccasionRecord replay(std::span<const AuditEvent> events);

} // namespace tada::store
