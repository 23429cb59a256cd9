#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tada/store/blob_store.hpp"
#include "tada/store/record.hpp"

namespace tada::store {

class VersionConflict : public Error {
public:
    explicit VersionConflict(std::int64_t stored)
        : Error("version conflict: stored version is " + std::to_string(stored)), stored_(stored) {}

    std::int64_t stored_version() const noexcept { return stored_; }

private:
    std::int64_t stored_;
};

class NotFound : public Error {
public:
    using Error::Error;
};

/// The idempotency key was already used; carries the occasion it created.
class DuplicateIdempotencyKey : public Error {
public:
    explicit DuplicateIdempotencyKey(OccasionId existing)
        : Error("idempotency key already used by occasion " + existing), existing_(std::move(existing)) {}

    const OccasionId& occasion_id() const noexcept { return existing_; }

private:
    OccasionId existing_;
};

struct OccasionSummary {
    OccasionId occasion_id;
    ParticipantId participant_id;
    StudyId study_id;
    LifecycleState state = LifecycleState::Uploaded;
    std::int64_t version = 0;
    Timestamp captured_at;
    BlobRef before;
    std::optional<BlobRef> after;
};

/// Audit event fields supplied by the caller; seq and payload are filled in
/// by the store.
struct AuditDraft {
    Actor actor = SystemActor{};
    AuditAction action = AuditAction::Uploaded;
    Timestamp at;
};

struct StoreOptions {
    std::filesystem::path data_dir;
    std::filesystem::path blob_dir;
};

/// SQLite record store + audit trail + blob directory. One handle may be
/// shared across threads; writes are serialized and every record write
/// commits together with its audit event.
class Store {
public:
    explicit Store(const StoreOptions& options);
    ~Store();

    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    BlobStore& blobs() noexcept { return blobs_; }
    const BlobStore& blobs() const noexcept { return blobs_; }

    /// Compare-and-set write. `record.occasion.version` must equal
    /// expected_version + 1; 0 creates. Returns the new version.
    /// Throws VersionConflict, NotFound, DuplicateIdempotencyKey.
    std::int64_t save_occasion(const OccasionRecord& record, std::int64_t expected_version, const AuditDraft& audit,
                               const std::optional<std::string>& idempotency_key = std::nullopt);

    std::optional<OccasionRecord> load_occasion(const OccasionId& id) const;

    /// Appends a standalone event; returns its seq.
    std::int64_t append_audit(const AuditEvent& event);

    /// Events for one occasion in seq order.
    std::vector<AuditEvent> audit_trail(const OccasionId& id) const;

    std::optional<OccasionId> find_idempotency_key(const std::string& key) const;

    /// captured_at descending, occasion_id ascending.
    std::vector<OccasionSummary> list_occasions(const ParticipantId& participant_id,
                                                const std::optional<StudyId>& study_id = std::nullopt) const;

    /// All records of a study ordered by occasion_id.
    std::vector<OccasionRecord> study_records(const StudyId& study_id) const;

    std::int64_t count_occasions() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    BlobStore blobs_;
};

} // namespace tada::store
