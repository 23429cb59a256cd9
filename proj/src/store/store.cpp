#include "tada/store/store.hpp"

#include <sqlite3.h>

namespace tada::store {

namespace {

class Statement {
public:
    Statement(sqlite3* db, const char* sql) : db_(db) {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw StoreUnavailable(std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
    ~Statement() { sqlite3_finalize(stmt_); }

    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int index, const std::string& value) {
        check(sqlite3_bind_text(stmt_, index, value.data(), static_cast<int>(value.size()), SQLITE_TRANSIENT));
        return *this;
    }
    Statement& bind(int index, std::int64_t value) {
        check(sqlite3_bind_int64(stmt_, index, value));
        return *this;
    }

    /// True while a row is available.
    bool step() {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW) return true;
        if (rc == SQLITE_DONE) return false;
        throw StoreUnavailable(std::string("step failed: ") + sqlite3_errmsg(db_));
    }

    /// Runs to completion; returns the sqlite result code instead of throwing
    /// so callers can react to constraint violations.
    int exec_rc() {
        const int rc = sqlite3_step(stmt_);
        return rc == SQLITE_DONE ? SQLITE_OK : rc;
    }

    std::string text(int col) const {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }
    std::int64_t int64(int col) const { return sqlite3_column_int64(stmt_, col); }

private:
    void check(int rc) const {
        if (rc != SQLITE_OK) throw StoreUnavailable(std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string message = err ? err : "unknown error";
        sqlite3_free(err);
        throw StoreUnavailable(std::string("sqlite: ") + message);
    }
}

constexpr const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS occasions (
    occasion_id    TEXT PRIMARY KEY,
    participant_id TEXT NOT NULL,
    study_id       TEXT NOT NULL,
    captured_at_ms INTEGER NOT NULL,
    state          TEXT NOT NULL,
    version        INTEGER NOT NULL,
    record         TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS occasions_by_participant ON occasions(participant_id, study_id);
CREATE INDEX IF NOT EXISTS occasions_by_study ON occasions(study_id);
CREATE TABLE IF NOT EXISTS audit (
    seq         INTEGER PRIMARY KEY AUTOINCREMENT,
    occasion_id TEXT NOT NULL,
    actor       TEXT NOT NULL,
    action      TEXT NOT NULL,
    payload     TEXT NOT NULL,
    at          TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS audit_by_occasion ON audit(occasion_id, seq);
CREATE TABLE IF NOT EXISTS idempotency (
    key         TEXT PRIMARY KEY,
    occasion_id TEXT NOT NULL
);
)sql";

BlobRef blob_ref(const ImageCapture& image, const BlobStore& blobs) {
    std::uint64_t length = 0;
    std::error_code ec;
    const auto size = std::filesystem::file_size(blobs.path_for(image.content_hash), ec);
    if (!ec) length = size;
    return {image.content_hash, length, image.media_type};
}

} // namespace

struct Store::Impl {
    sqlite3* db = nullptr;
    mutable std::mutex mutex;

    ~Impl() { sqlite3_close_v2(db); }

    // Rolls back on scope exit unless committed.
    class Transaction {
    public:
        explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
        ~Transaction() {
            if (!done_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
        }
        void commit() {
            exec(db_, "COMMIT");
            done_ = true;
        }

    private:
        sqlite3* db_;
        bool done_ = false;
    };

    std::optional<std::int64_t> stored_version(const OccasionId& id) const {
        Statement st(db, "SELECT version FROM occasions WHERE occasion_id = ?");
        st.bind(1, id);
        if (!st.step()) return std::nullopt;
        return st.int64(0);
    }

    std::int64_t insert_audit(const OccasionId& id, const Actor& actor, AuditAction action, const std::string& payload,
                              const Timestamp& at) {
        Statement st(db, "INSERT INTO audit(occasion_id, actor, action, payload, at) VALUES (?, ?, ?, ?, ?)");
        st.bind(1, id)
            .bind(2, canonical(Json(actor)))
            .bind(3, std::string(to_string(action)))
            .bind(4, payload)
            .bind(5, at.to_string());
        if (st.exec_rc() != SQLITE_OK) throw StoreUnavailable(std::string("audit insert failed: ") + sqlite3_errmsg(db));
        return sqlite3_last_insert_rowid(db);
    }
};

Store::Store(const StoreOptions& options) : impl_(std::make_unique<Impl>()), blobs_(options.blob_dir) {
    std::error_code ec;
    std::filesystem::create_directories(options.data_dir, ec);
    if (ec) throw StoreUnavailable("cannot create data directory " + options.data_dir.string() + ": " + ec.message());
    const auto path = (options.data_dir / "tada.sqlite3").string();
    if (sqlite3_open_v2(path.c_str(), &impl_->db, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK)
        throw StoreUnavailable("cannot open " + path);
    sqlite3_busy_timeout(impl_->db, 5000);
    exec(impl_->db, "PRAGMA journal_mode=WAL");
    exec(impl_->db, "PRAGMA synchronous=NORMAL");
    exec(impl_->db, kSchema);
}

Store::~Store() = default;

std::int64_t Store::save_occasion(const OccasionRecord& record, std::int64_t expected_version, const AuditDraft& audit,
                                  const std::optional<std::string>& idempotency_key) {
    const auto& id = record.occasion.occasion_id;
    if (record.version() != expected_version + 1)
        throw InvalidValue("version", "record version must be expected_version + 1");

    const std::lock_guard lock(impl_->mutex);
    Impl::Transaction tx(impl_->db);

    if (expected_version == 0) {
        if (idempotency_key) {
            Statement st(impl_->db, "SELECT occasion_id FROM idempotency WHERE key = ?");
            st.bind(1, *idempotency_key);
            if (st.step()) throw DuplicateIdempotencyKey(st.text(0));
        }
        if (const auto stored = impl_->stored_version(id)) throw VersionConflict(*stored);
    } else {
        const auto stored = impl_->stored_version(id);
        if (!stored) throw NotFound("occasion " + id + " not found");
        if (*stored != expected_version) throw VersionConflict(*stored);
    }

    const auto payload = canonical(Json(record));
    {
        Statement st(impl_->db, expected_version == 0
                                    ? "INSERT INTO occasions(participant_id, study_id, captured_at_ms, state, version, "
                                      "record, occasion_id) VALUES (?, ?, ?, ?, ?, ?, ?)"
                                    : "UPDATE occasions SET participant_id = ?, study_id = ?, captured_at_ms = ?, "
                                      "state = ?, version = ?, record = ? WHERE occasion_id = ?");
        st.bind(1, record.occasion.participant_id)
            .bind(2, record.occasion.study_id)
            .bind(3, record.occasion.metadata.captured_at.unix_ms())
            .bind(4, std::string(to_string(record.state())))
            .bind(5, record.version())
            .bind(6, payload)
            .bind(7, id);
        if (st.exec_rc() != SQLITE_OK)
            throw StoreUnavailable(std::string("occasion write failed: ") + sqlite3_errmsg(impl_->db));
    }
    if (expected_version == 0 && idempotency_key) {
        Statement st(impl_->db, "INSERT INTO idempotency(key, occasion_id) VALUES (?, ?)");
        st.bind(1, *idempotency_key).bind(2, id);
        if (st.exec_rc() != SQLITE_OK)
            throw StoreUnavailable(std::string("idempotency write failed: ") + sqlite3_errmsg(impl_->db));
    }
    impl_->insert_audit(id, audit.actor, audit.action, payload, audit.at);
    tx.commit();
    return record.version();
}

std::optional<OccasionRecord> Store::load_occasion(const OccasionId& id) const {
    const std::lock_guard lock(impl_->mutex);
    Statement st(impl_->db, "SELECT record FROM occasions WHERE occasion_id = ?");
    st.bind(1, id);
    if (!st.step()) return std::nullopt;
    return Json::parse(st.text(0)).get<OccasionRecord>();
}

std::int64_t Store::append_audit(const AuditEvent& event) {
    const std::lock_guard lock(impl_->mutex);
    Impl::Transaction tx(impl_->db);
    const auto seq = impl_->insert_audit(event.occasion_id, event.actor, event.action, canonical(event.payload), event.at);
    tx.commit();
    return seq;
}

std::vector<AuditEvent> Store::audit_trail(const OccasionId& id) const {
    const std::lock_guard lock(impl_->mutex);
    Statement st(impl_->db,
                 "SELECT seq, occasion_id, actor, action, payload, at FROM audit WHERE occasion_id = ? ORDER BY seq");
    st.bind(1, id);
    std::vector<AuditEvent> out;
    while (st.step()) {
        AuditEvent e;
        e.seq = st.int64(0);
        e.occasion_id = st.text(1);
        e.actor = Json::parse(st.text(2)).get<Actor>();
        e.action = parse_audit_action(st.text(3));
        e.payload = Json::parse(st.text(4));
        e.at = Timestamp::parse(st.text(5));
        out.push_back(std::move(e));
    }
    return out;
}

std::optional<OccasionId> Store::find_idempotency_key(const std::string& key) const {
    const std::lock_guard lock(impl_->mutex);
    Statement st(impl_->db, "SELECT occasion_id FROM idempotency WHERE key = ?");
    st.bind(1, key);
    if (!st.step()) return std::nullopt;
    return st.text(0);
}

std::vector<OccasionSummary> Store::list_occasions(const ParticipantId& participant_id,
                                                   const std::optional<StudyId>& study_id) const {
    std::vector<std::string> rows;
    {
        const std::lock_guard lock(impl_->mutex);
        Statement st(impl_->db, study_id ? "SELECT record FROM occasions WHERE participant_id = ? AND study_id = ? "
                                           "ORDER BY captured_at_ms DESC, occasion_id ASC"
                                         : "SELECT record FROM occasions WHERE participant_id = ? "
                                           "ORDER BY captured_at_ms DESC, occasion_id ASC");
        st.bind(1, participant_id);
        if (study_id) st.bind(2, *study_id);
        while (st.step()) rows.push_back(st.text(0));
    }

    std::vector<OccasionSummary> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const auto record = Json::parse(row).get<OccasionRecord>();
        const auto& o = record.occasion;
        OccasionSummary s{o.occasion_id, o.participant_id, o.study_id, o.state, o.version, o.metadata.captured_at,
                          blob_ref(o.before, blobs_), std::nullopt};
        if (o.after) s.after = blob_ref(*o.after, blobs_);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<OccasionRecord> Store::study_records(const StudyId& study_id) const {
    std::vector<std::string> rows;
    {
        const std::lock_guard lock(impl_->mutex);
        Statement st(impl_->db, "SELECT record FROM occasions WHERE study_id = ? ORDER BY occasion_id");
        st.bind(1, study_id);
        while (st.step()) rows.push_back(st.text(0));
    }
    std::vector<OccasionRecord> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(Json::parse(row).get<OccasionRecord>());
    return out;
}

std::int64_t Store::count_occasions() const {
    const std::lock_guard lock(impl_->mutex);
    Statement st(impl_->db, "SELECT COUNT(*) FROM occasions");
    st.step();
    return st.int64(0);
}

} // namespace tada::store
