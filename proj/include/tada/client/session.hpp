#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tada/core/errors.hpp"
#include "tada/core/json.hpp"

namespace tada::client {

/// One captured image pair waiting for (or past) upload. Image bytes are
/// copied under the state directory at capture time.
struct Draft {
    std::string local_id;
    std::string idempotency_key;
    std::string participant_id;
    std::string study_id;
    std::filesystem::path before_path;
    std::filesystem::path after_path;
    std::string before_name;
    std::string after_name;
    Json metadata = Json::object();
    Timestamp created_at;
    std::optional<std::string> occasion_id;
    std::optional<std::string> last_error;

    bool uploaded() const noexcept { return occasion_id.has_value(); }
};

struct FoodCache {
    std::string study_id;
    std::string hash;
    Json items = Json::array();
};

/// Everything the CLI remembers between invocations.
struct SessionState {
    std::string server_url;
    std::string token;
    std::string participant_id;
    std::string study_id;
    std::vector<Draft> drafts;
    std::optional<FoodCache> foods;
    std::int64_t next_draft_seq = 1;
};

class LockError : public Error {
public:
    using Error::Error;
};

/// Holds an exclusive lock on `<dir>/state.lock` for its lifetime and
/// reads/writes `<dir>/state.json` atomically (temp file + rename).
class LocalSession {
public:
    explicit LocalSession(std::filesystem::path state_dir);
    ~LocalSession();

    LocalSession(const LocalSession&) = delete;
    LocalSession& operator=(const LocalSession&) = delete;

    SessionState& state() noexcept { return state_; }
    const SessionState& state() const noexcept { return state_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }

    void save() const;

    /// Copies both images under the state dir and appends a queued draft.
    Draft& add_draft(const std::filesystem::path& before, const std::filesystem::path& after, Json metadata);

    Draft* find_draft(const std::string& local_or_occasion_id);

private:
    std::filesystem::path dir_;
    int lock_fd_ = -1;
    SessionState state_;
};

std::string random_key();

void to_json(Json& j, const Draft& d);
void from_json(const Json& j, Draft& d);
void to_json(Json& j, const SessionState& s);
void from_json(const Json& j, SessionState& s);

} // namespace tada::client
