#include "tada/client/session.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace tada::client {

namespace fs = std::filesystem;

namespace {

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

} // namespace

std::string random_key() {
    std::random_device rd;
    std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int i = 0; i < 32; ++i) out.push_back(kHex[rng() & 0xf]);
    return out;
}

void to_json(Json& j, const Draft& d) {
    j = Json{{"local_id", d.local_id},
             {"idempotency_key", d.idempotency_key},
             {"participant_id", d.participant_id},
             {"study_id", d.study_id},
             {"before_path", d.before_path.string()},
             {"after_path", d.after_path.string()},
             {"before_name", d.before_name},
             {"after_name", d.after_name},
             {"metadata", d.metadata},
             {"created_at", d.created_at}};
    if (d.occasion_id) j["occasion_id"] = *d.occasion_id;
    if (d.last_error) j["last_error"] = *d.last_error;
}

void from_json(const Json& j, Draft& d) {
    d.local_id = j.at("local_id").get<std::string>();
    d.idempotency_key = j.at("idempotency_key").get<std::string>();
    d.participant_id = j.at("participant_id").get<std::string>();
    d.study_id = j.at("study_id").get<std::string>();
    d.before_path = j.at("before_path").get<std::string>();
    d.after_path = j.at("after_path").get<std::string>();
    d.before_name = j.value("before_name", d.before_path.filename().string());
    d.after_name = j.value("after_name", d.after_path.filename().string());
    d.metadata = j.at("metadata");
    d.created_at = j.at("created_at").get<Timestamp>();
    d.occasion_id = opt<std::string>(j, "occasion_id");
    d.last_error = opt<std::string>(j, "last_error");
}

void to_json(Json& j, const SessionState& s) {
    j = Json{{"server_url", s.server_url},
             {"token", s.token},
             {"participant_id", s.participant_id},
             {"study_id", s.study_id},
             {"drafts", s.drafts},
             {"next_draft_seq", s.next_draft_seq}};
    if (s.foods) j["foods"] = Json{{"study_id", s.foods->study_id}, {"hash", s.foods->hash}, {"items", s.foods->items}};
}

void from_json(const Json& j, SessionState& s) {
    s.server_url = j.value("server_url", "");
    s.token = j.value("token", "");
    s.participant_id = j.value("participant_id", "");
    s.study_id = j.value("study_id", "");
    s.drafts = j.value("drafts", std::vector<Draft>{});
    s.next_draft_seq = j.value("next_draft_seq", std::int64_t{1});
    if (const auto it = j.find("foods"); it != j.end() && it->is_object())
        s.foods = FoodCache{it->at("study_id").get<std::string>(), it->at("hash").get<std::string>(), it->at("items")};
}

LocalSession::LocalSession(fs::path state_dir) : dir_(std::move(state_dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error("cannot create state dir " + dir_.string() + ": " + ec.message());

    const auto lock_path = dir_ / "state.lock";
    lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (lock_fd_ < 0) throw LockError("cannot open " + lock_path.string() + ": " + std::strerror(errno));
    if (::flock(lock_fd_, LOCK_EX) != 0) {
        ::close(lock_fd_);
        throw LockError("cannot lock " + lock_path.string() + ": " + std::strerror(errno));
    }

    const auto path = dir_ / "state.json";
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            state_ = Json::parse(in).get<SessionState>();
        } catch (const Json::exception& e) {
            ::close(lock_fd_);
            throw Error("corrupt state file " + path.string() + ": " + e.what());
        }
    }
}

LocalSession::~LocalSession() {
    if (lock_fd_ >= 0) ::close(lock_fd_); // releases the flock
}

void LocalSession::save() const {
    const auto path = dir_ / "state.json";
    const auto tmp = dir_ / "state.json.tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << Json(state_).dump(2) << '\n';
        out.flush();
        if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

Draft& LocalSession::add_draft(const fs::path& before, const fs::path& after, Json metadata) {
    Draft draft;
    draft.local_id = "d" + std::to_string(state_.next_draft_seq);
    draft.idempotency_key = random_key();
    draft.participant_id = state_.participant_id;
    draft.study_id = state_.study_id;
    draft.metadata = std::move(metadata);
    draft.created_at = Timestamp::now();
    draft.before_name = before.filename().string();
    draft.after_name = after.filename().string();

    const auto images = dir_ / "drafts" / draft.local_id;
    fs::create_directories(images);
    draft.before_path = images / ("before-" + draft.before_name);
    draft.after_path = images / ("after-" + draft.after_name);
    fs::copy_file(before, draft.before_path, fs::copy_options::overwrite_existing);
    fs::copy_file(after, draft.after_path, fs::copy_options::overwrite_existing);

    ++state_.next_draft_seq;
    state_.drafts.push_back(std::move(draft));
    return state_.drafts.back();
}

Draft* LocalSession::find_draft(const std::string& id) {
    for (auto& d : state_.drafts)
        if (d.local_id == id || (d.occasion_id && *d.occasion_id == id)) return &d;
    return nullptr;
}

} // namespace tada::client
