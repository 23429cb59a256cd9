#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>

#include "tada/analysis/analyzer.hpp"
#include "tada/food/database.hpp"
#include "tada/server/api.hpp"
#include "tada/server/config.hpp"
#include "tada/store/store.hpp"

namespace tada::server {

struct ImageUpload {
    std::string filename;
    std::string bytes;
};

struct UploadRequest {
    ParticipantId participant_id;
    StudyId study_id;
    std::optional<ImageUpload> before;
    std::optional<ImageUpload> after;
    std::string metadata_json;
    std::optional<std::string> idempotency_key;
};

struct UploadResult {
    OccasionId occasion_id;
    std::int64_t version = 0;
    LifecycleState state = LifecycleState::Uploaded;
    /// False when the idempotency key matched an earlier upload.
    bool created = true;
    /// "completed", "failed", "scheduled" or "deferred".
    std::string analysis;
};

struct ExportFile {
    std::string content_type;
    std::string body;
};

struct Study {
    std::string study_id;
    food::FoodDatabase foods;
    std::string foods_hash;
};

/// Upload-to-finalize orchestration on top of the store. Every method either
/// succeeds or throws ApiError with a code from the closed set; stored
/// mutations go through the store's compare-and-set so concurrent callers
/// are linearized per occasion.
class Service {
public:
    using Clock = std::function<Timestamp()>;
    using IdSource = std::function<std::string()>;

    Service(ServerConfig config, std::map<std::string, food::FoodDatabase> studies, Clock clock = Timestamp::now,
            IdSource ids = {});
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Loads each configured food list; throws on unreadable lists.
    static std::unique_ptr<Service> from_config(const ServerConfig& config);

    const ServerConfig& config() const noexcept { return config_; }
    store::Store& store() noexcept { return store_; }

    UploadResult upload(const UploadRequest& request);
    Json preliminary_results(const OccasionId& id) const;
    Json participant_review(const OccasionId& id, const Json& body);
    Json occasion_detail(const OccasionId& id) const;
    Json put_annotations(const OccasionId& id, const Json& body);
    Json delete_annotation(const OccasionId& id, const AnnotationId& annotation_id, std::int64_t expected_version,
                           const std::string& initials);
    Json finalize(const OccasionId& id, const Json& body);
    /// Runs the pending system step (analysis when Uploaded, refinement when
    /// ParticipantReviewed).
    Json process(const OccasionId& id);

    Json search_foods(const std::string& query, std::optional<std::size_t> limit,
                      const std::optional<std::string>& study_id) const;
    Json food_list(const std::optional<std::string>& study_id) const;
    Json list_participant_occasions(const ParticipantId& participant_id,
                                    const std::optional<std::string>& study_id) const;
    Json audit_trail(const OccasionId& id) const;
    ExportFile export_study(const StudyId& study_id, const std::string& format) const;
    std::optional<std::string> blob(const std::string& content_hash) const;

    /// Blocks until the async analysis queue is empty.
    void drain();

private:
    store::OccasionRecord load(const OccasionId& id) const;
    const Study& study(const std::optional<std::string>& study_id) const;
    void analyze_now(const OccasionId& id);
    Json refine_now(store::OccasionRecord record);
    void worker_loop(std::stop_token stop);
    Json image_json(const ImageCapture& image) const;

    ServerConfig config_;
    std::map<std::string, Study> studies_;
    Clock clock_;
    IdSource ids_;
    store::Store store_;
    std::unique_ptr<analysis::Analyzer> analyzer_;

    mutable std::mutex failures_mutex_;
    std::unordered_map<OccasionId, ApiError> analysis_failures_;

    std::mutex queue_mutex_;
    std::condition_variable_any queue_cv_;
    std::condition_variable idle_cv_;
    std::deque<OccasionId> queue_;
    bool worker_busy_ = false;
    std::jthread worker_;
};

} // namespace tada::server
