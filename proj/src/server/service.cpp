#include "tada/server/service.hpp"

#include <cmath>
#include <random>
#include <set>

#include "tada/analysis/refine.hpp"
#include "tada/core/image.hpp"
#include "tada/core/lifecycle.hpp"
#include "tada/core/review.hpp"
#include "tada/core/validation.hpp"
#include "tada/server/export.hpp"
#include "tada/util/sha256.hpp"

namespace tada::server {

namespace {

std::string random_id() {
    thread_local std::mt19937_64 rng{std::random_device{}()};
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (int word = 0; word < 2; ++word) {
        auto v = rng();
        for (int i = 0; i < 16; ++i) {
            out.push_back(kHex[v & 0xf]);
            v >>= 4;
        }
    }
    return out;
}

Json violations_json(const Violations& violations) {
    Json out = Json::array();
    for (const auto& v : violations) out.push_back(Json{{"field", v.field}, {"reason", v.reason}});
    return out;
}

[[noreturn]] void fail_validation(const Violations& violations) {
    std::string message = "validation failed";
    if (!violations.empty()) message = violations.front().field + ": " + violations.front().reason;
    throw ApiError(ErrorCode::ValidationFailed, message, Json{{"violations", violations_json(violations)}});
}

ApiError illegal(LifecycleState current, const std::string& what) {
    return ApiError(ErrorCode::IllegalTransition, what + " not allowed in state " + std::string(to_string(current)),
                    Json{{"state", current}});
}

ApiError conflict(std::int64_t current) {
    return ApiError(ErrorCode::VersionConflict, "stale expected_version; current version is " + std::to_string(current),
                    Json{{"current_version", current}});
}

std::int64_t expected_version_of(const Json& body) {
    const auto it = body.find("expected_version");
    if (it == body.end() || !it->is_number_integer()) throw ApiError::validation("expected_version", "required integer");
    return it->get<std::int64_t>();
}

Initials initials_of(const Json& body) {
    const auto it = body.find("initials");
    if (it == body.end() || !it->is_string()) throw ApiError::validation("initials", "required");
    const auto text = it->get<std::string>();
    if (!Initials::is_valid(text)) throw ApiError::validation("initials", "expected 1-4 uppercase letters");
    return Initials(text);
}

bool same_content(const ResearcherAnnotation& a, const ResearcherAnnotation& b) {
    return a.box == b.box && a.label == b.label && a.food_code == b.food_code && a.free_text == b.free_text &&
           a.energy_kcal == b.energy_kcal && a.energy_source == b.energy_source;
}

Json food_json(const food::FoodItem& item) {
    Json j{{"code", item.code.str()}, {"name", item.name}, {"display", item.name + " (" + item.code.str() + ")"}};
    if (item.energy_kcal_per_100g) j["energy_kcal_per_100g"] = *item.energy_kcal_per_100g;
    return j;
}

std::string blob_url(const std::string& hash) { return "/api/v1/blobs/" + hash; }

} // namespace

Service::Service(ServerConfig config, std::map<std::string, food::FoodDatabase> studies, Clock clock, IdSource ids)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      ids_(ids ? std::move(ids) : IdSource(random_id)),
      store_(store::StoreOptions{config_.data_dir, config_.blob_dir}) {
    for (auto& [id, db] : studies) {
        Json items = Json::array();
        for (const auto& item : db.items()) items.push_back(food_json(item));
        const auto hash = util::sha256_hex(items.dump());
        studies_.emplace(id, Study{id, std::move(db), hash});
    }
    try {
        analyzer_ = analysis::make_analyzer(config_.analyzer, config_.sidecar_dir);
    } catch (const analysis::AnalyzerUnavailable&) {
        // Uploads still succeed; every analysis attempt reports ANALYSIS_FAILED.
    }
    if (config_.analysis_mode == AnalysisMode::Async)
        worker_ = std::jthread([this](std::stop_token stop) { worker_loop(stop); });
}

Service::~Service() {
    if (worker_.joinable()) {
        worker_.request_stop();
        queue_cv_.notify_all();
    }
}

std::unique_ptr<Service> Service::from_config(const ServerConfig& config) {
    std::map<std::string, food::FoodDatabase> studies;
    for (const auto& [id, path] : config.studies) studies.emplace(id, food::load_food_list(path));
    return std::make_unique<Service>(config, std::move(studies));
}

store::OccasionRecord Service::load(const OccasionId& id) const {
    auto record = store_.load_occasion(id);
    if (!record) throw ApiError(ErrorCode::NotFound, "occasion " + id + " not found");
    return *std::move(record);
}

const Study& Service::study(const std::optional<std::string>& study_id) const {
    if (!study_id || study_id->empty()) {
        if (studies_.size() == 1) return studies_.begin()->second;
        throw ApiError::validation("study_id", "required when more than one study is configured");
    }
    const auto it = studies_.find(*study_id);
    if (it == studies_.end()) throw ApiError(ErrorCode::NotFound, "study " + *study_id + " not found");
    return it->second;
}

Json Service::image_json(const ImageCapture& image) const {
    Json j = image;
    j["url"] = blob_url(image.content_hash);
    j["thumbnail_url"] = blob_url(image.content_hash);
    return j;
}

// Participant upload.
UploadResult Service::upload(const UploadRequest& request) {
    if (request.idempotency_key) {
        if (const auto existing = store_.find_idempotency_key(*request.idempotency_key)) {
            const auto record = load(*existing);
            return {*existing, record.version(), record.state(), false, "completed"};
        }
    }

    for (const auto* image : {&request.before, &request.after})
        if (*image && (*image)->bytes.size() > config_.max_image_bytes)
            throw ApiError(ErrorCode::PayloadTooLarge,
                           std::string(image == &request.before ? "before" : "after") + " image exceeds " +
                               std::to_string(config_.max_image_bytes) + " bytes",
                           Json{{"limit_bytes", config_.max_image_bytes}});

    Violations violations;
    if (request.participant_id.empty()) violations.push_back({"participant_id", "required"});
    if (request.study_id.empty())
        violations.push_back({"study_id", "required"});
    else if (!studies_.contains(request.study_id))
        violations.push_back({"study_id", "unknown study"});

    auto probe = [&](const std::optional<ImageUpload>& upload, const char* field, ImageKind kind) {
        std::optional<ImageCapture> capture;
        if (!upload) {
            violations.push_back({field, "image required"});
            return capture;
        }
        try {
            const auto info = probe_image(std::as_bytes(std::span(upload->bytes.data(), upload->bytes.size())));
            capture = ImageCapture{kind, util::sha256_hex(upload->bytes), info.width_px, info.height_px, info.media_type};
        } catch (const DecodeError& e) {
            violations.push_back({field, e.what()});
        }
        return capture;
    };
    const auto before = probe(request.before, "before", ImageKind::Before);
    const auto after = probe(request.after, "after", ImageKind::After);

    CaptureMetadata metadata;
    try {
        metadata = Json::parse(request.metadata_json).get<CaptureMetadata>();
        const auto range = validate_metadata(metadata);
        violations.insert(violations.end(), range.begin(), range.end());
    } catch (const Json::parse_error&) {
        violations.push_back({"metadata", "not valid JSON"});
    } catch (const InvalidValue& e) {
        violations.push_back({e.field(), e.what()});
    }
    if (!violations.empty()) fail_validation(violations);

    try {
        store_.blobs().put(request.before->bytes, before->media_type);
        store_.blobs().put(request.after->bytes, after->media_type);
    } catch (const store::StoreUnavailable& e) {
        throw ApiError(ErrorCode::Internal, e.what());
    }

    const auto now = clock_();
    store::OccasionRecord record;
    record.occasion = EatingOccasion{ids_(), request.participant_id, request.study_id, *before, after, metadata,
                                     LifecycleState::Uploaded, 1};
    record.before_name = request.before->filename;
    record.after_name = request.after->filename;
    record.history.push_back({LifecycleState::Uploaded, 1, now});

    try {
        store_.save_occasion(record, 0,
                             {store::ParticipantActor{request.participant_id}, store::AuditAction::Uploaded, now},
                             request.idempotency_key);
    } catch (const store::DuplicateIdempotencyKey& dup) {
        const auto existing = load(dup.occasion_id());
        return {dup.occasion_id(), existing.version(), existing.state(), false, "completed"};
    }

    UploadResult result{record.occasion.occasion_id, 1, LifecycleState::Uploaded, true, "deferred"};
    switch (config_.analysis_mode) {
    case AnalysisMode::Sync:
        try {
            analyze_now(result.occasion_id);
            result.analysis = "completed";
        } catch (const ApiError&) {
            result.analysis = "failed";
        }
        break;
    case AnalysisMode::Async: {
        const std::lock_guard lock(queue_mutex_);
        queue_.push_back(result.occasion_id);
        queue_cv_.notify_one();
        result.analysis = "scheduled";
        break;
    }
    case AnalysisMode::Manual: break;
    }
    return result;
}

// Automatic analysis.
void Service::analyze_now(const OccasionId& id) {
    auto record = load(id);
    if (record.state() != LifecycleState::Uploaded) throw illegal(record.state(), "analysis");

    auto remember = [&](ApiError error) {
        const std::lock_guard lock(failures_mutex_);
        analysis_failures_.insert_or_assign(id, error);
        return error;
    };

    if (!analyzer_) throw remember(ApiError(ErrorCode::AnalysisFailed, "configured analyzer is not available"));
    const auto bytes = store_.blobs().get(record.occasion.before.content_hash);
    if (!bytes) throw remember(ApiError(ErrorCode::AnalysisFailed, "before image blob missing"));

    std::vector<PredictedFood> predictions;
    try {
        analysis::AnalysisInput input{record.occasion.before, std::as_bytes(std::span(bytes->data(), bytes->size())),
                                      record.before_name, std::nullopt};
        predictions = analysis::analyze(input, record.occasion.metadata, *analyzer_);
    } catch (const analysis::SidecarMissing& e) {
        throw remember(ApiError(ErrorCode::SidecarMissing, e.what()));
    } catch (const Error& e) {
        throw remember(ApiError(ErrorCode::AnalysisFailed, e.what()));
    }

    const auto now = clock_();
    store::OccasionRecord next = record;
    next.occasion = advance_state(record.occasion, LifecycleState::Analyzed);
    next.predictions = std::move(predictions);
    next.analyzer_id = analyzer_->ref().analyzer_id;
    next.history.push_back({LifecycleState::Analyzed, next.version(), now});
    try {
        store_.save_occasion(next, record.version(), {store::SystemActor{}, store::AuditAction::Analyzed, now});
    } catch (const store::VersionConflict& e) {
        throw conflict(e.stored_version());
    }
    const std::lock_guard lock(failures_mutex_);
    analysis_failures_.erase(id);
}

void Service::worker_loop(std::stop_token stop) {
    while (true) {
        OccasionId id;
        {
            std::unique_lock lock(queue_mutex_);
            if (!queue_cv_.wait(lock, stop, [&] { return !queue_.empty(); })) return;
            id = queue_.front();
            queue_.pop_front();
            worker_busy_ = true;
        }
        try {
            analyze_now(id);
        } catch (const std::exception&) {
            // Failure is recorded for preliminary_results; retry via process().
        }
        {
            const std::lock_guard lock(queue_mutex_);
            worker_busy_ = false;
        }
        idle_cv_.notify_all();
    }
}

void Service::drain() {
    std::unique_lock lock(queue_mutex_);
    idle_cv_.wait(lock, [&] { return queue_.empty() && !worker_busy_; });
}

// Preliminary results for the participant.
Json Service::preliminary_results(const OccasionId& id) const {
    const auto record = load(id);
    Json out{{"occasion_id", id}, {"state", record.state()}, {"version", record.version()}};
    if (record.state() == LifecycleState::Uploaded) {
        out["predictions"] = Json::array();
        const std::lock_guard lock(failures_mutex_);
        if (const auto it = analysis_failures_.find(id); it != analysis_failures_.end()) {
            out["status"] = "failed";
            out["error"] = it->second.to_json()["error"];
        } else {
            out["status"] = "pending";
        }
    } else {
        out["status"] = "ready";
        out["predictions"] = record.predictions;
    }
    out["before"] = image_json(record.occasion.before);
    return out;
}

// Participant review, then system refinement.
Json Service::participant_review(const OccasionId& id, const Json& raw_body) {
    if (!raw_body.is_object()) throw ApiError::validation("review", "expected JSON object");
    Json body = raw_body;
    if (!body.contains("submitted_at")) body["submitted_at"] = clock_();

    ParticipantReview review;
    try {
        review = body.get<ParticipantReview>();
    } catch (const InvalidValue& e) {
        throw ApiError::validation(e.field(), e.what());
    } catch (const Json::exception& e) {
        throw ApiError::validation("review", e.what());
    }

    const auto record = load(id);
    if (record.state() != LifecycleState::Analyzed) throw illegal(record.state(), "participant review");

    Violations violations;
    std::set<PredictionId> reviewed;
    for (std::size_t i = 0; i < review.verdicts.size(); ++i) {
        const auto& v = review.verdicts[i];
        const auto field = "verdicts[" + std::to_string(i) + "].prediction_id";
        const bool known = std::any_of(record.predictions.begin(), record.predictions.end(),
                                       [&](const PredictedFood& p) { return p.prediction_id == v.prediction_id; });
        if (!known)
            violations.push_back({field, "unknown prediction id '" + v.prediction_id + "'"});
        else if (!reviewed.insert(v.prediction_id).second)
            violations.push_back({field, "more than one verdict for '" + v.prediction_id + "'"});
    }
    for (const auto& p : record.predictions)
        if (!reviewed.contains(p.prediction_id) && violations.empty())
            violations.push_back({"verdicts", "no verdict for prediction '" + p.prediction_id + "'"});
    for (std::size_t i = 0; i < review.additions.size(); ++i) {
        const auto& a = review.additions[i];
        const auto prefix = "additions[" + std::to_string(i) + "]";
        if (food::trim(a.label).empty()) violations.push_back({prefix + ".label", "must be non-empty"});
        const auto pin = validate_pin(a.pin, record.occasion.before, prefix + ".pin");
        violations.insert(violations.end(), pin.begin(), pin.end());
    }
    if (!violations.empty()) fail_validation(violations);

    const auto confirmed = merge_review(record.predictions, review);

    const auto now = clock_();
    store::OccasionRecord reviewed_record = record;
    reviewed_record.occasion = advance_state(record.occasion, LifecycleState::ParticipantReviewed);
    reviewed_record.review = review;
    reviewed_record.confirmed = confirmed;
    reviewed_record.history.push_back({LifecycleState::ParticipantReviewed, reviewed_record.version(), now});
    try {
        store_.save_occasion(reviewed_record, record.version(),
                             {store::ParticipantActor{record.occasion.participant_id},
                              store::AuditAction::ReviewSubmitted, now});
    } catch (const store::VersionConflict& e) {
        const auto latest = load(id);
        if (latest.state() != LifecycleState::Analyzed) throw illegal(latest.state(), "participant review");
        throw conflict(e.stored_version());
    }

    return refine_now(std::move(reviewed_record));
}

Json Service::refine_now(store::OccasionRecord record) {
    const auto& db = study(record.occasion.study_id).foods;
    const auto now = clock_();
    auto refined = analysis::refine(record.confirmed, record.occasion.before, db, record.occasion.metadata, now);

    store::OccasionRecord next = record;
    next.occasion = advance_state(record.occasion, LifecycleState::Refined);
    next.annotations = std::move(refined.drafts);
    next.estimate = std::move(refined.estimate);
    next.next_annotation_seq = static_cast<std::int64_t>(next.annotations.size()) + 1;
    next.history.push_back({LifecycleState::Refined, next.version(), now});
    try {
        store_.save_occasion(next, record.version(), {store::SystemActor{}, store::AuditAction::Refined, now});
    } catch (const store::VersionConflict& e) {
        throw conflict(e.stored_version());
    }
    return Json{{"occasion_id", next.occasion.occasion_id},
                {"state", next.state()},
                {"version", next.version()},
                {"confirmed", next.confirmed},
                {"drafts", next.annotations}};
}

Json Service::process(const OccasionId& id) {
    const auto record = load(id);
    switch (record.state()) {
    case LifecycleState::Uploaded:
        analyze_now(id);
        return preliminary_results(id);
    case LifecycleState::ParticipantReviewed: return refine_now(record);
    default: throw illegal(record.state(), "system processing");
    }
}

// Researcher view.
Json Service::occasion_detail(const OccasionId& id) const {
    const auto record = load(id);
    const auto& o = record.occasion;
    Json images{{"before", image_json(o.before)}};
    if (o.after) images["after"] = image_json(*o.after);

    Json participant{{"foods", record.confirmed}};
    if (record.review) participant["review"] = *record.review;

    Json out{{"occasion_id", o.occasion_id},
             {"participant_id", o.participant_id},
             {"study_id", o.study_id},
             {"state", o.state},
             {"version", o.version},
             {"finalized", o.state == LifecycleState::Finalized},
             {"metadata", o.metadata},
             {"images", images},
             {"analyzer_id", record.analyzer_id},
             {"predictions", record.predictions},
             {"participant_confirmed", participant},
             {"researcher_annotations", record.annotations},
             {"history", record.history}};
    if (record.estimate) out["energy_estimate"] = *record.estimate;
    return out;
}

Json Service::put_annotations(const OccasionId& id, const Json& body) {
    if (!body.is_object()) throw ApiError::validation("body", "expected JSON object");
    const auto expected = expected_version_of(body);
    const auto initials = initials_of(body);
    const auto list_it = body.find("annotations");
    if (list_it == body.end() || !list_it->is_array()) throw ApiError::validation("annotations", "required array");

    const auto record = load(id);
    if (record.state() != LifecycleState::Refined) throw illegal(record.state(), "annotation edit");
    if (expected != record.version()) throw conflict(record.version());

    const auto& db = study(record.occasion.study_id).foods;
    const auto now = clock_();
    Violations violations;
    std::vector<ResearcherAnnotation> annotations;
    std::set<AnnotationId> seen_ids;
    auto seq = record.next_annotation_seq;

    for (std::size_t i = 0; i < list_it->size(); ++i) {
        const auto& item = (*list_it)[i];
        const auto prefix = "annotations[" + std::to_string(i) + "]";
        if (!item.is_object()) {
            violations.push_back({prefix, "expected object"});
            continue;
        }
        ResearcherAnnotation a;
        a.initials = initials;
        a.created_at = now;
        try {
            a.box = item.at("box").get<BoundingBox>();
        } catch (const std::exception&) {
            violations.push_back({prefix + ".box", "required {x_px, y_px, w_px, h_px} integers"});
            continue;
        }
        for (auto v : validate_box(a.box, record.occasion.before)) {
            v.field = prefix + "." + v.field;
            violations.push_back(std::move(v));
        }

        const auto label_it = item.find("label");
        if (label_it == item.end() || !label_it->is_string() || food::trim(label_it->get<std::string>()).empty()) {
            violations.push_back({prefix + ".label", "must be a non-empty string"});
            continue;
        }
        a.label = std::string(food::trim(label_it->get<std::string>()));

        if (const auto code_it = item.find("food_code"); code_it != item.end() && !code_it->is_null()) {
            const auto code = code_it->is_string() ? code_it->get<std::string>() : std::string();
            if (const auto* food = db.find_code(code)) {
                a.food_code = food->code;
            } else {
                violations.push_back({prefix + ".food_code", "not in the study food list"});
            }
        } else {
            try {
                const auto resolution = db.resolve(a.label);
                if (const auto* m = std::get_if<food::Matched>(&resolution))
                    a.food_code = m->item.code;
                else
                    a.free_text = true;
            } catch (const food::Ambiguous& e) {
                violations.push_back({prefix + ".label", std::string(e.what()) + "; supply food_code"});
            }
        }

        if (const auto e_it = item.find("energy_kcal"); e_it != item.end() && !e_it->is_null()) {
            if (!e_it->is_number() || !std::isfinite(e_it->get<double>()) || e_it->get<double>() < 0.0)
                violations.push_back({prefix + ".energy_kcal", "must be a non-negative number"});
            else
                a.energy_kcal = e_it->get<double>();
        }
        if (const auto s_it = item.find("energy_source"); s_it != item.end() && !s_it->is_null()) {
            try {
                a.energy_source = s_it->get<EnergySource>();
            } catch (const std::exception&) {
                violations.push_back({prefix + ".energy_source", "expected 'estimated' or 'manual'"});
            }
        } else if (a.energy_kcal) {
            a.energy_source = EnergySource::Manual;
        }
        if (!a.energy_kcal) a.energy_source.reset();

        if (const auto id_it = item.find("annotation_id"); id_it != item.end() && !id_it->is_null()) {
            const auto given = id_it->is_string() ? id_it->get<std::string>() : std::string();
            const auto existing = std::find_if(record.annotations.begin(), record.annotations.end(),
                                               [&](const ResearcherAnnotation& x) { return x.annotation_id == given; });
            if (existing == record.annotations.end()) {
                violations.push_back({prefix + ".annotation_id", "unknown annotation id '" + given + "'"});
                continue;
            }
            if (!seen_ids.insert(given).second) {
                violations.push_back({prefix + ".annotation_id", "listed twice"});
                continue;
            }
            a.annotation_id = given;
            if (same_content(a, *existing)) {
                a.initials = existing->initials;
                a.created_at = existing->created_at;
            }
        } else {
            a.annotation_id = "a" + std::to_string(seq++);
        }
        annotations.push_back(std::move(a));
    }
    if (!violations.empty()) fail_validation(violations);

    store::OccasionRecord next = record;
    next.occasion.version = record.version() + 1;
    next.annotations = std::move(annotations);
    next.next_annotation_seq = seq;
    try {
        store_.save_occasion(next, record.version(),
                             {store::ResearcherActor{initials}, store::AuditAction::AnnotationSaved, now});
    } catch (const store::VersionConflict& e) {
        throw conflict(e.stored_version());
    }
    return Json{{"occasion_id", id},
                {"state", next.state()},
                {"version", next.version()},
                {"researcher_annotations", next.annotations}};
}

Json Service::delete_annotation(const OccasionId& id, const AnnotationId& annotation_id, std::int64_t expected_version,
                                const std::string& initials_text) {
    if (!Initials::is_valid(initials_text)) throw ApiError::validation("initials", "expected 1-4 uppercase letters");
    const Initials initials(initials_text);

    const auto record = load(id);
    if (record.state() != LifecycleState::Refined) throw illegal(record.state(), "annotation delete");
    const auto it = std::find_if(record.annotations.begin(), record.annotations.end(),
                                 [&](const ResearcherAnnotation& a) { return a.annotation_id == annotation_id; });
    if (it == record.annotations.end())
        throw ApiError(ErrorCode::NotFound, "annotation " + annotation_id + " not found");
    if (expected_version != record.version()) throw conflict(record.version());

    const auto now = clock_();
    store::OccasionRecord next = record;
    next.occasion.version = record.version() + 1;
    next.annotations.erase(next.annotations.begin() + (it - record.annotations.begin()));
    try {
        store_.save_occasion(next, record.version(),
                             {store::ResearcherActor{initials}, store::AuditAction::AnnotationDeleted, now});
    } catch (const store::VersionConflict& e) {
        throw conflict(e.stored_version());
    }
    return Json{{"occasion_id", id},
                {"state", next.state()},
                {"version", next.version()},
                {"researcher_annotations", next.annotations}};
}

Json Service::finalize(const OccasionId& id, const Json& body) {
    if (!body.is_object()) throw ApiError::validation("body", "expected JSON object");
    const auto expected = expected_version_of(body);
    const auto initials = initials_of(body);

    const auto record = load(id);
    if (record.state() != LifecycleState::Refined) throw illegal(record.state(), "finalize");
    if (expected != record.version()) throw conflict(record.version());
    if (record.annotations.empty()) throw ApiError::validation("researcher_annotations", "no annotations");

    const auto now = clock_();
    store::OccasionRecord next = record;
    next.occasion = advance_state(record.occasion, LifecycleState::Finalized);
    next.history.push_back({LifecycleState::Finalized, next.version(), now});
    try {
        store_.save_occasion(next, record.version(),
                             {store::ResearcherActor{initials}, store::AuditAction::Finalized, now});
    } catch (const store::VersionConflict& e) {
        throw conflict(e.stored_version());
    }
    return Json{{"occasion_id", id}, {"state", next.state()}, {"version", next.version()}};
}

Json Service::search_foods(const std::string& query, std::optional<std::size_t> limit,
                           const std::optional<std::string>& study_id) const {
    const auto& s = study(study_id);
    const auto max = limit.value_or(config_.search_limit);
    const auto hits = s.foods.search(query);
    Json results = Json::array();
    for (std::size_t i = 0; i < hits.size() && i < max; ++i) results.push_back(food_json(hits[i]));
    return Json{{"study_id", s.study_id}, {"query", query}, {"total", hits.size()}, {"results", results}};
}

Json Service::food_list(const std::optional<std::string>& study_id) const {
    const auto& s = study(study_id);
    Json items = Json::array();
    for (const auto& item : s.foods.items()) items.push_back(food_json(item));
    return Json{{"study_id", s.study_id}, {"hash", s.foods_hash}, {"items", items}};
}

Json Service::list_participant_occasions(const ParticipantId& participant_id,
                                         const std::optional<std::string>& study_id) const {
    Json occasions = Json::array();
    for (const auto& s : store_.list_occasions(participant_id, study_id)) {
        auto image = [](const store::BlobRef& ref) {
            Json j{{"content_hash", ref.content_hash},
                   {"byte_length", ref.byte_length},
                   {"url", blob_url(ref.content_hash)},
                   {"thumbnail_url", blob_url(ref.content_hash)}};
            if (ref.media_type) j["media_type"] = *ref.media_type;
            return j;
        };
        Json entry{{"occasion_id", s.occasion_id},
                   {"study_id", s.study_id},
                   {"state", s.state},
                   {"version", s.version},
                   {"captured_at", s.captured_at},
                   {"before", image(s.before)}};
        if (s.after) entry["after"] = image(*s.after);
        occasions.push_back(std::move(entry));
    }
    return Json{{"participant_id", participant_id}, {"occasions", occasions}};
}

Json Service::audit_trail(const OccasionId& id) const {
    load(id);
    return Json{{"occasion_id", id}, {"events", store_.audit_trail(id)}};
}

ExportFile Service::export_study(const StudyId& study_id, const std::string& format) const {
    if (!studies_.contains(study_id)) throw ApiError(ErrorCode::NotFound, "study " + study_id + " not found");
    const auto records = store_.study_records(study_id);
    if (format == "json") return {"application/json", export_json(study_id, records)};
    if (format == "csv") return {"text/csv", export_csv(records)};
    throw ApiError::validation("format", "expected json or csv");
}

std::optional<std::string> Service::blob(const std::string& content_hash) const {
    return store_.blobs().get(content_hash);
}

} // namespace tada::server
