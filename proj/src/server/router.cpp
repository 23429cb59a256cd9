#include "tada/server/router.hpp"

#include <charconv>

#include "tada/core/image.hpp"
#include "tada/store/store.hpp"

namespace tada::server {

namespace {

constexpr const char* kId = "([A-Za-z0-9_.:-]+)";

Json parse_body(const Request& request) {
    if (request.body.empty()) throw ApiError::validation("body", "JSON body required");
    try {
        return Json::parse(request.body);
    } catch (const Json::parse_error&) {
        throw ApiError::validation("body", "not valid JSON");
    }
}

std::int64_t int_param(const Request& request, const std::string& name, bool required, std::int64_t fallback = 0) {
    const auto text = request.query_param(name);
    if (!text) {
        if (required) throw ApiError::validation(name, "required query parameter");
        return fallback;
    }
    std::int64_t value = 0;
    const auto* last = text->data() + text->size();
    const auto [ptr, ec] = std::from_chars(text->data(), last, value);
    if (ec != std::errc{} || ptr != last) throw ApiError::validation(name, "expected an integer");
    return value;
}

std::optional<std::string> non_empty(std::optional<std::string> value) {
    if (value && value->empty()) return std::nullopt;
    return value;
}

std::optional<ImageUpload> image_part(const Request& request, const std::string& name) {
    const auto it = request.parts.find(name);
    if (it == request.parts.end() || it->second.content.empty()) return std::nullopt;
    return ImageUpload{it->second.filename, it->second.content};
}

std::string field_part(const Request& request, const std::string& name) {
    if (const auto it = request.parts.find(name); it != request.parts.end()) return it->second.content;
    return request.query_param(name).value_or("");
}

Response upload(Service& service, const Request& request) {
    UploadRequest upload;
    upload.participant_id = field_part(request, "participant_id");
    upload.study_id = field_part(request, "study_id");
    upload.before = image_part(request, "before");
    upload.after = image_part(request, "after");
    upload.metadata_json = field_part(request, "metadata");
    if (upload.metadata_json.empty()) upload.metadata_json = "{}";
    upload.idempotency_key = non_empty(request.header("idempotency-key"));

    const auto result = service.upload(upload);
    return Response::json(result.created ? 201 : 200, Json{{"occasion_id", result.occasion_id},
                                                            {"version", result.version},
                                                            {"state", result.state},
                                                            {"created", result.created},
                                                            {"analysis", result.analysis}});
}

} // namespace

Router::Router(Service& service) : service_(service) {
    auto add = [this](std::string method, const std::string& pattern, bool participant_allowed, Handler handler) {
        routes_.push_back(Route{std::move(method), std::regex("/api/v1" + pattern), participant_allowed,
                                std::move(handler)});
    };
    Service& s = service_;

    add("GET", "/health", true, [](const Request&, const std::smatch&) {
        return Response::json(200, Json{{"status", "ok"}});
    });
    add("POST", "/occasions", true, [&s](const Request& r, const std::smatch&) { return upload(s, r); });
    add("GET", std::string("/occasions/") + kId + "/predictions", true, [&s](const Request&, const std::smatch& m) {
        return Response::json(200, s.preliminary_results(m[1]));
    });
    add("POST", std::string("/occasions/") + kId + "/review", true, [&s](const Request& r, const std::smatch& m) {
        return Response::json(200, s.participant_review(m[1], parse_body(r)));
    });
    add("GET", std::string("/occasions/") + kId, false, [&s](const Request&, const std::smatch& m) {
        return Response::json(200, s.occasion_detail(m[1]));
    });
    add("PUT", std::string("/occasions/") + kId + "/annotations", false, [&s](const Request& r, const std::smatch& m) {
        return Response::json(200, s.put_annotations(m[1], parse_body(r)));
    });
    add("DELETE", std::string("/occasions/") + kId + "/annotations/" + kId, false,
        [&s](const Request& r, const std::smatch& m) {
            const auto expected = int_param(r, "expected_version", true);
            const auto initials = r.query_param("initials");
            if (!initials) throw ApiError::validation("initials", "required query parameter");
            return Response::json(200, s.delete_annotation(m[1], m[2], expected, *initials));
        });
    add("POST", std::string("/occasions/") + kId + "/finalize", false, [&s](const Request& r, const std::smatch& m) {
        return Response::json(200, s.finalize(m[1], parse_body(r)));
    });
    add("POST", std::string("/occasions/") + kId + "/process", false, [&s](const Request&, const std::smatch& m) {
        return Response::json(200, s.process(m[1]));
    });
    add("GET", std::string("/occasions/") + kId + "/audit", false, [&s](const Request&, const std::smatch& m) {
        return Response::json(200, s.audit_trail(m[1]));
    });
    add("GET", "/foods/search", true, [&s](const Request& r, const std::smatch&) {
        std::optional<std::size_t> limit;
        if (r.query_param("limit")) {
            const auto value = int_param(r, "limit", true);
            if (value < 1) throw ApiError::validation("limit", "must be >= 1");
            limit = static_cast<std::size_t>(value);
        }
        return Response::json(200, s.search_foods(r.query_param("q").value_or(""), limit,
                                                  non_empty(r.query_param("study_id"))));
    });
    add("GET", "/foods", true, [&s](const Request& r, const std::smatch&) {
        return Response::json(200, s.food_list(non_empty(r.query_param("study_id"))));
    });
    add("GET", std::string("/studies/") + kId + "/export", false, [&s](const Request& r, const std::smatch& m) {
        const auto file = s.export_study(m[1], r.query_param("format").value_or("json"));
        Response response{200, file.content_type, file.body, {}};
        const std::string ext = file.content_type == "text/csv" ? "csv" : "json";
        response.headers["Content-Disposition"] =
            "attachment; filename=\"" + std::string(m[1]) + "-export." + ext + "\"";
        return response;
    });
    add("GET", std::string("/participants/") + kId + "/occasions", false, [&s](const Request& r, const std::smatch& m) {
        return Response::json(200, s.list_participant_occasions(m[1], non_empty(r.query_param("study_id"))));
    });
    add("GET", "/blobs/([0-9a-f]{64})", true, [&s](const Request&, const std::smatch& m) {
        auto bytes = s.blob(m[1]);
        if (!bytes) throw ApiError(ErrorCode::NotFound, "blob not found");
        std::string type = "application/octet-stream";
        try {
            type = std::string(mime_type(probe_image(std::as_bytes(std::span(bytes->data(), bytes->size()))).media_type));
        } catch (const DecodeError&) {
        }
        Response response{200, type, std::move(*bytes), {}};
        response.headers["Cache-Control"] = "public, max-age=31536000, immutable";
        return response;
    });
}

Role Router::authenticate(const Request& request) const {
    const auto header = request.header("authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (!header || !header->starts_with(prefix)) throw ApiError(ErrorCode::Unauthorized, "missing bearer token");
    const auto token = header->substr(prefix.size());
    const auto& config = service_.config();
    if (!config.researcher_token.empty() && token == config.researcher_token) return Role::Researcher;
    if (!config.participant_token.empty() && token == config.participant_token) return Role::Participant;
    throw ApiError(ErrorCode::Unauthorized, "unknown token");
}

Response Router::handle(const Request& request) const {
    try {
        const Route* matched = nullptr;
        std::smatch match;
        bool health = false;
        for (const auto& route : routes_) {
            if (route.method != request.method) continue;
            if (std::regex_match(request.path, match, route.pattern)) {
                matched = &route;
                health = request.path == "/api/v1/health";
                break;
            }
        }
        if (!health) {
            const auto role = authenticate(request);
            if (!matched) throw ApiError(ErrorCode::NotFound, "no route for " + request.method + " " + request.path);
            if (role == Role::Participant && !matched->participant_allowed)
                throw ApiError(ErrorCode::Forbidden, "researcher token required");
        }
        return matched->handler(request, match);
    } catch (const ApiError& e) {
        return Response::error(e);
    } catch (const store::NotFound& e) {
        return Response::error(ApiError(ErrorCode::NotFound, e.what()));
    } catch (const store::VersionConflict& e) {
        return Response::error(ApiError(ErrorCode::VersionConflict, e.what(),
                                        Json{{"current_version", e.stored_version()}}));
    } catch (const InvalidValue& e) {
        return Response::error(ApiError::validation(e.field(), e.what()));
    } catch (const std::exception& e) {
        return Response::error(ApiError(ErrorCode::Internal, e.what()));
    }
}

} // namespace tada::server
