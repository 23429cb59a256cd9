#include "tada/server/api.hpp"

#include <array>

namespace tada::server {

namespace {

struct CodeInfo {
    ErrorCode code;
    std::string_view name;
    int status;
};

constexpr std::array<CodeInfo, 10> kCodes{{
    {ErrorCode::ValidationFailed, "VALIDATION_FAILED", 422},
    {ErrorCode::NotFound, "NOT_FOUND", 404},
    {ErrorCode::IllegalTransition, "ILLEGAL_TRANSITION", 409},
    {ErrorCode::VersionConflict, "VERSION_CONFLICT", 409},
    {ErrorCode::SidecarMissing, "SIDECAR_MISSING", 422},
    {ErrorCode::AnalysisFailed, "ANALYSIS_FAILED", 422},
    {ErrorCode::PayloadTooLarge, "PAYLOAD_TOO_LARGE", 413},
    {ErrorCode::Unauthorized, "UNAUTHORIZED", 401},
    {ErrorCode::Forbidden, "FORBIDDEN", 403},
    {ErrorCode::Internal, "INTERNAL", 500},
}};

} // namespace

std::string_view to_string(ErrorCode code) noexcept {
    for (const auto& info : kCodes)
        if (info.code == code) return info.name;
    return "INTERNAL";
}

int http_status(ErrorCode code) noexcept {
    for (const auto& info : kCodes)
        if (info.code == code) return info.status;
    return 500;
}

std::optional<ErrorCode> parse_error_code(std::string_view text) noexcept {
    for (const auto& info : kCodes)
        if (info.name == text) return info.code;
    return std::nullopt;
}

Json ApiError::to_json() const {
    Json error{{"code", std::string(to_string(code_))}, {"message", message_}};
    if (!details_.is_null()) error["details"] = details_;
    return Json{{"error", error}};
}

ApiError ApiError::validation(const std::string& field, const std::string& reason) {
    return ApiError(ErrorCode::ValidationFailed, field + ": " + reason,
                    Json{{"violations", Json::array({Json{{"field", field}, {"reason", reason}}})}});
}

std::optional<std::string> Request::header(const std::string& lowercase_name) const {
    const auto it = headers.find(lowercase_name);
    if (it == headers.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> Request::query_param(const std::string& name) const {
    const auto it = query.find(name);
    if (it == query.end()) return std::nullopt;
    return it->second;
}

Response Response::json(int status, const Json& body) { return Response{status, "application/json", body.dump(), {}}; }

Response Response::error(const ApiError& error) { return json(error.status(), error.to_json()); }

} // namespace tada::server
