#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tada/core/json.hpp"

namespace tada::server {

/// Closed set of machine-readable error codes.
enum class ErrorCode {
    ValidationFailed,
    NotFound,
    IllegalTransition,
    VersionConflict,
    SidecarMissing,
    AnalysisFailed,
    PayloadTooLarge,
    Unauthorized,
    Forbidden,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;
int http_status(ErrorCode code) noexcept;
/// nullopt for strings outside the closed set.
std::optional<ErrorCode> parse_error_code(std::string_view text) noexcept;

/// Wire error: `{"error": {"code", "message", "details"?}}` with the HTTP
/// status implied by the code.
class ApiError : public std::exception {
public:
    ApiError(ErrorCode code, std::string message, Json details = nullptr)
        : code_(code), message_(std::move(message)), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    int status() const noexcept { return http_status(code_); }
    const std::string& message() const noexcept { return message_; }
    const Json& details() const noexcept { return details_; }
    const char* what() const noexcept override { return message_.c_str(); }

    Json to_json() const;

    static ApiError validation(const std::string& field, const std::string& reason);

private:
    ErrorCode code_;
    std::string message_;
    Json details_;
};

struct Part {
    std::string filename;
    std::string content_type;
    std::string content;
};

/// Transport-neutral request. Header names are lowercase.
struct Request {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;
    std::string body;
    std::map<std::string, Part> parts;

    std::optional<std::string> header(const std::string& lowercase_name) const;
    std::optional<std::string> query_param(const std::string& name) const;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;

    static Response json(int status, const Json& body);
    static Response error(const ApiError& error);
};

} // namespace tada::server
