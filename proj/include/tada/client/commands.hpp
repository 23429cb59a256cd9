#pragma once

#include <chrono>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tada/client/api_client.hpp"
#include "tada/client/session.hpp"

namespace tada::client {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kTimeout = 3,
    kNetwork = 4,
    kServerError = 5,
};

/// VALIDATION_FAILED and PAYLOAD_TOO_LARGE map to kValidation, the rest to
/// kServerError.
int exit_code_for(const ServerError& error) noexcept;

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

struct CaptureOptions {
    std::filesystem::path before;
    std::filesystem::path after;
    std::optional<std::string> time;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::optional<double> pose_angle;
    bool fiducial = false;
    std::optional<double> scale;
    std::vector<std::string> exif; ///< "key=value"
    std::optional<std::filesystem::path> metadata_file;
};

struct ReviewOptions {
    std::string target; ///< local draft id or occasion id
    std::chrono::milliseconds timeout{60000};
    std::chrono::milliseconds poll_interval{500};
    std::optional<std::filesystem::path> answers;
};

int capture(LocalSession& session, const CaptureOptions& options, Io io);
int sync(LocalSession& session, ApiClient& api, Io io);
int review(LocalSession& session, ApiClient& api, const ReviewOptions& options, Io io);
/// `api` may be null when no server is configured.
int status(LocalSession& session, ApiClient* api, Io io);
int foods(LocalSession& session, ApiClient* api, bool refresh, Io io);

/// Fetches the study food list when the cached hash differs. Returns false
/// (cache untouched) on any failure.
bool refresh_food_cache(LocalSession& session, ApiClient& api);

} // namespace tada::client
