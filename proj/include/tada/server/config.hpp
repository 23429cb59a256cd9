#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "tada/analysis/analyzer.hpp"

namespace tada::server {

enum class AnalysisMode {
    Sync,   ///< analyze inside the upload request
    Async,  ///< queue for the background worker
    Manual, ///< wait for POST .../process
};

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "tada-store/data";
    std::filesystem::path blob_dir = "tada-store/blobs";
    std::string participant_token;
    std::string researcher_token;
    analysis::AnalyzerRef analyzer{"grid-stub", analysis::AnalyzerKind::GridStub};
    std::filesystem::path sidecar_dir;
    AnalysisMode analysis_mode = AnalysisMode::Sync;
    std::uint64_t max_image_bytes = 20ull * 1024 * 1024;
    std::size_t search_limit = 25;
    /// study_id -> food-list CSV.
    std::map<std::string, std::filesystem::path> studies;
    std::optional<std::filesystem::path> ui_dir;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the JSON config file; relative paths resolve against its directory.
ServerConfig load_config(const std::filesystem::path& path);

/// Applies TADA_HOST, TADA_PORT, TADA_DATA_DIR, TADA_BLOB_DIR,
/// TADA_PARTICIPANT_TOKEN, TADA_RESEARCHER_TOKEN, TADA_ANALYZER (kind),
/// TADA_SIDECAR_DIR, TADA_ANALYSIS_MODE, TADA_MAX_IMAGE_BYTES,
/// TADA_STUDIES ("id=path,id=path") and TADA_UI_DIR.
void apply_env_overrides(ServerConfig& config, const EnvLookup& env);

/// Process environment lookup for apply_env_overrides.
std::optional<std::string> process_env(const std::string& name);

AnalysisMode parse_analysis_mode(std::string_view text);

} // namespace tada::server
