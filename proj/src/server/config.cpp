#include "tada/server/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tada/core/json.hpp"

namespace tada::server {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : base / p;
}

std::uint64_t parse_u64(const std::string& text, const char* field) {
    try {
        std::size_t used = 0;
        const auto value = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw InvalidValue(field, "expected a non-negative integer, got '" + text + "'");
    }
}

} // namespace

AnalysisMode parse_analysis_mode(std::string_view text) {
    if (text == "sync") return AnalysisMode::Sync;
    if (text == "async") return AnalysisMode::Async;
    if (text == "manual") return AnalysisMode::Manual;
    throw InvalidValue("analysis_mode", "expected sync, async or manual");
}

ServerConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidValue("config", "cannot open " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InvalidValue("config", e.what());
    }
    const auto base = path.has_parent_path() ? path.parent_path() : fs::path(".");

    ServerConfig c;
    try {
        c.host = j.value("host", c.host);
        c.port = j.value("port", c.port);
        if (j.contains("storage_root")) {
            const auto root = resolve(base, j["storage_root"].get<std::string>());
            c.data_dir = root / "data";
            c.blob_dir = root / "blobs";
        }
        if (j.contains("data_dir")) c.data_dir = resolve(base, j["data_dir"].get<std::string>());
        if (j.contains("blob_dir")) c.blob_dir = resolve(base, j["blob_dir"].get<std::string>());
        if (j.contains("tokens")) {
            c.participant_token = j["tokens"].value("participant", "");
            c.researcher_token = j["tokens"].value("researcher", "");
        }
        if (j.contains("analyzer")) {
            const auto& a = j["analyzer"];
            c.analyzer.analyzer_id = a.value("id", c.analyzer.analyzer_id);
            c.analyzer.kind = analysis::parse_analyzer_kind(a.value("kind", std::string("GridStub")));
        }
        if (j.contains("sidecar_dir")) c.sidecar_dir = resolve(base, j["sidecar_dir"].get<std::string>());
        if (j.contains("analysis_mode")) c.analysis_mode = parse_analysis_mode(j["analysis_mode"].get<std::string>());
        c.max_image_bytes = j.value("max_image_bytes", c.max_image_bytes);
        c.search_limit = j.value("search_limit", c.search_limit);
        if (j.contains("studies"))
            for (const auto& [id, list] : j["studies"].items()) c.studies[id] = resolve(base, list.get<std::string>());
        if (j.contains("ui_dir")) c.ui_dir = resolve(base, j["ui_dir"].get<std::string>());
    } catch (const Json::exception& e) {
        throw InvalidValue("config", e.what());
    }
    return c;
}

void apply_env_overrides(ServerConfig& c, const EnvLookup& env) {
    if (auto v = env("TADA_HOST")) c.host = *v;
    if (auto v = env("TADA_PORT")) c.port = static_cast<int>(parse_u64(*v, "TADA_PORT"));
    if (auto v = env("TADA_DATA_DIR")) c.data_dir = *v;
    if (auto v = env("TADA_BLOB_DIR")) c.blob_dir = *v;
    if (auto v = env("TADA_PARTICIPANT_TOKEN")) c.participant_token = *v;
    if (auto v = env("TADA_RESEARCHER_TOKEN")) c.researcher_token = *v;
    if (auto v = env("TADA_ANALYZER")) c.analyzer.kind = analysis::parse_analyzer_kind(*v);
    if (auto v = env("TADA_SIDECAR_DIR")) c.sidecar_dir = *v;
    if (auto v = env("TADA_ANALYSIS_MODE")) c.analysis_mode = parse_analysis_mode(*v);
    if (auto v = env("TADA_MAX_IMAGE_BYTES")) c.max_image_bytes = parse_u64(*v, "TADA_MAX_IMAGE_BYTES");
    if (auto v = env("TADA_UI_DIR")) c.ui_dir = fs::path(*v);
    if (auto v = env("TADA_STUDIES")) {
        c.studies.clear();
        std::stringstream ss(*v);
        std::string entry;
        while (std::getline(ss, entry, ',')) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos || eq == 0) throw InvalidValue("TADA_STUDIES", "expected id=path entries");
            c.studies[entry.substr(0, eq)] = entry.substr(eq + 1);
        }
    }
}

std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
}

} // namespace tada::server
