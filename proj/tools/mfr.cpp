// Command-line food record client: capture, sync, review, status, foods.
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "tada/client/commands.hpp"

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : std::move(fallback);
}

} // namespace

int main(int argc, char** argv) {
    using namespace tada::client;

    CLI::App app{"mfr: capture and review eating occasions"};
    app.require_subcommand(1);

    std::string state_dir = env_or("MFR_STATE_DIR", ".mfr");
    std::optional<std::string> server, token, participant, study;
    app.add_option("--state-dir", state_dir, "Directory holding the local state file");
    app.add_option("--server", server, "Server base URL, e.g. http://127.0.0.1:8080 (remembered)");
    app.add_option("--token", token, "Participant bearer token (remembered)");
    app.add_option("--participant", participant, "Participant id (remembered)");
    app.add_option("--study", study, "Study id (remembered)");

    CaptureOptions cap;
    auto* capture_cmd = app.add_subcommand("capture", "Queue a before/after image pair");
    capture_cmd->add_option("before", cap.before, "Before-eating image")->required();
    capture_cmd->add_option("after", cap.after, "After-eating image")->required();
    capture_cmd->add_option("--time", cap.time, "Capture time, RFC 3339 (default: file mtime)");
    capture_cmd->add_option("--lat", cap.latitude, "GPS latitude in degrees");
    capture_cmd->add_option("--lon", cap.longitude, "GPS longitude in degrees");
    capture_cmd->add_option("--pose", cap.pose_angle, "Camera angle from horizontal, degrees");
    capture_cmd->add_flag("--fiducial", cap.fiducial, "Fiducial marker visible in the scene");
    capture_cmd->add_option("--scale", cap.scale, "Fiducial scale, mm per pixel");
    capture_cmd->add_option("--exif", cap.exif, "EXIF key=value (repeatable)");
    capture_cmd->add_option("--metadata", cap.metadata_file, "JSON metadata file; flags override its fields");

    auto* sync_cmd = app.add_subcommand("sync", "Upload queued drafts");

    ReviewOptions rev;
    double timeout_s = 60.0;
    int poll_ms = 500;
    auto* review_cmd = app.add_subcommand("review", "Confirm, relabel or remove predicted foods");
    review_cmd->add_option("occasion", rev.target, "Draft id or occasion id")->required();
    review_cmd->add_option("--timeout", timeout_s, "Seconds to wait for analysis")->check(CLI::NonNegativeNumber);
    review_cmd->add_option("--poll-ms", poll_ms, "Polling interval in milliseconds")->check(CLI::PositiveNumber);
    review_cmd->add_option("--answers", rev.answers, "Answers file, one answer per line");

    auto* status_cmd = app.add_subcommand("status", "List drafts and their server states");

    bool refresh = false;
    auto* foods_cmd = app.add_subcommand("foods", "Print the cached food list");
    foods_cmd->add_flag("--refresh", refresh, "Fetch the list from the server first");

    CLI11_PARSE(app, argc, argv);

    Io io{std::cin, std::cout, std::cerr};
    try {
        LocalSession session(state_dir);
        auto& state = session.state();
        if (server) state.server_url = *server;
        if (token) state.token = *token;
        if (participant) state.participant_id = *participant;
        if (study) state.study_id = *study;
        if (state.token.empty()) state.token = env_or("MFR_TOKEN", "");
        session.save();

        std::unique_ptr<ApiClient> api;
        if (!state.server_url.empty()) api = std::make_unique<ApiClient>(state.server_url, state.token);
        auto need_api = [&]() -> ApiClient* {
            if (!api) std::cerr << "error: no server configured; pass --server\n";
            return api.get();
        };

        if (*capture_cmd) return capture(session, cap, io);
        if (*sync_cmd) {
            auto* client = need_api();
            return client ? sync(session, *client, io) : kValidation;
        }
        if (*review_cmd) {
            auto* client = need_api();
            if (!client) return kValidation;
            rev.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000));
            rev.poll_interval = std::chrono::milliseconds(poll_ms);
            return review(session, *client, rev, io);
        }
        if (*status_cmd) return status(session, api.get(), io);
        if (*foods_cmd) return foods(session, api.get(), refresh, io);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kOk;
}
