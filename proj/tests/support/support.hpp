#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include <map>
#include <optional>

#include "tada/server/http_server.hpp"

namespace tada::test {

/// Decodable 8-bit grayscale PNG; `salt` varies the pixels (and so the hash).
std::string make_png(int width, int height, std::uint32_t salt = 0);

/// SOI + SOF0 + EOI. Enough for the header probe, not for a decoder.
std::string make_jpeg(int width, int height, std::uint32_t salt = 0);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

/// Directory with test fixtures checked into the repository.
std::filesystem::path data_dir();

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline constexpr const char* kParticipantToken = "participant-test-token";
inline constexpr const char* kResearcherToken = "researcher-test-token";

/// Sidecar-stub configuration over a fresh temp store with study "demo"
/// bound to tests/data/foods.csv.
server::ServerConfig test_config(const std::filesystem::path& root,
                                 server::AnalysisMode mode = server::AnalysisMode::Sync);

/// Service + Router + HTTP listener on a free loopback port.
class TestServer {
public:
    explicit TestServer(server::AnalysisMode mode = server::AnalysisMode::Sync);
    ~TestServer();

    server::Service& service() noexcept { return *service_; }
    server::Router& router() noexcept { return *router_; }
    const server::ServerConfig& config() const noexcept { return config_; }
    int port() const noexcept { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    const std::filesystem::path& sidecar_dir() const noexcept { return config_.sidecar_dir; }

private:
    TempDir dir_;
    server::ServerConfig config_;
    std::unique_ptr<server::Service> service_;
    std::unique_ptr<server::Router> router_;
    std::unique_ptr<server::HttpServer> http_;
    int port_ = 0;
};

server::Request make_request(const std::string& method, const std::string& path, const std::string& token,
                             const std::string& body = "", std::map<std::string, std::string> query = {});

struct UploadParts {
    std::string participant_id = "P01";
    std::string study_id = "demo";
    std::optional<std::string> before;
    std::optional<std::string> after;
    std::string before_name = "meal.png";
    std::string after_name = "meal-after.png";
    Json metadata = Json{{"captured_at", "2021-05-01T12:30:00Z"}};
    std::optional<std::string> idempotency_key;
};

server::Request upload_request(const UploadParts& parts, const std::string& token = kParticipantToken);

Json body_of(const server::Response& response);

/// Writes `<dir>/<image_name>.predictions.json`.
void write_sidecar(const std::filesystem::path& dir, const std::string& image_name, const Json& predictions);

/// TCP relay in front of an HTTP server. While `drop_responses` > 0 it
/// forwards the complete request upstream, waits for the full response and
/// then closes the client connection without relaying it.
class FaultProxy {
public:
    explicit FaultProxy(int upstream_port);
    ~FaultProxy();

    int port() const noexcept { return port_; }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> drop_responses{0};
    std::atomic<int> dropped{0};
    std::atomic<int> relayed{0};

private:
    void run();
    void serve(int client);

    int upstream_port_;
    int listen_fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread thread_;
};

} // namespace tada::test
