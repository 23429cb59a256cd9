#include "tada/server/http_server.hpp"

#include <chrono>
#include <mutex>

#include <httplib.h>

namespace tada::server {

struct HttpServer::Impl {
    httplib::Server http;
    Router& router;
    const ServerConfig& config;
    std::ostream* log;
    std::mutex log_mutex;

    Impl(Router& r, const ServerConfig& c, std::ostream* l) : router(r), config(c), log(l) {}

    static Request convert(const httplib::Request& in) {
        Request out;
        out.method = in.method;
        out.path = in.path;
        for (const auto& [k, v] : in.params) out.query.emplace(k, v);
        for (const auto& [k, v] : in.headers) {
            std::string name = k;
            for (auto& c : name)
                if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            out.headers.emplace(std::move(name), v);
        }
        for (const auto& [name, file] : in.files) out.parts.emplace(name, Part{file.filename, file.content_type, file.content});
        if (in.files.empty()) out.body = in.body;
        return out;
    }

    void serve(const httplib::Request& in, httplib::Response& out) {
        const auto started = std::chrono::steady_clock::now();
        const auto response = router.handle(convert(in));
        out.status = response.status;
        for (const auto& [k, v] : response.headers) out.set_header(k, v);
        out.set_content(response.body, response.content_type);

        if (!log) return;
        const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started);
        Json line{{"ts", Timestamp::now()},
                  {"method", in.method},
                  {"path", in.path},
                  {"status", response.status},
                  {"duration_ms", elapsed.count()},
                  {"remote", in.remote_addr}};
        if (response.status >= 400) {
            try {
                line["error"] = Json::parse(response.body).at("error").at("code");
            } catch (const std::exception&) {
            }
        }
        const std::lock_guard lock(log_mutex);
        *log << line.dump() << '\n' << std::flush;
    }

    void install() {
        // Two images plus metadata; anything larger is rejected by the
        // service per image, this only bounds memory.
        http.set_payload_max_length(2 * config.max_image_bytes + 1024 * 1024);
        auto handler = [this](const httplib::Request& in, httplib::Response& out) { serve(in, out); };
        const std::string api = R"(/api/v1/.*)";
        http.Get(api, handler);
        http.Post(api, handler);
        http.Put(api, handler);
        http.Delete(api, handler);
        if (config.ui_dir) http.set_mount_point("/", config.ui_dir->string());
        http.set_exception_handler([](const httplib::Request&, httplib::Response& out, std::exception_ptr) {
            out.status = 500;
            out.set_content(ApiError(ErrorCode::Internal, "unhandled error").to_json().dump(), "application/json");
        });
    }
};

HttpServer::HttpServer(Router& router, const ServerConfig& config, std::ostream* log)
    : impl_(std::make_unique<Impl>(router, config, log)) {
    impl_->install();
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start() {
    const auto& host = impl_->config.host;
    if (impl_->config.port == 0) {
        port_ = impl_->http.bind_to_any_port(host);
    } else {
        port_ = impl_->http.bind_to_port(host, impl_->config.port) ? impl_->config.port : -1;
    }
    if (port_ < 0) throw Error("cannot bind " + host + ":" + std::to_string(impl_->config.port));
    thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port_;
}

bool HttpServer::listen() {
    port_ = impl_->config.port;
    return impl_->http.listen(impl_->config.host, impl_->config.port);
}

void HttpServer::stop() {
    impl_->http.stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace tada::server
