#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <thread>

#include "tada/server/router.hpp"

namespace tada::server {

/// cpp-httplib front end for a Router. Logs one JSON line per request.
class HttpServer {
public:
    HttpServer(Router& router, const ServerConfig& config, std::ostream* log = nullptr);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port (port 0 picks a free one) and serves on a background
    /// thread. Returns the bound port.
    int start();
    /// Binds and serves on the calling thread until stop().
    bool listen();
    void stop();

    int port() const noexcept { return port_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace tada::server
