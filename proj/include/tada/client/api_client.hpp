#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "tada/client/session.hpp"

namespace tada::client {

/// Connection refused, reset, or timed out before a response arrived.
class NetworkError : public Error {
public:
    using Error::Error;
};

/// The server answered with an error body.
class ServerError : public Error {
public:
    ServerError(int status, std::string code, const std::string& message)
        : Error(code + ": " + message), status_(status), code_(std::move(code)) {}

    int status() const noexcept { return status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int status_;
    std::string code_;
};

struct ClientOptions {
    std::chrono::milliseconds connect_timeout{3000};
    std::chrono::milliseconds read_timeout{30000};
};

/// Thin JSON client over `/api/v1/`.
class ApiClient {
public:
    ApiClient(std::string server_url, std::string token, ClientOptions options = {});
    ~ApiClient();

    Json get(const std::string& path, const std::map<std::string, std::string>& query = {});
    Json post(const std::string& path, const Json& body);
    Json put(const std::string& path, const Json& body);
    Json del(const std::string& path, const std::map<std::string, std::string>& query = {});

    /// Multipart upload of a draft with its idempotency key.
    Json upload(const Draft& draft);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace tada::client
