#include "tada/client/api_client.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

namespace tada::client {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string with_query(const std::string& path, const std::map<std::string, std::string>& query) {
    if (query.empty()) return path;
    httplib::Params params(query.begin(), query.end());
    return httplib::append_query_params(path, params);
}

} // namespace

struct ApiClient::Impl {
    httplib::Client http;
    httplib::Headers headers;

    Impl(const std::string& url, const std::string& token, const ClientOptions& options) : http(url) {
        http.set_connection_timeout(options.connect_timeout);
        http.set_read_timeout(options.read_timeout);
        http.set_write_timeout(options.read_timeout);
        if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);
    }

    Json finish(const httplib::Result& result, const std::string& what) {
        if (!result) throw NetworkError(what + ": " + httplib::to_string(result.error()));
        Json body;
        try {
            body = result->body.empty() ? Json::object() : Json::parse(result->body);
        } catch (const Json::parse_error&) {
            if (result->status >= 400) throw ServerError(result->status, "HTTP_" + std::to_string(result->status), result->body);
            throw ServerError(result->status, "BAD_RESPONSE", "response is not JSON");
        }
        if (result->status >= 400) {
            const auto error = body.value("error", Json::object());
            throw ServerError(result->status, error.value("code", "HTTP_" + std::to_string(result->status)),
                              error.value("message", result->body));
        }
        return body;
    }
};

ApiClient::ApiClient(std::string server_url, std::string token, ClientOptions options)
    : impl_(std::make_unique<Impl>(server_url, token, options)) {}

ApiClient::~ApiClient() = default;

Json ApiClient::get(const std::string& path, const std::map<std::string, std::string>& query) {
    const auto target = with_query("/api/v1" + path, query);
    return impl_->finish(impl_->http.Get(target, impl_->headers), "GET " + path);
}

Json ApiClient::post(const std::string& path, const Json& body) {
    return impl_->finish(impl_->http.Post("/api/v1" + path, impl_->headers, body.dump(), "application/json"),
                         "POST " + path);
}

Json ApiClient::put(const std::string& path, const Json& body) {
    return impl_->finish(impl_->http.Put("/api/v1" + path, impl_->headers, body.dump(), "application/json"),
                         "PUT " + path);
}

Json ApiClient::del(const std::string& path, const std::map<std::string, std::string>& query) {
    const auto target = with_query("/api/v1" + path, query);
    return impl_->finish(impl_->http.Delete(target, impl_->headers), "DELETE " + path);
}

Json ApiClient::upload(const Draft& draft) {
    auto mime = [](const std::string& name) {
        const auto dot = name.rfind('.');
        const auto ext = dot == std::string::npos ? std::string() : name.substr(dot + 1);
        return (ext == "png" || ext == "PNG") ? "image/png" : "image/jpeg";
    };
    httplib::MultipartFormDataItems items{
        {"participant_id", draft.participant_id, "", ""},
        {"study_id", draft.study_id, "", ""},
        {"metadata", draft.metadata.dump(), "metadata.json", "application/json"},
        {"before", read_file(draft.before_path), draft.before_name, mime(draft.before_name)},
        {"after", read_file(draft.after_path), draft.after_name, mime(draft.after_name)},
    };
    auto headers = impl_->headers;
    headers.emplace("Idempotency-Key", draft.idempotency_key);
    return impl_->finish(impl_->http.Post("/api/v1/occasions", headers, items), "upload " + draft.local_id);
}

} // namespace tada::client
