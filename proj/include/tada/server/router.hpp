#pragma once

#include <functional>
#include <regex>
#include <vector>

#include "tada/server/api.hpp"
#include "tada/server/service.hpp"

namespace tada::server {

enum class Role { Participant, Researcher };

/// Maps `/api/v1/` requests onto the Service. Independent of the HTTP
/// transport so the same routing runs in-process in tests.
class Router {
public:
    explicit Router(Service& service);

    Response handle(const Request& request) const;

private:
    using Handler = std::function<Response(const Request&, const std::smatch&)>;

    struct Route {
        std::string method;
        std::regex pattern;
        bool participant_allowed;
        Handler handler;
    };

    Role authenticate(const Request& request) const;

    Service& service_;
    std::vector<Route> routes_;
};

} // namespace tada::server
