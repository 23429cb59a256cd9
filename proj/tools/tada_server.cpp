// HTTP server for the eating-occasion workflow.
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "tada/server/http_server.hpp"

namespace {

tada::server::HttpServer* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tada-server: image-based dietary assessment server"};
    std::string config_path;
    std::optional<int> port;
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("-p,--port", port, "Override the listen port");
    CLI11_PARSE(app, argc, argv);

    try {
        auto config = config_path.empty() ? tada::server::ServerConfig{} : tada::server::load_config(config_path);
        tada::server::apply_env_overrides(config, tada::server::process_env);
        if (port) config.port = *port;
        if (config.participant_token.empty() || config.researcher_token.empty()) {
            std::cerr << "tada-server: both participant and researcher tokens must be configured\n";
            return 2;
        }
        if (config.studies.empty()) {
            std::cerr << "tada-server: no studies configured\n";
            return 2;
        }

        auto service = tada::server::Service::from_config(config);
        tada::server::Router router(*service);
        tada::server::HttpServer server(router, config, &std::cout);
        g_server = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);

        std::cerr << "tada-server listening on " << config.host << ':' << config.port << '\n';
        if (!server.listen()) {
            std::cerr << "tada-server: cannot bind " << config.host << ':' << config.port << '\n';
            return 1;
        }
        g_server = nullptr;
        service->drain();
    } catch (const std::exception& e) {
        std::cerr << "tada-server: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
