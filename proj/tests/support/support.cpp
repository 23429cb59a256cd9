#include "support.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tada::test {

namespace fs = std::filesystem;

namespace {

std::uint32_t crc32(const std::string& data, std::size_t from, std::size_t to) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) {
            std::uint32_t c = n;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[n] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = from; i < to; ++i) c = table[(c ^ static_cast<unsigned char>(data[i])) & 0xFF] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

void put32(std::string& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
}

void put16(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void chunk(std::string& out, const char* type, const std::string& payload) {
    put32(out, static_cast<std::uint32_t>(payload.size()));
    const auto start = out.size();
    out.append(type, 4);
    out += payload;
    put32(out, crc32(out, start, out.size()));
}

// zlib stream of stored (uncompressed) deflate blocks.
std::string zlib_stored(const std::string& raw) {
    std::string out{"\x78\x01", 2};
    std::size_t pos = 0;
    do {
        const std::size_t n = std::min<std::size_t>(65535, raw.size() - pos);
        const bool last = pos + n == raw.size();
        out.push_back(last ? 1 : 0);
        out.push_back(static_cast<char>(n & 0xFF));
        out.push_back(static_cast<char>(n >> 8));
        out.push_back(static_cast<char>(~n & 0xFF));
        out.push_back(static_cast<char>((~n >> 8) & 0xFF));
        out.append(raw, pos, n);
        pos += n;
    } while (pos < raw.size());
    std::uint32_t a = 1, b = 0;
    for (unsigned char c : raw) {
        a = (a + c) % 65521;
        b = (b + a) % 65521;
    }
    put32(out, (b << 16) | a);
    return out;
}

bool send_all(int fd, const std::string& data) {
    std::size_t sent = 0;
    while (sent < data.size()) {
        const auto n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) return false;
        sent += static_cast<std::size_t>(n);
    }
    return true;
}

// Reads one HTTP message (headers + Content-Length body) from fd.
bool read_message(int fd, std::string& out) {
    out.clear();
    char buf[65536];
    std::size_t header_end = std::string::npos;
    std::size_t total = std::string::npos;
    while (total == std::string::npos || out.size() < total) {
        const auto n = ::recv(fd, buf, sizeof buf, 0);
        if (n <= 0) return total == std::string::npos ? false : out.size() >= total;
        out.append(buf, static_cast<std::size_t>(n));
        if (header_end == std::string::npos) {
            header_end = out.find("\r\n\r\n");
            if (header_end == std::string::npos) continue;
            std::string headers = out.substr(0, header_end);
            for (auto& c : headers) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            std::size_t length = 0;
            if (const auto p = headers.find("\r\ncontent-length:"); p != std::string::npos)
                length = std::stoul(headers.substr(p + 17));
            total = header_end + 4 + length;
        }
    }
    return true;
}

int connect_loopback(int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        return -1;
    }
    return fd;
}

} // namespace

std::string make_png(int width, int height, std::uint32_t salt) {
    std::string out{"\x89PNG\r\n\x1a\n", 8};
    std::string ihdr;
    put32(ihdr, static_cast<std::uint32_t>(width));
    put32(ihdr, static_cast<std::uint32_t>(height));
    ihdr += std::string{"\x08\x00\x00\x00\x00", 5}; // 8-bit grayscale
    chunk(out, "IHDR", ihdr);
    std::string raw;
    raw.reserve(static_cast<std::size_t>(height) * (width + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        for (int x = 0; x < width; ++x) raw.push_back(static_cast<char>((x * 7 + y * 13 + salt * 31) & 0xFF));
    }
    chunk(out, "IDAT", zlib_stored(raw));
    chunk(out, "IEND", "");
    return out;
}

std::string make_jpeg(int width, int height, std::uint32_t salt) {
    std::string out{"\xFF\xD8", 2};
    // APP0 carrying the salt so different salts hash differently.
    out += std::string{"\xFF\xE0", 2};
    put16(out, 6);
    put32(out, salt);
    out += std::string{"\xFF\xC0", 2};
    put16(out, 11);
    out.push_back(8);
    put16(out, static_cast<std::uint32_t>(height));
    put16(out, static_cast<std::uint32_t>(width));
    out.push_back(1);
    out += std::string{"\x01\x11\x00", 3};
    out += std::string{"\xFF\xD9", 2};
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
}

fs::path data_dir() { return TADA_TEST_DATA_DIR; }

TempDir::TempDir() {
    std::string pattern = (fs::temp_directory_path() / "tada-test-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

server::ServerConfig test_config(const fs::path& root, server::AnalysisMode mode) {
    server::ServerConfig c;
    c.host = "127.0.0.1";
    c.port = 0;
    c.data_dir = root / "data";
    c.blob_dir = root / "blobs";
    c.participant_token = kParticipantToken;
    c.researcher_token = kResearcherToken;
    c.analyzer = {"sidecar-stub", analysis::AnalyzerKind::SidecarStub};
    c.sidecar_dir = root / "sidecars";
    fs::create_directories(c.sidecar_dir);
    c.analysis_mode = mode;
    c.studies = {{"demo", data_dir() / "foods.csv"}};
    return c;
}

TestServer::TestServer(server::AnalysisMode mode) : config_(test_config(dir_.path(), mode)) {
    service_ = server::Service::from_config(config_);
    router_ = std::make_unique<server::Router>(*service_);
    http_ = std::make_unique<server::HttpServer>(*router_, config_);
    port_ = http_->start();
}

TestServer::~TestServer() {
    http_->stop();
    service_->drain();
}

server::Request make_request(const std::string& method, const std::string& path, const std::string& token,
                             const std::string& body, std::map<std::string, std::string> query) {
    server::Request r;
    r.method = method;
    r.path = path;
    r.query = std::move(query);
    if (!token.empty()) r.headers["authorization"] = "Bearer " + token;
    r.body = body;
    return r;
}

server::Request upload_request(const UploadParts& parts, const std::string& token) {
    auto r = make_request("POST", "/api/v1/occasions", token);
    r.parts["participant_id"] = {"", "", parts.participant_id};
    r.parts["study_id"] = {"", "", parts.study_id};
    r.parts["metadata"] = {"metadata.json", "application/json", parts.metadata.dump()};
    if (parts.before) r.parts["before"] = {parts.before_name, "image/png", *parts.before};
    if (parts.after) r.parts["after"] = {parts.after_name, "image/png", *parts.after};
    if (parts.idempotency_key) r.headers["idempotency-key"] = *parts.idempotency_key;
    return r;
}

Json body_of(const server::Response& response) { return Json::parse(response.body); }

void write_sidecar(const fs::path& dir, const std::string& image_name, const Json& predictions) {
    write_file(dir / (image_name + ".predictions.json"), predictions.dump());
}

FaultProxy::FaultProxy(int upstream_port) : upstream_port_(upstream_port) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = 0;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0)
        throw std::runtime_error("proxy bind failed");
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { run(); });
}

FaultProxy::~FaultProxy() {
    stopping_ = true;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    thread_.join();
}

void FaultProxy::run() {
    while (!stopping_) {
        pollfd p{listen_fd_, POLLIN, 0};
        if (::poll(&p, 1, 100) <= 0) continue;
        const int client = ::accept(listen_fd_, nullptr, nullptr);
        if (client < 0) continue;
        serve(client);
        ::close(client);
    }
}

void FaultProxy::serve(int client) {
    std::string request;
    if (!read_message(client, request)) return;
    const int upstream = connect_loopback(upstream_port_);
    if (upstream < 0) return;
    std::string response;
    const bool ok = send_all(upstream, request) && read_message(upstream, response);
    ::close(upstream);
    if (!ok) return;
    if (drop_responses > 0) {
        --drop_responses;
        ++dropped;
        return;
    }
    send_all(client, response);
    ++relayed;
}

} // namespace tada::test
