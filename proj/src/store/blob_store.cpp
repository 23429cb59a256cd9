#include "tada/store/blob_store.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "tada/util/sha256.hpp"

namespace tada::store {

namespace fs = std::filesystem;

BlobStore::BlobStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw StoreUnavailable("cannot create blob directory " + root_.string() + ": " + ec.message());
}

bool BlobStore::is_hash(std::string_view text) noexcept {
    if (text.size() != 64) return false;
    for (const char c : text)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

fs::path BlobStore::path_for(std::string_view content_hash) const {
    return root_ / std::string(content_hash.substr(0, 2)) / std::string(content_hash);
}

BlobRef BlobStore::put(std::span<const std::byte> bytes, std::optional<MediaType> media_type) {
    BlobRef ref{util::sha256_hex(bytes), bytes.size(), media_type};
    const auto target = path_for(ref.content_hash);
    std::error_code ec;
    if (fs::exists(target, ec)) return ref;

    fs::create_directories(target.parent_path(), ec);
    if (ec) throw StoreUnavailable("cannot create " + target.parent_path().string() + ": " + ec.message());

    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << ref.content_hash << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
             << counter++;
    const auto tmp = target.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            fs::remove(tmp, ec);
            throw StoreUnavailable("write failed for blob " + ref.content_hash);
        }
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw StoreUnavailable("rename failed for blob " + ref.content_hash);
    }
    return ref;
}

BlobRef BlobStore::put(std::string_view bytes, std::optional<MediaType> media_type) {
    return put(std::as_bytes(std::span(bytes.data(), bytes.size())), media_type);
}

std::optional<std::string> BlobStore::get(std::string_view content_hash) const {
    if (!is_hash(content_hash)) return std::nullopt;
    std::ifstream in(path_for(content_hash), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool BlobStore::contains(std::string_view content_hash) const {
    std::error_code ec;
    return is_hash(content_hash) && fs::is_regular_file(path_for(content_hash), ec);
}

} // namespace tada::store
