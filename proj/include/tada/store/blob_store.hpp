#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada::store {

class StoreUnavailable : public Error {
public:
    using Error::Error;
};

struct BlobRef {
    std::string content_hash;
    std::uint64_t byte_length = 0;
    std::optional<MediaType> media_type;

    friend bool operator==(const BlobRef&, const BlobRef&) = default;
};

/// Content-addressed files under `<root>/<first 2 hash chars>/<hash>`.
/// Writes go through a temp file and rename, so a blob is either absent or
/// complete; existing blobs are never rewritten.
class BlobStore {
public:
    explicit BlobStore(std::filesystem::path root);

    BlobRef put(std::span<const std::byte> bytes, std::optional<MediaType> media_type = std::nullopt);
    BlobRef put(std::string_view bytes, std::optional<MediaType> media_type = std::nullopt);

    /// nullopt for unknown or malformed hashes.
    std::optional<std::string> get(std::string_view content_hash) const;
    bool contains(std::string_view content_hash) const;

    std::filesystem::path path_for(std::string_view content_hash) const;
    const std::filesystem::path& root() const noexcept { return root_; }

    static bool is_hash(std::string_view text) noexcept;

private:
    std::filesystem::path root_;
};

} // namespace tada::store
