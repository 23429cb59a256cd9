#include "tada/core/image.hpp"

#include <array>
#include <cstdint>

namespace tada {

namespace {

std::uint32_t byte_at(std::span<const std::byte> b, std::size_t i) { return std::to_integer<std::uint32_t>(b[i]); }

std::uint32_t be32(std::span<const std::byte> b, std::size_t i) {
    return (byte_at(b, i) << 24) | (byte_at(b, i + 1) << 16) | (byte_at(b, i + 2) << 8) | byte_at(b, i + 3);
}

std::uint32_t be16(std::span<const std::byte> b, std::size_t i) { return (byte_at(b, i) << 8) | byte_at(b, i + 1); }

constexpr std::array<std::uint8_t, 8> kPngSignature{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};

ImageInfo probe_png(std::span<const std::byte> b) {
    // signature(8) length(4) "IHDR"(4) width(4) height(4)
    if (b.size() < 24) throw DecodeError("truncated PNG header");
    if (byte_at(b, 12) != 'I' || byte_at(b, 13) != 'H' || byte_at(b, 14) != 'D' || byte_at(b, 15) != 'R')
        throw DecodeError("PNG does not start with IHDR");
    const std::uint32_t w = be32(b, 16);
    const std::uint32_t h = be32(b, 20);
    if (w == 0 || h == 0 || w > 0x7fffffff || h > 0x7fffffff) throw DecodeError("PNG has invalid dimensions");
    return {MediaType::Png, static_cast<int>(w), static_cast<int>(h)};
}

bool is_sof(std::uint32_t marker) {
    return marker >= 0xC0 && marker <= 0xCF && marker != 0xC4 && marker != 0xC8 && marker != 0xCC;
}

ImageInfo probe_jpeg(std::span<const std::byte> b) {
    std::size_t pos = 2;
    while (pos < b.size()) {
        if (byte_at(b, pos) != 0xFF) throw DecodeError("JPEG marker expected");
        while (pos < b.size() && byte_at(b, pos) == 0xFF) ++pos;
        if (pos >= b.size()) break;
        const std::uint32_t marker = byte_at(b, pos++);
        if (marker == 0xD9 || marker == 0xDA) break; // EOI / SOS before any frame header
        if (marker == 0x01 || (marker >= 0xD0 && marker <= 0xD7)) continue;
        if (pos + 2 > b.size()) break;
        const std::uint32_t length = be16(b, pos);
        if (length < 2) throw DecodeError("JPEG segment length < 2");
        if (is_sof(marker)) {
            if (pos + 7 > b.size()) break;
            const std::uint32_t h = be16(b, pos + 3);
            const std::uint32_t w = be16(b, pos + 5);
            if (w == 0 || h == 0) throw DecodeError("JPEG has invalid dimensions");
            return {MediaType::Jpeg, static_cast<int>(w), static_cast<int>(h)};
        }
        pos += length;
    }
    throw DecodeError("JPEG frame header not found");
}

} // namespace

ImageInfo probe_image(std::span<const std::byte> bytes) {
    if (bytes.size() >= kPngSignature.size()) {
        bool png = true;
        for (std::size_t i = 0; i < kPngSignature.size(); ++i) png = png && byte_at(bytes, i) == kPngSignature[i];
        if (png) return probe_png(bytes);
    }
    if (bytes.size() >= 3 && byte_at(bytes, 0) == 0xFF && byte_at(bytes, 1) == 0xD8 && byte_at(bytes, 2) == 0xFF)
        return probe_jpeg(bytes);
    throw DecodeError("not a JPEG or PNG image");
}

} // namespace tada
