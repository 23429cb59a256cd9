#pragma once

#include <cstddef>
#include <span>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada {

class DecodeError : public Error {
public:
    using Error::Error;
};

struct ImageInfo {
    MediaType media_type = MediaType::Jpeg;
    int width_px = 0;
    int height_px = 0;
};

/// Reads media type and dimensions from a PNG IHDR or a JPEG SOFn segment.
/// No pixel decoding. Throws DecodeError for anything else.
ImageInfo probe_image(std::span<const std::byte> bytes);

} // namespace tada
