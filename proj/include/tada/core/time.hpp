#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tada {

/// UTC instant with millisecond resolution, serialized as RFC 3339.
class Timestamp {
public:
    using Clock = std::chrono::system_clock;
    using TimePoint = std::chrono::time_point<Clock, std::chrono::milliseconds>;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(TimePoint tp) : tp_(tp) {}

    static Timestamp now();
    static Timestamp from_unix_ms(std::int64_t ms) { return Timestamp(TimePoint(std::chrono::milliseconds(ms))); }

    /// Accepts `YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM)`; throws InvalidValue otherwise.
    static Timestamp parse(std::string_view text);

    /// Always emits UTC with a `Z` suffix; milliseconds only when non-zero.
    std::string to_string() const;

    std::int64_t unix_ms() const { return tp_.time_since_epoch().count(); }
    TimePoint time_point() const { return tp_; }

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    TimePoint tp_{};
};

} // namespace tada
