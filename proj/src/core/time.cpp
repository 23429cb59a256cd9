#include "tada/core/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "tada/core/errors.hpp"

namespace tada {

namespace {

[[noreturn]] void bad(std::string_view text, const char* why) {
    throw InvalidValue("timestamp", std::string(why) + " in '" + std::string(text) + "'");
}

int digits(std::string_view text, std::size_t pos, std::size_t count) {
    if (pos + count > text.size()) bad(text, "truncated");
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) bad(text, "expected digit");
        value = value * 10 + (text[i] - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || (text[pos] != c && std::tolower(static_cast<unsigned char>(text[pos])) != c))
        bad(text, "malformed");
}

} // namespace

Timestamp Timestamp::now() {
    return Timestamp(std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now()));
}

Timestamp Timestamp::parse(std::string_view text) {
    using namespace std::chrono;
    const int y = digits(text, 0, 4);
    expect(text, 4, '-');
    const int mo = digits(text, 5, 2);
    expect(text, 7, '-');
    const int d = digits(text, 8, 2);
    expect(text, 10, 't');
    const int hh = digits(text, 11, 2);
    expect(text, 13, ':');
    const int mm = digits(text, 14, 2);
    expect(text, 16, ':');
    const int ss = digits(text, 17, 2);
    std::size_t pos = 19;

    int millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        int scale = 100;
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            millis += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == start) bad(text, "empty fraction");
    }

    int offset_min = 0;
    if (pos >= text.size()) bad(text, "missing zone");
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '+' ? 1 : -1;
        const int oh = digits(text, pos + 1, 2);
        expect(text, pos + 3, ':');
        const int om = digits(text, pos + 4, 2);
        if (oh > 23 || om > 59) bad(text, "bad offset");
        offset_min = sign * (oh * 60 + om);
        pos += 6;
    } else {
        bad(text, "bad zone");
    }
    if (pos != text.size()) bad(text, "trailing characters");

    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) bad(text, "invalid date");
    if (hh > 23 || mm > 59 || ss > 59) bad(text, "invalid time");

    const auto tp = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis} - minutes{offset_min};
    return Timestamp(time_point_cast<milliseconds>(tp));
}

std::string Timestamp::to_string() const {
    using namespace std::chrono;
    const auto day_point = floor<days>(tp_);
    const year_month_day ymd{day_point};
    auto rest = tp_ - day_point;
    const auto h = duration_cast<hours>(rest);
    rest -= h;
    const auto m = duration_cast<minutes>(rest);
    rest -= m;
    const auto s = duration_cast<seconds>(rest);
    rest -= s;
    const auto ms = duration_cast<milliseconds>(rest).count();

    char buf[40];
    if (ms != 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                      static_cast<int>(m.count()), static_cast<int>(s.count()), static_cast<int>(ms));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                      static_cast<int>(m.count()), static_cast<int>(s.count()));
    }
    return buf;
}

} // namespace tada
