#pragma once

// Deliberately naive reference implementations used to check the library.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tada/analysis/metrics.hpp"
#include "tada/food/database.hpp"

namespace tada::test {

inline std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Literal linear scan: name substring (case-insensitive) or code prefix for
// all-digit queries; tiers exact < prefix < substring, then name, then code.
inline std::vector<food::FoodItem> scan_foods(const std::vector<food::FoodItem>& items, std::string query) {
    while (!query.empty() && std::isspace(static_cast<unsigned char>(query.front()))) query.erase(0, 1);
    while (!query.empty() && std::isspace(static_cast<unsigned char>(query.back()))) query.pop_back();
    if (query.empty()) return {};
    const auto q = lower(query);
    const bool digits = std::all_of(q.begin(), q.end(), [](char c) { return c >= '0' && c <= '9'; });
    std::vector<std::pair<int, food::FoodItem>> hits;
    for (const auto& item : items) {
        const auto n = lower(item.name);
        const auto& code = item.code.str();
        int tier = 99;
        if (n == q)
            tier = 0;
        else if (n.rfind(q, 0) == 0)
            tier = 1;
        else if (n.find(q) != std::string::npos)
            tier = 2;
        if (digits && code.rfind(q, 0) == 0) tier = std::min(tier, code == q ? 0 : 1);
        if (tier != 99) hits.emplace_back(tier, item);
    }
    std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        const auto an = lower(a.second.name), bn = lower(b.second.name);
        if (an != bn) return an < bn;
        return a.second.code.str() < b.second.code.str();
    });
    std::vector<food::FoodItem> out;
    for (auto& h : hits) out.push_back(h.second);
    return out;
}

// Plain loop in long double.
inline double naive_mean_error_rate(std::span<const analysis::EvaluationRecord> records) {
    long double sum = 0;
    for (const auto& r : records) {
        const long double g = r.groundtruth_kcal, e = r.estimated_kcal;
        sum += (e > g ? e - g : g - e) / g;
    }
    return static_cast<double>(100.0L * sum / static_cast<long double>(records.size()));
}

// Box inside a width x height image with positive extent, in 64-bit.
inline bool box_fits(std::int64_t x, std::int64_t y, std::int64_t w, std::int64_t h, std::int64_t width,
                     std::int64_t height) {
    return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= width && y + h <= height;
}

} // namespace tada::test
