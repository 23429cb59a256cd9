#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada::food {

struct FoodItem {
    FoodCode code;
    std::string name;
    std::optional<double> energy_kcal_per_100g;

    friend bool operator==(const FoodItem&, const FoodItem&) = default;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& reason)
        : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateCode : public Error {
public:
    explicit DuplicateCode(std::string code) : Error("duplicate food code " + code), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class EmptyEntry : public Error {
public:
    EmptyEntry() : Error("food entry is blank") {}
};

class Ambiguous : public Error {
public:
    explicit Ambiguous(std::vector<std::string> codes);

    const std::vector<std::string>& codes() const noexcept { return codes_; }

private:
    std::vector<std::string> codes_;
};

struct Matched {
    FoodItem item;
};
struct FreeText {
    std::string label;
};
using Resolution = std::variant<Matched, FreeText>;

/// Immutable pre-loaded food list. Codes are unique; names may repeat.
class FoodDatabase {
public:
    FoodDatabase() = default;
    /// Throws DuplicateCode on a repeated code.
    explicit FoodDatabase(std::vector<FoodItem> items);

    const std::vector<FoodItem>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }

    const FoodItem* find_code(std::string_view code) const;

    /// Items whose lowercased name contains the lowercased query, plus items
    /// whose code starts with the query when it is all digits. Query is
    /// trimmed; blank returns nothing. Ranked exact, then prefix, then other
    /// substring hits; each tier by lowercased name, then code.
    std::vector<FoodItem> search(std::string_view query) const;

    /// Exact code, else unique case-insensitive name, else FreeText.
    /// Throws EmptyEntry or Ambiguous.
    Resolution resolve(std::string_view entry) const;

private:
    std::vector<FoodItem> items_;
    std::vector<std::string> lowered_names_;
    std::unordered_map<std::string, std::size_t> code_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> name_index_;
};

/// Parses the `code,name,energy_kcal_per_100g` CSV. Throws ParseError / DuplicateCode.
FoodDatabase load_food_list(std::istream& in);
FoodDatabase load_food_list(const std::filesystem::path& path);

std::string to_lower_ascii(std::string_view text);
std::string_view trim(std::string_view text) noexcept;

} // namespace tada::food
