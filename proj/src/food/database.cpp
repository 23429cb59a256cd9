#include "tada/food/database.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <tuple>

namespace tada::food {

namespace {

constexpr std::string_view kHeader = "code,name,energy_kcal_per_100g";

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) {
        if (!out.empty()) out += ", ";
        out += p;
    }
    return out;
}

// RFC 4180 fields on one physical line.
std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string current;
    std::size_t i = 0;
    bool field_start = true;
    bool quoted = false;
    while (i < line.size()) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    i += 2;
                    continue;
                }
                quoted = false;
                ++i;
                if (i < line.size() && line[i] != ',') throw ParseError(line_no, "characters after closing quote");
                continue;
            }
            current.push_back(c);
            ++i;
            continue;
        }
        if (c == '"') {
            if (!field_start) throw ParseError(line_no, "quote inside unquoted field");
            quoted = true;
            field_start = false;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
            field_start = true;
            ++i;
        } else {
            current.push_back(c);
            field_start = false;
            ++i;
        }
    }
    if (quoted) throw ParseError(line_no, "unterminated quoted field");
    fields.push_back(std::move(current));
    return fields;
}

FoodItem parse_row(std::string_view line, std::size_t line_no) {
    auto fields = split_csv_line(line, line_no);
    if (fields.size() != 3)
        throw ParseError(line_no, "expected 3 fields, found " + std::to_string(fields.size()));

    const auto code = trim(fields[0]);
    if (!FoodCode::is_valid(code)) throw ParseError(line_no, "code must be 1-8 digits, got '" + std::string(code) + "'");

    const auto name = trim(fields[1]);
    if (name.empty()) throw ParseError(line_no, "name is empty");

    std::optional<double> energy;
    const auto energy_text = trim(fields[2]);
    if (!energy_text.empty()) {
        double value = 0.0;
        const auto* first = energy_text.data();
        const auto* last = first + energy_text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || !std::isfinite(value))
            throw ParseError(line_no, "energy is not a number: '" + std::string(energy_text) + "'");
        if (value < 0.0) throw ParseError(line_no, "energy must be >= 0");
        energy = value;
    }
    return FoodItem{FoodCode(std::string(code)), std::string(name), energy};
}

} // namespace

Ambiguous::Ambiguous(std::vector<std::string> codes)
    : Error("name matches several food codes: " + join(codes)), codes_(std::move(codes)) {}

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (auto& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

std::string_view trim(std::string_view text) noexcept {
    constexpr std::string_view ws = " \t\r\n\f\v";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

FoodDatabase::FoodDatabase(std::vector<FoodItem> items) : items_(std::move(items)) {
    lowered_names_.reserve(items_.size());
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (!code_index_.emplace(items_[i].code.str(), i).second) throw DuplicateCode(items_[i].code.str());
        lowered_names_.push_back(to_lower_ascii(items_[i].name));
        name_index_[lowered_names_.back()].push_back(i);
    }
}

const FoodItem* FoodDatabase::find_code(std::string_view code) const {
    const auto it = code_index_.find(std::string(code));
    return it == code_index_.end() ? nullptr : &items_[it->second];
}

std::vector<FoodItem> FoodDatabase::search(std::string_view raw_query) const {
    const auto query = to_lower_ascii(trim(raw_query));
    if (query.empty()) return {};
    const bool numeric = all_digits(query);

    // (tier, lowered name, code, index); tier 0 exact, 1 prefix, 2 substring.
    std::vector<std::tuple<int, std::string_view, std::string_view, std::size_t>> hits;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        const auto& name = lowered_names_[i];
        const auto& code = items_[i].code.str();
        int tier = 3;
        if (const auto pos = name.find(query); pos != std::string::npos)
            tier = name.size() == query.size() ? 0 : (pos == 0 ? 1 : 2);
        if (numeric && code.starts_with(query)) tier = std::min(tier, code.size() == query.size() ? 0 : 1);
        if (tier < 3) hits.emplace_back(tier, name, code, i);
    }
    std::sort(hits.begin(), hits.end());

    std::vector<FoodItem> out;
    out.reserve(hits.size());
    for (const auto& hit : hits) out.push_back(items_[std::get<3>(hit)]);
    return out;
}

Resolution FoodDatabase::resolve(std::string_view raw_entry) const {
    const auto entry = trim(raw_entry);
    if (entry.empty()) throw EmptyEntry();

    if (const auto* item = find_code(entry)) return Matched{*item};

    const auto it = name_index_.find(to_lower_ascii(entry));
    if (it == name_index_.end()) return FreeText{std::string(entry)};
    if (it->second.size() > 1) {
        std::vector<std::string> codes;
        for (const auto i : it->second) codes.push_back(items_[i].code.str());
        std::sort(codes.begin(), codes.end());
        throw Ambiguous(std::move(codes));
    }
    return Matched{items_[it->second.front()]};
}

FoodDatabase load_food_list(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw ParseError(1, "header must be '" + std::string(kHeader) + "'");

    std::vector<FoodItem> items;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        items.push_back(parse_row(line, line_no));
    }
    return FoodDatabase(std::move(items));
}

FoodDatabase load_food_list(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    return load_food_list(in);
}

} // namespace tada::food
