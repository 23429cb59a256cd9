#include "tada/analysis/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace tada::analysis {

std::string_view to_string(EstimateClass c) noexcept {
    switch (c) {
    case EstimateClass::Over: return "over";
    case EstimateClass::Under: return "under";
    case EstimateClass::Exact: return "exact";
    }
    return "?";
}

double error_fraction(const EvaluationRecord& record) {
    if (!(record.groundtruth_kcal > 0.0)) throw NonPositiveGroundtruth(record.occasion_id);
    return std::abs(record.estimated_kcal - record.groundtruth_kcal) / record.groundtruth_kcal;
}

double mean_error_rate(std::span<const EvaluationRecord> records) {
    if (records.empty()) throw EmptyInput();
    // Neumaier-compensated sum.
    double sum = 0.0;
    double compensation = 0.0;
    for (const auto& r : records) {
        const double term = error_fraction(r);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            compensation += (sum - t) + term;
        else
            compensation += (term - t) + sum;
        sum = t;
    }
    return 100.0 * (sum + compensation) / static_cast<double>(records.size());
}

EstimateClass classify_estimate(const EvaluationRecord& record, double tolerance_fraction) {
    const double gt = record.groundtruth_kcal;
    if (record.estimated_kcal > gt * (1.0 + tolerance_fraction)) return EstimateClass::Over;
    if (record.estimated_kcal < gt * (1.0 - tolerance_fraction)) return EstimateClass::Under;
    return EstimateClass::Exact;
}

namespace {

double parse_number(std::string_view text, std::size_t line_no, const char* field) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        throw InvalidValue(field, "line " + std::to_string(line_no) + ": not a number '" + std::string(text) + "'");
    return value;
}

std::string shortest(double value) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

} // namespace

std::vector<EvaluationRecord> read_records_csv(std::istream& in) {
    std::vector<EvaluationRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line_no == 1 && line.starts_with("occasion_id,")) continue;
        const auto cells = split(line);
        if (cells.size() != 4)
            throw InvalidValue("records", "line " + std::to_string(line_no) + ": expected 4 columns");
        EvaluationRecord r{cells[0], parse_number(cells[1], line_no, "groundtruth_kcal"),
                           parse_number(cells[2], line_no, "estimated_kcal"), cells[3]};
        if (!(r.groundtruth_kcal > 0.0)) throw NonPositiveGroundtruth(r.occasion_id);
        if (r.estimated_kcal < 0.0)
            throw InvalidValue("estimated_kcal", "line " + std::to_string(line_no) + ": must be >= 0");
        out.push_back(std::move(r));
    }
    return out;
}

void write_metrics_csv(std::ostream& out, std::span<const EvaluationRecord> records, double tolerance_fraction) {
    out << "occasion_id,groundtruth_kcal,estimated_kcal,error_fraction,classification\n";
    for (const auto& r : records) {
        out << r.occasion_id << ',' << shortest(r.groundtruth_kcal) << ',' << shortest(r.estimated_kcal) << ','
            << shortest(error_fraction(r)) << ',' << to_string(classify_estimate(r, tolerance_fraction)) << '\n';
    }
}

} // namespace tada::analysis
