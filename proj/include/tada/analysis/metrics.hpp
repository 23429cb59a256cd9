#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada::analysis {

struct EvaluationRecord {
    OccasionId occasion_id;
    double groundtruth_kcal = 0.0;
    double estimated_kcal = 0.0;
    std::string estimator_id;
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("no evaluation records") {}
};

class NonPositiveGroundtruth : public Error {
public:
    explicit NonPositiveGroundtruth(const std::string& occasion_id)
        : Error("groundtruth_kcal must be > 0 (occasion " + occasion_id + ")") {}
};

enum class EstimateClass { Over, Under, Exact };

std::string_view to_string(EstimateClass c) noexcept;

/// |estimated - groundtruth| / groundtruth.
double error_fraction(const EvaluationRecord& record);

/// Mean absolute percentage error: 100 * mean(|est - gt| / gt).
double mean_error_rate(std::span<const EvaluationRecord> records);

/// Over above gt * (1 + tol), Under below gt * (1 - tol), Exact otherwise.
EstimateClass classify_estimate(const EvaluationRecord& record, double tolerance_fraction = 0.0);

/// Reads `occasion_id,groundtruth_kcal,estimated_kcal,estimator_id`.
std::vector<EvaluationRecord> read_records_csv(std::istream& in);

/// Writes `occasion_id,groundtruth_kcal,estimated_kcal,error_fraction,classification`.
void write_metrics_csv(std::ostream& out, std::span<const EvaluationRecord> records, double tolerance_fraction = 0.0);

} // namespace tada::analysis
