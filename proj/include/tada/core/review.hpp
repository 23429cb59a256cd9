#pragma once

#include <span>
#include <vector>

#include "tada/core/errors.hpp"
#include "tada/core/types.hpp"

namespace tada {

class UnknownPrediction : public Error {
public:
    explicit UnknownPrediction(PredictionId id)
        : Error("unknown prediction id: " + id), id_(std::move(id)) {}

    const PredictionId& prediction_id() const noexcept { return id_; }

private:
    PredictionId id_;
};

class DuplicateVerdict : public Error {
public:
    explicit DuplicateVerdict(PredictionId id)
        : Error("more than one verdict for prediction id: " + id), id_(std::move(id)) {}

    const PredictionId& prediction_id() const noexcept { return id_; }

private:
    PredictionId id_;
};

/// Applies participant verdicts to server predictions.
///
/// Output keeps predictions in their original order (Confirmed with the
/// original label, Relabeled with the new one, Removed dropped), followed by
/// the additions in submission order. A prediction without a verdict is not
/// part of the output; the server rejects such reviews before merging.
std::vector<ConfirmedFood> merge_review(std::span<const PredictedFood> predictions, const ParticipantReview& review);

} // namespace tada
