#include "tada/core/review.hpp"

#include <algorithm>
#include <unordered_map>

namespace tada {

std::vector<ConfirmedFood> merge_review(std::span<const PredictedFood> predictions, const ParticipantReview& review) {
    std::unordered_map<PredictionId, const Verdict*> verdicts;
    for (const auto& v : review.verdicts) {
        const bool known = std::any_of(predictions.begin(), predictions.end(),
                                       [&](const PredictedFood& p) { return p.prediction_id == v.prediction_id; });
        if (!known) throw UnknownPrediction(v.prediction_id);
        if (!verdicts.emplace(v.prediction_id, &v.verdict).second) throw DuplicateVerdict(v.prediction_id);
    }

    std::vector<ConfirmedFood> out;
    out.reserve(predictions.size() + review.additions.size());
    for (const auto& p : predictions) {
        const auto it = verdicts.find(p.prediction_id);
        if (it == verdicts.end()) continue;
        const Verdict& verdict = *it->second;
        if (std::holds_alternative<Confirmed>(verdict))
            out.push_back({p.label, p.pin});
        else if (const auto* r = std::get_if<Relabeled>(&verdict))
            out.push_back({r->new_label, p.pin});
    }
    for (const auto& a : review.additions) out.push_back({a.label, a.pin});
    return out;
}

} // namespace tada
