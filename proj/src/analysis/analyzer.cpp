#include "tada/analysis/analyzer.hpp"

#include <fstream>
#include <sstream>

#include "tada/core/json.hpp"
#include "tada/core/validation.hpp"

namespace tada::analysis {

namespace {

bool safe_name(const std::string& name) {
    return !name.empty() && name != "." && name != ".." && name.find('/') == std::string::npos &&
           name.find('\\') == std::string::npos;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string_view to_string(AnalyzerKind kind) noexcept {
    switch (kind) {
    case AnalyzerKind::SidecarStub: return "SidecarStub";
    case AnalyzerKind::GridStub: return "GridStub";
    case AnalyzerKind::External: return "External";
    }
    return "?";
}

AnalyzerKind parse_analyzer_kind(std::string_view text) {
    if (text == "SidecarStub" || text == "sidecar") return AnalyzerKind::SidecarStub;
    if (text == "GridStub" || text == "grid") return AnalyzerKind::GridStub;
    if (text == "External" || text == "external") return AnalyzerKind::External;
    throw InvalidValue("analyzer.kind", "unknown analyzer kind '" + std::string(text) + "'");
}

std::vector<PredictedFood> parse_sidecar(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidSidecar(std::string("sidecar is not valid JSON: ") + e.what());
    }
    if (!doc.is_array()) throw InvalidSidecar("sidecar must be a JSON array");

    std::vector<PredictedFood> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& entry = doc[i];
        const auto where = "sidecar entry " + std::to_string(i);
        if (!entry.is_object()) throw InvalidSidecar(where + " is not an object");
        PredictedFood p;
        p.prediction_id = "p" + std::to_string(i + 1);
        try {
            p.label = entry.at("label").get<std::string>();
            p.pin = {entry.at("x_px").get<int>(), entry.at("y_px").get<int>()};
            p.confidence = entry.at("confidence").get<double>();
            if (const auto it = entry.find("food_code"); it != entry.end() && !it->is_null())
                p.food_code = FoodCode(it->get<std::string>());
        } catch (const Json::exception& e) {
            throw InvalidSidecar(where + ": " + e.what());
        } catch (const InvalidValue& e) {
            throw InvalidSidecar(where + ": " + e.what());
        }
        if (p.label.empty()) throw InvalidSidecar(where + ": label is empty");
        out.push_back(std::move(p));
    }
    return out;
}

SidecarStubAnalyzer::SidecarStubAnalyzer(std::string analyzer_id, std::filesystem::path sidecar_dir)
    : ref_{std::move(analyzer_id), AnalyzerKind::SidecarStub}, sidecar_dir_(std::move(sidecar_dir)) {}

std::vector<std::filesystem::path> SidecarStubAnalyzer::candidates(const AnalysisInput& input) const {
    std::vector<std::filesystem::path> out;
    if (input.source_path) out.push_back(std::filesystem::path(input.source_path->string() + ".predictions.json"));
    if (!sidecar_dir_.empty()) {
        if (safe_name(input.image_name)) out.push_back(sidecar_dir_ / (input.image_name + ".predictions.json"));
        if (!input.image.content_hash.empty())
            out.push_back(sidecar_dir_ / (input.image.content_hash + ".predictions.json"));
    }
    return out;
}

std::vector<PredictedFood> SidecarStubAnalyzer::predict(const AnalysisInput& input, const CaptureMetadata&) const {
    for (const auto& path : candidates(input)) {
        std::error_code ec;
        if (std::filesystem::is_regular_file(path, ec)) return parse_sidecar(read_file(path));
    }
    throw SidecarMissing("no sidecar predictions for image '" + input.image_name + "'");
}

GridStubAnalyzer::GridStubAnalyzer(std::string analyzer_id) : ref_{std::move(analyzer_id), AnalyzerKind::GridStub} {}

std::vector<PredictedFood> GridStubAnalyzer::predict(const AnalysisInput& input, const CaptureMetadata&) const {
    PredictedFood p;
    p.prediction_id = "p1";
    p.label = "unknown food";
    p.pin = {input.image.width_px / 2, input.image.height_px / 2};
    p.confidence = 0.5;
    return {p};
}

std::unique_ptr<Analyzer> make_analyzer(const AnalyzerRef& ref, const std::filesystem::path& sidecar_dir) {
    switch (ref.kind) {
    case AnalyzerKind::SidecarStub: return std::make_unique<SidecarStubAnalyzer>(ref.analyzer_id, sidecar_dir);
    case AnalyzerKind::GridStub: return std::make_unique<GridStubAnalyzer>(ref.analyzer_id);
    case AnalyzerKind::External: break;
    }
    throw AnalyzerUnavailable("no built-in implementation for external analyzer '" + ref.analyzer_id + "'");
}

std::vector<PredictedFood> analyze(const AnalysisInput& input, const CaptureMetadata& metadata, const Analyzer& analyzer) {
    const auto info = probe_image(input.bytes);
    if (info.width_px != input.image.width_px || info.height_px != input.image.height_px ||
        info.media_type != input.image.media_type)
        throw DecodeError("image bytes do not match the recorded dimensions or media type");

    auto predictions = analyzer.predict(input, metadata);
    for (const auto& p : predictions) {
        if (!validate_pin(p.pin, input.image).empty())
            throw InvalidSidecar("prediction " + p.prediction_id + " pin lies outside the image");
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
            throw InvalidSidecar("prediction " + p.prediction_id + " confidence outside [0, 1]");
    }
    return predictions;
}

} // namespace tada::analysis
