#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tada/core/errors.hpp"
#include "tada/core/image.hpp"
#include "tada/core/types.hpp"

namespace tada::analysis {

enum class AnalyzerKind { SidecarStub, GridStub, External };

std::string_view to_string(AnalyzerKind kind) noexcept;
AnalyzerKind parse_analyzer_kind(std::string_view text);

struct AnalyzerRef {
    std::string analyzer_id;
    AnalyzerKind kind = AnalyzerKind::GridStub;
};

class SidecarMissing : public Error {
public:
    using Error::Error;
};

/// Sidecar present but unusable (bad JSON, pin outside the image, ...).
class InvalidSidecar : public Error {
public:
    using Error::Error;
};

class AnalyzerUnavailable : public Error {
public:
    using Error::Error;
};

/// The before image as the analyzer sees it.
struct AnalysisInput {
    ImageCapture image;
    std::span<const std::byte> bytes;
    /// Upload file name (base name only); sidecar lookup key.
    std::string image_name;
    /// Set when analyzing a file on disk; a sidecar next to it wins.
    std::optional<std::filesystem::path> source_path;
};

class Analyzer {
public:
    virtual ~Analyzer() = default;

    virtual const AnalyzerRef& ref() const noexcept = 0;

    /// Predictions for the before image. Implementations must be
    /// deterministic in (bytes, metadata).
    virtual std::vector<PredictedFood> predict(const AnalysisInput& input, const CaptureMetadata& metadata) const = 0;
};

/// Returns exactly the predictions in `<image>.predictions.json`:
/// a JSON array of {label, x_px, y_px, confidence[, food_code]}.
class SidecarStubAnalyzer final : public Analyzer {
public:
    SidecarStubAnalyzer(std::string analyzer_id, std::filesystem::path sidecar_dir);

    const AnalyzerRef& ref() const noexcept override { return ref_; }
    std::vector<PredictedFood> predict(const AnalysisInput& input, const CaptureMetadata& metadata) const override;

    /// Candidate sidecar paths in lookup order.
    std::vector<std::filesystem::path> candidates(const AnalysisInput& input) const;

private:
    AnalyzerRef ref_;
    std::filesystem::path sidecar_dir_;
};

/// One "unknown food" prediction at the image center, confidence 0.5.
class GridStubAnalyzer final : public Analyzer {
public:
    explicit GridStubAnalyzer(std::string analyzer_id = "grid-stub");

    const AnalyzerRef& ref() const noexcept override { return ref_; }
    std::vector<PredictedFood> predict(const AnalysisInput& input, const CaptureMetadata& metadata) const override;

private:
    AnalyzerRef ref_;
};

/// Builds an analyzer for `ref`. External kinds are declared but have no
/// built-in implementation and raise AnalyzerUnavailable.
std::unique_ptr<Analyzer> make_analyzer(const AnalyzerRef& ref, const std::filesystem::path& sidecar_dir);

/// Verifies the bytes decode to the declared image, runs the analyzer and
/// checks its output (pins inside the image, confidence in [0, 1]).
/// Throws DecodeError, SidecarMissing, InvalidSidecar.
std::vector<PredictedFood> analyze(const AnalysisInput& input, const CaptureMetadata& metadata, const Analyzer& analyzer);

/// Parses a sidecar document; prediction ids are p1..pn in array order.
std::vector<PredictedFood> parse_sidecar(std::string_view text);

} // namespace tada::analysis
