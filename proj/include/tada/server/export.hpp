#pragma once

#include <span>
#include <string>

#include "tada/food/database.hpp"
#include "tada/store/record.hpp"

namespace tada::server {

inline constexpr const char* kExportSchemaVersion = "1";

/// Dataset bundle for the Finalized records among `records`, in occasion_id
/// order. Output depends only on the records, so repeated exports of
/// unchanged data are byte-identical.
std::string export_json(const StudyId& study_id, std::span<const store::OccasionRecord> records);

/// One row per researcher annotation of the Finalized records.
std::string export_csv(std::span<const store::OccasionRecord> records);

/// RFC 4180 quoting when the cell needs it.
std::string csv_cell(std::string_view text);

} // namespace tada::server
