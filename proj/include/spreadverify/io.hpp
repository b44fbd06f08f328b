#pragma once

#include "core.hpp"
#include "dataset.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <string_view>

namespace sv::io {

/// Numeric CSV, last column is the label in {-1, +1} or {0, 1} (0 maps to -1). A first row
/// in which no cell parses as a number is treated as a header and skipped.
dataset parse_csv(std::istream& in);
dataset load_csv(std::filesystem::path const& path);
void write_csv(std::ostream& out, dataset const& D);

inline constexpr int model_version = 1;

/// Canonical single-line JSON: {"version":1,"d":..,"trees":[..]}. Thresholds use the
/// shortest decimal that round-trips to the same double.
std::string serialize_model(ensemble const& T);
ensemble parse_model(std::string_view text);

void save_model(ensemble const& T, std::filesystem::path const& path);
ensemble load_model(std::filesystem::path const& path);

}  // namespace sv::io
