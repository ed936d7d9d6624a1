#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sphdesign/pointsets.hpp"

namespace sphd {

/// Sibling JSON path of a point-set CSV: "x.csv" -> "x.json".
std::filesystem::path envelope_path(const std::filesystem::path& csv);

/// Writes the CSV (header theta,phi,weight; 17 significant digits) and the
/// JSON envelope. Keys of `extra` are merged into the envelope; a
/// "manifest" object with a "hash" also goes into a leading '#' line.
void write_pointset(const QuadraturePointSet& set, const std::filesystem::path& csv,
                    const nlohmann::json& extra = nlohmann::json::object());

/// Reads the CSV (skipping '#' lines) and, when present, the envelope. Throws std::runtime_error
/// on I/O or parse failure.
QuadraturePointSet read_pointset(const std::filesystem::path& csv);

std::string format_double(double x);

}  // namespace sphd
