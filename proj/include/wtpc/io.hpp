#pragma once

#include "wtpc/scada.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wtpc {

/// Shortest decimal string that round-trips the double exactly.
std::string fmt_double(double v);

std::string read_text_file(const std::string& path);

/// Write atomically-ish (parent directories created first).
void write_text_file(const std::string& path, const std::string& content);

nlohmann::json load_json(const std::string& path);
void save_json(const std::string& path, const nlohmann::json& j);

/// Render records as delimiter-separated text with the canonical header
/// (timestamp,wind,angle,temperature,power,state). Missing fields are empty cells.
std::string render_scada_csv(const std::vector<ScadaRecord>& records, char delimiter = ',');

nlohmann::json cleaning_report_json(const CleaningReport& report);

} // namespace wtpc
