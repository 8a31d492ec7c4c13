#pragma once

#include "wtpc/scada.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline wtpc::ScadaRecord record(std::int64_t ts, double w, double phi, double T, double p,
                                std::string state = "NORMAL") {
  wtpc::ScadaRecord r;
  r.timestamp = ts;
  r.wind = w;
  r.angle = phi;
  r.temperature = T;
  r.power = p;
  r.state = std::move(state);
  return r;
}

/// Records on a 10-minute grid with quantized channels, like the real feed.
inline std::vector<wtpc::ScadaRecord> grid_records(const std::vector<double>& winds,
                                                   const std::vector<double>& powers) {
  std::vector<wtpc::ScadaRecord> out;
  for (std::size_t i = 0; i < winds.size(); ++i)
    out.push_back(record(static_cast<std::int64_t>(i) * 10, wtpc::quantize1(winds[i]), 0.0,
                         12.0, wtpc::quantize1(powers[i])));
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wtpc_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testutil
