#include "wtpc/io.hpp"

#include "wtpc/errors.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace wtpc {

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error("fmt_double: conversion failed");
    return std::string(buf, ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArtifactError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write failed for '" + path + "'");
}

nlohmann::json load_json(const std::string& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError("invalid JSON in '" + path + "': " + e.what());
    }
}

void save_json(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string render_scada_csv(const std::vector<ScadaRecord>& records, char delimiter) {
    std::ostringstream out;
    const char d = delimiter;
    out << "timestamp" << d << "wind" << d << "angle" << d << "temperature" << d
        << "power" << d << "state\n";
    for (const auto& r : records) {
        if (r.timestamp) out << format_timestamp_minutes(*r.timestamp);
        out << d;
        if (r.wind) out << fmt_double(*r.wind);
        out << d;
        if (r.angle) out << fmt_double(*r.angle);
        out << d;
        if (r.temperature) out << fmt_double(*r.temperature);
        out << d;
        if (r.power) out << fmt_double(*r.power);
        out << d;
        if (r.state) out << *r.state;
        out << '\n';
    }
    return out.str();
}

nlohmann::json cleaning_report_json(const CleaningReport& report) {
    return nlohmann::json{
        {"raw", report.raw},
        {"na_in_nno", report.na + report.incomplete + report.nno},
        {"outliers", report.outliers},
        {"retained", report.retained},
        {"proportion", report.proportion()},
        {"detail",
         {{"na", report.na}, {"incomplete", report.incomplete}, {"nno", report.nno}}},
    };
}

} // namespace wtpc
