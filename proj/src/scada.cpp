#include "wtpc/scada.hpp"

#include "wtpc/errors.hpp"
#include "wtpc/stats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace wtpc {

long long to_tenths(double v) {
    return std::llround(v * 10.0);
}

double from_tenths(long long t) {
    return static_cast<double>(t) / 10.0;
}

double quantize1(double v) {
    return from_tenths(to_tenths(v));
}

namespace {

/// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    y = static_cast<int>(yr + (m <= 2));
}

bool parse_int_field(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::optional<double> parse_double_cell(const std::string& cell) {
    const std::string t = trim(cell);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

constexpr std::int64_t kGridStep = 10; // minutes

} // namespace

std::int64_t parse_timestamp_minutes(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError("empty timestamp");
    // Plain integer minutes.
    if (t.find_first_not_of("-0123456789") == std::string::npos) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec == std::errc() && ptr == t.data() + t.size()) return v;
        throw ParseError("bad timestamp '" + t + "'");
    }
    int y, mo, d, h, mi;
    const bool shape_ok = t.size() >= 16 &&
                          parse_int_field(t, 0, 4, y) && t[4] == '-' &&
                          parse_int_field(t, 5, 2, mo) && t[7] == '-' &&
                          parse_int_field(t, 8, 2, d) && (t[10] == 'T' || t[10] == ' ') &&
                          parse_int_field(t, 11, 2, h) && t[13] == ':' &&
                          parse_int_field(t, 14, 2, mi);
    bool tail_ok = t.size() == 16;
    if (t.size() == 19 && t[16] == ':') {
        int sec;
        tail_ok = parse_int_field(t, 17, 2, sec) && sec == 0;
    }
    if (!shape_ok || !tail_ok || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59) {
        throw ParseError("bad timestamp '" + t + "'");
    }
    return days_from_civil(y, mo, d) * 1440 + h * 60 + mi;
}

std::string format_timestamp_minutes(std::int64_t minutes) {
    std::int64_t days = minutes / 1440;
    std::int64_t rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    int y, mo, d;
    civil_from_days(days, y, mo, d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02lld:%02lld", y, mo, d,
                  static_cast<long long>(rem / 60), static_cast<long long>(rem % 60));
    return buf;
}

bool ScadaRecord::complete() const {
    return timestamp && wind && angle && temperature && power && state;
}

bool ScadaRecord::normal_state() const {
    if (!state) return false;
    std::string s = trim(*state);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s == "NORMAL" || s == "OK";
}

double CleaningReport::proportion() const {
    return raw > 0 ? static_cast<double>(retained) / static_cast<double>(raw) : 0.0;
}

std::vector<ScadaRecord> parse_scada(const std::string& path, const ScadaSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("cannot open data file '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) throw ParseError("file '" + path + "' has no header row");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const auto columns = split_line(header, schema.delimiter);
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (trim(columns[i]) == name) return static_cast<long>(i);
        }
        throw SchemaError("column '" + name + "' not found in '" + path + "'");
    };
    const long c_ts = find_col(schema.timestamp);
    const long c_w = find_col(schema.wind);
    const long c_a = find_col(schema.angle);
    const long c_t = find_col(schema.temperature);
    const long c_p = find_col(schema.power);
    const long c_s = find_col(schema.state);

    std::vector<ScadaRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split_line(line, schema.delimiter);
        auto cell = [&](long idx) -> std::string {
            return idx < static_cast<long>(cells.size()) ? cells[idx] : std::string();
        };
        ScadaRecord rec;
        try {
            rec.timestamp = parse_timestamp_minutes(cell(c_ts));
        } catch (const ParseError&) {
            rec.timestamp = std::nullopt;
        }
        rec.wind = parse_double_cell(cell(c_w));
        if (rec.wind && *rec.wind < 0.0) rec.wind = std::nullopt;
        rec.angle = parse_double_cell(cell(c_a));
        if (rec.angle && (*rec.angle < -180.0 || *rec.angle > 180.0)) rec.angle = std::nullopt;
        rec.temperature = parse_double_cell(cell(c_t));
        rec.power = parse_double_cell(cell(c_p));
        const std::string st = trim(cell(c_s));
        rec.state = st.empty() ? std::nullopt : std::optional<std::string>(st);
        records.push_back(std::move(rec));
    }

    std::stable_sort(records.begin(), records.end(), [](const ScadaRecord& a, const ScadaRecord& b) {
        const std::int64_t ta = a.timestamp.value_or(INT64_MIN);
        const std::int64_t tb = b.timestamp.value_or(INT64_MIN);
        return ta < tb;
    });
    std::string dups;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].timestamp && records[i - 1].timestamp &&
            *records[i].timestamp == *records[i - 1].timestamp) {
            if (!dups.empty()) dups += ", ";
            dups += format_timestamp_minutes(*records[i].timestamp);
        }
    }
    if (!dups.empty()) throw ParseError("duplicate timestamps: " + dups);
    return records;
}

CleanDataset clean(const std::vector<ScadaRecord>& records, double iqr_k) {
    if (records.empty()) throw DataError("clean: empty input");
    if (iqr_k <= 0.0) throw DataError("clean: iqr_k must be positive");

    CleanDataset out;
    CleaningReport& rep = out.report;

    std::int64_t ts_min = INT64_MAX;
    std::int64_t ts_max = INT64_MIN;
    long long stamped = 0;
    for (const auto& r : records) {
        if (r.timestamp) {
            ts_min = std::min(ts_min, *r.timestamp);
            ts_max = std::max(ts_max, *r.timestamp);
            ++stamped;
        }
    }
    // Rule 1: slots of the 10-minute grid spanned by the data with no row.
    if (stamped > 0) {
        const long long slots = (ts_max - ts_min) / kGridStep + 1;
        rep.na = slots - stamped;
        rep.raw = slots + (static_cast<long long>(records.size()) - stamped);
    } else {
        rep.raw = static_cast<long long>(records.size());
    }

    // Rules 2 and 3.
    std::vector<ScadaRecord> kept;
    kept.reserve(records.size());
    for (const auto& r : records) {
        if (!r.complete()) {
            ++rep.incomplete;
        } else if (!r.normal_state()) {
            ++rep.nno;
        } else {
            kept.push_back(r);
        }
    }

    // Rule 4: whiskers of the power distribution per quantized wind bin.
    std::map<long long, std::vector<double>> bins;
    for (const auto& r : kept) bins[to_tenths(*r.wind)].push_back(*r.power);
    std::map<long long, std::pair<double, double>> whiskers;
    for (auto& [w, powers] : bins) {
        if (powers.size() < 4) continue;
        std::sort(powers.begin(), powers.end());
        const double q1 = quantile_type7(powers, 0.25);
        const double q3 = quantile_type7(powers, 0.75);
        const double iqr = q3 - q1;
        whiskers[w] = {q1 - iqr_k * iqr, q3 + iqr_k * iqr};
    }
    for (const auto& r : kept) {
        const auto it = whiskers.find(to_tenths(*r.wind));
        if (it != whiskers.end() &&
            (*r.power < it->second.first || *r.power > it->second.second)) {
            ++rep.outliers;
        } else {
            out.records.push_back(r);
        }
    }

    rep.retained = static_cast<long long>(out.records.size());
    if (out.records.empty()) throw DataError("clean: empty after cleaning");
    return out;
}

} // namespace wtpc
