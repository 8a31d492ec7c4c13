#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wtpc {

/// Quantized tenth-units key: 5.3 m/s -> 53. Used everywhere a one-decimal
/// value must be compared exactly (wind bins, lattice offsets).
long long to_tenths(double v);
double from_tenths(long long t);

/// Round to one decimal digit, the recording resolution of the SCADA system.
double quantize1(double v);

/// Minutes since 1970-01-01T00:00 from "YYYY-MM-DDTHH:MM[:00]" (space also
/// accepted as the date/time separator) or from a plain integer string.
std::int64_t parse_timestamp_minutes(const std::string& text);
std::string format_timestamp_minutes(std::int64_t minutes);

/// One 10-minute SCADA observation row. Any field may be absent; absent fields
/// mark the row incomplete during cleaning, they are never silently zeroed.
struct ScadaRecord {
    std::optional<std::int64_t> timestamp; // minutes since epoch, 10-minute grid
    std::optional<double> wind;            // m/s, one decimal
    std::optional<double> angle;           // degrees in [-180, 180], nacelle-relative
    std::optional<double> temperature;     // degrees C
    std::optional<double> power;           // kW, one decimal
    std::optional<std::string> state;      // operational code

    bool complete() const;
    /// True when the state code marks normal operation ("NORMAL" or "OK",
    /// case-insensitive); every other code is a not-normal-operation variant.
    bool normal_state() const;
};

/// Column mapping for delimiter-separated SCADA files.
struct ScadaSchema {
    std::string timestamp = "timestamp";
    std::string wind = "wind";
    std::string angle = "angle";
    std::string temperature = "temperature";
    std::string power = "power";
    std::string state = "state";
    char delimiter = ',';
};

/// Per-rule removal counts. `na` counts 10-minute grid slots between the
/// earliest and latest timestamp with no row at all; the other three count
/// removed rows. raw = retained + na + incomplete + nno + outliers.
struct CleaningReport {
    long long raw = 0;
    long long na = 0;
    long long incomplete = 0;
    long long nno = 0;
    long long outliers = 0;
    long long retained = 0;

    double proportion() const; // retained / raw
};

struct CleanDataset {
    std::vector<ScadaRecord> records; // complete, normal, strictly increasing timestamps
    CleaningReport report;
};

/// Parse a delimited text file with a header row into records, sorted by
/// timestamp. Unparseable cells become missing fields; duplicate timestamps
/// are an error naming the offending stamps.
std::vector<ScadaRecord> parse_scada(const std::string& path, const ScadaSchema& schema);

/// Apply the cleaning rules in order: missing grid slots (NA), incomplete
/// rows, not-normal operation, then the per-wind-bin whisker rule. Records
/// with power outside [Q1 - iqr_k*IQR, Q3 + iqr_k*IQR] of their quantized
/// wind bin are outliers; bins with fewer than 4 rows skip the rule.
CleanDataset clean(const std::vector<ScadaRecord>& records, double iqr_k = 3.0);

} // namespace wtpc
