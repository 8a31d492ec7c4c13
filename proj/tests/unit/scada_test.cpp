#include "helpers.hpp"
#include "wtpc/errors.hpp"
#include "wtpc/io.hpp"
#include "wtpc/scada.hpp"

#include <doctest.h>

#include <cmath>

using namespace wtpc;

TEST_CASE("timestamps round-trip through minutes since epoch") {
  CHECK(parse_timestamp_minutes("1970-01-01T00:00") == 0);
  CHECK(parse_timestamp_minutes("1970-01-01T01:30") == 90);
  CHECK(parse_timestamp_minutes("1970-01-02 00:00:00") == 1440);
  CHECK(parse_timestamp_minutes("720") == 720);
  for (std::int64_t ts : {0LL, 90LL, 1440LL, 22787280LL, 29465760LL}) {
    CHECK(parse_timestamp_minutes(format_timestamp_minutes(ts)) == ts);
  }
  CHECK(format_timestamp_minutes(parse_timestamp_minutes("2013-05-07T12:30")) ==
        "2013-05-07T12:30");
  CHECK_THROWS_AS(parse_timestamp_minutes("not a date"), ParseError);
}

TEST_CASE("quantization keys agree with one-decimal rounding") {
  CHECK(to_tenths(5.3) == 53);
  CHECK(to_tenths(5.25) == 53);
  // Halfway cases round away from zero on both sides, matching quantize1.
  CHECK(to_tenths(-0.05) == -1);
  CHECK(from_tenths(to_tenths(-0.05)) == doctest::Approx(quantize1(-0.05)));
  CHECK(quantize1(5.25) == doctest::Approx(5.3).epsilon(1e-12));
  CHECK(from_tenths(to_tenths(12.7)) == doctest::Approx(12.7));
  // The key must be stable across values that print identically.
  CHECK(to_tenths(0.1 + 0.2) == to_tenths(0.3));
}

TEST_CASE("parser maps headers, tolerates junk cells, rejects duplicate stamps") {
  const auto dir = testutil::scratch_dir("parse");
  testutil::write_file(dir / "ok.csv",
                       "timestamp,wind,angle,temperature,power,state\n"
                       "2013-01-01T00:10,5.3,1.0,10.5,320.1,NORMAL\n"
                       "2013-01-01T00:00,4.9,-2.0,10.4,250.0,OK\n"
                       "2013-01-01T00:20,bad,0.0,10.6,,NORMAL\n");
  const auto rows = parse_scada((dir / "ok.csv").string(), {});
  REQUIRE(rows.size() == 3);
  CHECK(*rows[0].wind == doctest::Approx(4.9));  // sorted by timestamp
  CHECK(*rows[1].power == doctest::Approx(320.1));
  CHECK_FALSE(rows[2].wind.has_value());
  CHECK_FALSE(rows[2].power.has_value());
  CHECK(rows[2].temperature.has_value());

  testutil::write_file(dir / "renamed.csv",
                       "time;ws;dir;temp;kw;code\n"
                       "2013-01-01T00:00;5.0;0.0;9.0;300.0;NORMAL\n");
  ScadaSchema schema;
  schema.timestamp = "time";
  schema.wind = "ws";
  schema.angle = "dir";
  schema.temperature = "temp";
  schema.power = "kw";
  schema.state = "code";
  schema.delimiter = ';';
  const auto renamed = parse_scada((dir / "renamed.csv").string(), schema);
  REQUIRE(renamed.size() == 1);
  CHECK(*renamed[0].wind == doctest::Approx(5.0));

  testutil::write_file(dir / "dup.csv",
                       "timestamp,wind,angle,temperature,power,state\n"
                       "2013-01-01T00:00,5.0,0,9,300,NORMAL\n"
                       "2013-01-01T00:00,5.1,0,9,301,NORMAL\n");
  CHECK_THROWS_AS(parse_scada((dir / "dup.csv").string(), {}), ParseError);

  testutil::write_file(dir / "noheader.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(parse_scada((dir / "noheader.csv").string(), {}), SchemaError);
}

TEST_CASE("csv rendering round-trips through the parser") {
  auto rows = testutil::grid_records({5.0, 5.1, 5.2}, {300.0, 310.0, 320.0});
  rows[1].angle.reset();
  const auto dir = testutil::scratch_dir("render");
  testutil::write_file(dir / "r.csv", render_scada_csv(rows));
  const auto back = parse_scada((dir / "r.csv").string(), {});
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(*back[i].timestamp == *rows[i].timestamp);
    CHECK(*back[i].wind == *rows[i].wind);
    CHECK(back[i].angle.has_value() == rows[i].angle.has_value());
  }
}

TEST_CASE("cleaning counts missing grid slots, incomplete rows and fault states") {
  std::vector<ScadaRecord> rows;
  for (int i = 0; i < 40; ++i) {
    if (i == 7 || i == 21) continue;  // two missing 10-minute slots
    rows.push_back(testutil::record(i * 10, 5.0 + 0.1 * (i % 5), 0.0, 12.0, 300.0 + i));
  }
  rows[3].temperature.reset();
  rows[10].state = "FAULT";
  rows[11].state = "maintenance";

  const auto data = clean(rows);
  CHECK(data.report.na == 2);
  CHECK(data.report.incomplete == 1);
  CHECK(data.report.nno == 2);
  CHECK(data.report.outliers == 0);
  CHECK(data.report.raw == 40);
  CHECK(data.report.retained == 35);
  CHECK(data.report.raw == data.report.retained + data.report.na + data.report.incomplete +
                               data.report.nno + data.report.outliers);
  CHECK(data.report.proportion() == doctest::Approx(35.0 / 40.0));
}

TEST_CASE("whisker rule removes the lone absurd power and keeps the bulk") {
  // Eleven rows in one wind bin: ten at 100.0 and one at 5000.0. The quartiles
  // sit at 100, the interquartile range is zero, so only 5000 lies outside.
  std::vector<double> winds(11, 8.0), powers(11, 100.0);
  powers[5] = 5000.0;
  const auto data = clean(testutil::grid_records(winds, powers));
  CHECK(data.report.outliers == 1);
  CHECK(data.report.retained == 10);
  for (const auto& r : data.records) CHECK(*r.power == doctest::Approx(100.0));
}

TEST_CASE("bins with fewer than four rows skip the whisker rule") {
  const auto data = clean(testutil::grid_records({8.0, 8.0, 8.0}, {100.0, 100.0, 5000.0}));
  CHECK(data.report.outliers == 0);
  CHECK(data.report.retained == 3);
}

TEST_CASE("a larger whisker multiplier never removes more rows") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 40.0);
  std::vector<double> winds, powers;
  for (int i = 0; i < 400; ++i) {
    winds.push_back(5.0 + 0.1 * (i % 8));
    powers.push_back(500.0 + noise(rng));
  }
  powers[17] = 4000.0;
  powers[230] = -900.0;
  const auto rows = testutil::grid_records(winds, powers);
  long long previous = -1;
  for (double k : {0.5, 1.0, 1.5, 3.0, 6.0}) {
    const auto data = clean(rows, k);
    if (previous >= 0) CHECK(data.report.retained >= previous);
    previous = data.report.retained;
  }
  CHECK(clean(rows, 3.0).report.outliers >= 2);
}

TEST_CASE("cleaning already-clean records removes nothing further") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 30.0);
  std::vector<double> winds, powers;
  for (int i = 0; i < 300; ++i) {
    winds.push_back(4.0 + 0.1 * (i % 20));
    powers.push_back(400.0 + noise(rng));
  }
  powers[50] = 9000.0;
  const auto first = clean(testutil::grid_records(winds, powers));
  const auto second = clean(first.records);
  CHECK(second.report.incomplete == 0);
  CHECK(second.report.nno == 0);
  CHECK(second.report.outliers == 0);
  CHECK(second.report.retained == first.report.retained);
  // Rows removed in the first pass leave holes in the grid; the second pass
  // reports them as missing slots without touching any surviving row.
  CHECK(second.report.na == first.report.outliers);
}

TEST_CASE("cleaning rejects empty input and returns an error when nothing survives") {
  CHECK_THROWS_AS(clean({}), DataError);
  std::vector<ScadaRecord> rows{testutil::record(0, 5.0, 0.0, 12.0, 300.0, "FAULT")};
  CHECK_THROWS_AS(clean(rows), DataError);
}
