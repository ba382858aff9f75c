#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "magsense/io/config.hpp"
#include "magsense/io/envelope.hpp"
#include "magsense/io/quantity.hpp"

using namespace magsense;
using namespace magsense::io;

TEST(Quantity, ParsesUnits) {
  const double tp = 2 * std::numbers::pi;
  EXPECT_DOUBLE_EQ(parse_quantity("6 MHz", Dimension::rate), tp * 6e6);
  EXPECT_DOUBLE_EQ(parse_quantity("1e3 rad/s", Dimension::rate), 1e3);
  EXPECT_DOUBLE_EQ(parse_quantity("5mK", Dimension::temperature), 5e-3);
  EXPECT_DOUBLE_EQ(parse_quantity("90 deg", Dimension::angle), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(parse_quantity("1 pi", Dimension::angle), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_quantity("3 us", Dimension::time), 3e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("2 nT*s", Dimension::pulse_area), 2e-9);
  UnitContext ctx;
  ctx.kappa_m = 10.0;
  EXPECT_DOUBLE_EQ(parse_quantity("0.5 kappa_m", Dimension::rate, ctx), 5.0);
  EXPECT_DOUBLE_EQ(parse_quantity("3/kappa_m", Dimension::time, ctx), 0.3);
}

TEST(Quantity, RejectsBadInput) {
  EXPECT_THROW(parse_quantity("5 furlongs", Dimension::rate), UnitError);
  EXPECT_THROW(parse_quantity("5 K", Dimension::rate), UnitError);
  EXPECT_THROW(parse_quantity("abc MHz", Dimension::rate), UnitError);
  EXPECT_THROW(parse_quantity("1 kappa_m", Dimension::rate), UnitError);
}

TEST(Scenario, ParsesReferenceBlock) {
  const auto cfg = parse_scenario(R"(
task = "steady-spectrum"
[system]
kappa_m = "6 MHz"
temperature = "20 mK"
[grid]
from = "-1 kappa_m"
to = "1 kappa_m"
points = 5
)");
  ASSERT_TRUE(cfg.task);
  EXPECT_EQ(*cfg.task, Task::steady_spectrum);
  EXPECT_DOUBLE_EQ(cfg.system.temperature, 0.02);
  ASSERT_EQ(cfg.grid.size(), 5u);
  EXPECT_NEAR(cfg.grid.front(), -2 * std::numbers::pi * 6e6, 1e-6);
}

TEST(Scenario, UnknownKeyReportsPathAndLine) {
  try {
    parse_scenario("[system]\nkappa_m = \"6 MHz\"\nkapa_a = \"1 MHz\"\n");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "system.kapa_a");
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Scenario, RejectsBadUnitsAndSweeps) {
  EXPECT_THROW(parse_scenario("[system]\nkappa_m = \"6 K\"\n"), SchemaError);
  EXPECT_THROW(parse_scenario("task = \"sweep\"\n[sweep]\naxes = []\n"), SchemaError);
  EXPECT_THROW(parse_scenario(R"(
[sweep]
[[sweep.axes]]
field = "channels"
values = [1, 2]
)"),
               SchemaError);
  EXPECT_THROW(parse_scenario("task = \"nonsense\"\n"), SchemaError);
  EXPECT_THROW(parse_scenario("[system\n"), SchemaError);
}

TEST(Envelope, Fnv1aVectors) {
  EXPECT_EQ(hex64(fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(Envelope, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -4.9e-324, 1e-24,
                   std::numeric_limits<double>::max()}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
}

TEST(Envelope, CsvRenderParseRoundTrip) {
  Table t;
  t.meta("note", "demo");
  t.columns = {{"channel", ""}, {"omega", "rad/s"}, {"S", "T^2/Hz"}};
  t.add_row({std::string("x"), 1.5, 2.25e-21});
  t.add_row({std::string("y"), -0.1, 7e-22});
  EXPECT_THROW(t.add_row({1.0}), std::logic_error);
  RunInfo run{"steady-spectrum", "0123456789abcdef", 7, "2026-01-01T00:00:00Z"};
  const auto d = parse_csv(render_csv(run, t));
  ASSERT_EQ(d.columns.size(), 3u);
  EXPECT_EQ(d.numeric("omega"), (std::vector<double>{1.5, -0.1}));
  EXPECT_EQ(d.numeric("S"), (std::vector<double>{2.25e-21, 7e-22}));
  EXPECT_THROW(d.numeric("channel"), IoError);
  bool saw_note = false, saw_units = false;
  for (const auto& [k, v] : d.metadata) {
    if (k == "note") saw_note = v == "demo";
    if (k == "units") saw_units = v == "1,rad/s,T^2/Hz";
  }
  EXPECT_TRUE(saw_note);
  EXPECT_TRUE(saw_units);
  EXPECT_THROW(parse_csv("a,b\n1\n"), IoError);
  const auto j = nlohmann::json::parse(render_json(run, t));
  EXPECT_EQ(j["rows"][1][2].get<double>(), 7e-22);
  EXPECT_EQ(j["metadata"]["seed"], "7");
}
