#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "magsense/cli/app.hpp"

namespace fs = std::filesystem;
using namespace magsense;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "magnon-sense");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("magsense_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::string without_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
      if (line.rfind("# timestamp:", 0) != 0) out += line + "\n";
    }
    return out;
  }

  fs::path dir_;
};

const std::string kConfigDir = MAGSENSE_CONFIG_DIR;

const char* kSystem = R"(
[system]
kappa_a = "2.09 MHz"
kappa_m = "6 MHz"
g_am = "177 kHz"
temperature = "5 mK"

[grid]
from = "-1 kappa_m"
to = "1 kappa_m"
points = 11
)";

}  // namespace

TEST_F(CliTest, SteadySpectrumWritesCsv) {
  const auto r = invoke({"steady-spectrum", "--config", kConfigDir + "/reference.toml", "--out",
                         dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto d = io::read_csv(dir_ / "steady-spectrum.csv");
  EXPECT_TRUE(d.has_column("S_total"));
  EXPECT_EQ(d.rows.size(), 2002u);
}

TEST_F(CliTest, OutputIsDeterministicApartFromTimestamp) {
  const auto cfg = write("t.toml", std::string("task = \"transient-spectrum\"\n") + kSystem +
                                       "[transient]\nt_m = \"3/kappa_m\"\n"
                                       "[monte_carlo]\nn_traj = 50\n");
  ASSERT_EQ(invoke({"transient-spectrum", "-c", cfg.string(), "-o", (dir_ / "a").string(), "--seed", "9"}).code, 0);
  ASSERT_EQ(invoke({"transient-spectrum", "-c", cfg.string(), "-o", (dir_ / "b").string(), "--seed", "9"}).code, 0);
  const auto a = slurp(dir_ / "a" / "transient-spectrum.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(without_timestamp(a), without_timestamp(slurp(dir_ / "b" / "transient-spectrum.csv")));
}

TEST_F(CliTest, JsonFormat) {
  const auto cfg = write("s.toml", kSystem);
  ASSERT_EQ(invoke({"steady-spectrum", "-c", cfg.string(), "-o", dir_.string(), "--format", "json"}).code, 0);
  const auto j = nlohmann::json::parse(slurp(dir_ / "steady-spectrum.json"));
  EXPECT_EQ(j["rows"].size(), 22u);
}

TEST_F(CliTest, SchemaErrorsExitTwo) {
  const auto bad_key = write("k.toml", std::string(kSystem) + "[output]\nformt = \"csv\"\n");
  auto r = invoke({"steady-spectrum", "-c", bad_key.string(), "-o", dir_.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("output.formt"), std::string::npos) << r.err;
  const auto bad_unit = write("u.toml", "[system]\nkappa_m = \"6 parsecs\"\n");
  EXPECT_EQ(invoke({"steady-spectrum", "-c", bad_unit.string()}).code, 2);
  const auto empty_axes = write("e.toml", std::string(kSystem) + "[sweep]\naxes = []\n");
  EXPECT_EQ(invoke({"sweep", "-c", empty_axes.string()}).code, 2);
  EXPECT_EQ(invoke({"figure-data", "fig9"}).code, 2);
  EXPECT_EQ(invoke({"bogus-task", "-c", bad_key.string()}).code, 2);
  EXPECT_EQ(invoke({"steady-spectrum"}).code, 2);
  const auto mismatch = write("m.toml", std::string("task = \"snr\"\n") + kSystem);
  EXPECT_EQ(invoke({"steady-spectrum", "-c", mismatch.string()}).code, 2);
}

TEST_F(CliTest, DomainErrorExitsThree) {
  const auto cfg = write("d.toml", "[system]\nkappa_m = \"-6 MHz\"\n");
  const auto r = invoke({"steady-spectrum", "-c", cfg.string(), "-o", dir_.string()});
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("kappa_m"), std::string::npos) << r.err;
}

TEST_F(CliTest, IoErrorsExitFour) {
  EXPECT_EQ(invoke({"steady-spectrum", "-c", (dir_ / "missing.toml").string()}).code, 4);
  const auto cfg = write("s.toml", kSystem);
  const auto blocker = write("blocker", "not a directory");
  EXPECT_EQ(invoke({"steady-spectrum", "-c", cfg.string(), "-o", (blocker / "sub").string()}).code, 4);
}

TEST_F(CliTest, ReconstructFromWrittenMeasurements) {
  ASSERT_EQ(invoke({"reconstruct", "-c", kConfigDir + "/reconstruct.toml", "-o", (dir_ / "syn").string()}).code, 0);
  ASSERT_TRUE(fs::exists(dir_ / "syn" / "measurements" / "unknown-x_x.csv"));
  std::string text = slurp(kConfigDir + "/reconstruct.toml");
  text.replace(text.find("source = \"synthetic\""), 20, "source = \"files\"");
  text.replace(text.find("write_measurements = true"), 25,
               "measurements = \"" + (dir_ / "syn" / "measurements").string() + "\"");
  const auto cfg = write("files.toml", text);
  const auto r = invoke({"reconstruct", "-c", cfg.string(), "-o", (dir_ / "files").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = io::read_csv(dir_ / "syn" / "reconstruct.csv");
  const auto b = io::read_csv(dir_ / "files" / "reconstruct.csv");
  for (const char* col : {"b_hat_x", "b_hat_y", "b_hat_z"}) {
    EXPECT_NEAR(b.numeric(col)[0], a.numeric(col)[0], 1e-12 * std::abs(a.numeric(col)[0])) << col;
  }
  fs::remove(dir_ / "syn" / "measurements" / "reference-y_y.csv");
  EXPECT_EQ(invoke({"reconstruct", "-c", cfg.string(), "-o", (dir_ / "files").string()}).code, 4);
}

TEST_F(CliTest, FigureDataWritesContours) {
  const auto r = invoke({"figure-data", "fig4", "--out", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"fig4a", "fig4a_contour", "fig4d", "fig4d_contour"}) {
    EXPECT_TRUE(fs::exists(dir_ / (std::string(f) + ".csv"))) << f;
  }
  const auto d = io::read_csv(dir_ / "fig4a_contour.csv");
  EXPECT_GT(d.rows.size(), 0u);
}
