// End-to-end checks of the command-line tool: exit codes, determinism of
// seeded output files, format equivalence, and the reference tables.
// The binary path arrives through the QKPC_CLI environment variable.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qkpc/table_io.hpp"

namespace {

namespace fs = std::filesystem;

std::string cli_path() {
  const char* p = std::getenv("QKPC_CLI");
  REQUIRE_MESSAGE(p != nullptr, "QKPC_CLI must point at the built binary");
  return p;
}

fs::path tmp_dir() {
  const char* p = std::getenv("QKPC_TEST_TMPDIR");
  fs::path dir = p != nullptr ? fs::path(p) / "cli_out" : fs::temp_directory_path() / "qkpc_cli_out";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("no-such-command") == 2);
  CHECK(run_cli("capacity --scheme bogus") == 2);
  CHECK(run_cli("") == 2);
  CHECK(run_cli("--help") == 0);
}

TEST_CASE("background preset reproduces the weather table") {
  const fs::path out = tmp_dir() / "table1.csv";
  REQUIRE(run_cli("background --preset table1 --out " + out.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(out));
  REQUIRE(table.rows.size() == 6);
  const double expected[] = {7.4, 0.74, 0.074, 7.4e-5, 7.4e-6, 7.4e-7};
  for (std::size_t i = 0; i < 6; ++i) {
    const double delta = std::get<double>(table.rows[i][3].data);
    CHECK(delta == doctest::Approx(expected[i]).epsilon(5e-3));
  }
  CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("capacity command reproduces the reference point") {
  const fs::path out = tmp_dir() / "cap.json";
  REQUIRE(run_cli("capacity --scheme ook-k1 --gamma 0.1 --delta 4.8e-6 --format json --out " +
                  out.string()) == 0);
  const nlohmann::json rows = nlohmann::json::parse(slurp(out));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["c_p"].get<double>() == doctest::Approx(0.66).epsilon(0.08));
  CHECK(rows[0]["scheme"] == "ook-k1");
  CHECK(rows[0]["k"] == 1);
}

TEST_CASE("seeded monte carlo runs are byte-identical") {
  const fs::path a = tmp_dir() / "curve_a.csv";
  const fs::path b = tmp_dir() / "curve_b.csv";
  const std::string flags =
      "qber-curve --scheme ook --delta 0.03 --k-list 1,2 --alpha2-range 0.5:2:3 "
      "--monte-carlo --seed 7 --pulses 5000 --repetitions 2 --out ";
  REQUIRE(run_cli(flags + a.string()) == 0);
  REQUIRE(run_cli(flags + b.string()) == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("degenerate single-point range works") {
  const fs::path out = tmp_dir() / "single.csv";
  REQUIRE(run_cli("qber-curve --scheme ook --delta 0.03 --k-list 1 --alpha2-range 0:0 --out " +
                  out.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(out));
  CHECK(table.rows.size() == 1);
}

TEST_CASE("csv and json outputs carry the same records") {
  const fs::path csv = tmp_dir() / "loss.csv";
  const fs::path json = tmp_dir() / "loss.json";
  const std::string flags = "detector-loss --n 250 --alpha2-range 0:50:6 ";
  REQUIRE(run_cli(flags + "--format csv --out " + csv.string()) == 0);
  REQUIRE(run_cli(flags + "--format json --out " + json.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(csv));
  const nlohmann::json rows = nlohmann::json::parse(slurp(json));
  REQUIRE(rows.size() == table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& v = table.rows[r][c];
      if (const double* d = std::get_if<double>(&v.data)) {
        CHECK(rows[r][table.columns[c]].get<double>() == *d);
      }
    }
  }
  // the loss curve is monotone increasing
  double prev = -1.0;
  for (const auto& row : table.rows) {
    const double lost = std::get<double>(row[2].data);
    CHECK(lost >= prev);
    prev = lost;
  }
}

TEST_CASE("heatmap is row-major with gamma outer") {
  const fs::path out = tmp_dir() / "heat.csv";
  REQUIRE(run_cli("heatmap --scheme ook-k1 --gamma-list 0.1,0.5 "
                  "--delta-list 0.001,0.1,1 --out " +
                  out.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(out));
  REQUIRE(table.rows.size() == 6);
  CHECK(std::get<double>(table.rows[0][0].data) == 0.1);
  CHECK(std::get<double>(table.rows[2][0].data) == 0.1);
  CHECK(std::get<double>(table.rows[3][0].data) == 0.5);
  CHECK(std::get<double>(table.rows[0][1].data) == 0.001);
  CHECK(std::get<double>(table.rows[1][1].data) == 0.1);
  // capacity falls along both axes
  CHECK(std::get<double>(table.rows[0][3].data) >= std::get<double>(table.rows[2][3].data));
  CHECK(std::get<double>(table.rows[0][3].data) >= std::get<double>(table.rows[3][3].data));
}

TEST_CASE("simulate emits a summary and per-repetition rows") {
  const fs::path out = tmp_dir() / "sim.csv";
  REQUIRE(run_cli("simulate --scheme pm --alpha2 4 --theta 45 --delta 0.03 "
                  "--pulses 20000 --repetitions 3 --seed 11 --out " +
                  out.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(out));
  REQUIRE(table.rows.size() == 4);  // summary + 3 repetitions
  CHECK(std::get<std::string>(table.rows[0][0].data) == "summary");
  const double qber = std::get<double>(table.rows[0][1].data);
  CHECK(qber > 0.0);
  CHECK(qber < 0.2);
}

TEST_CASE("usd table keeps the unambiguous strategy below the benchmark") {
  const fs::path out = tmp_dir() / "usd.csv";
  REQUIRE(run_cli("usd --gamma 0.1 --alpha2-range 0.1:50:12 --out " + out.string()) == 0);
  const auto table = qkpc::parse_csv(slurp(out));
  REQUIRE(table.rows.size() == 12);
  for (const auto& row : table.rows) {
    CHECK(std::get<double>(row[1].data) <= std::get<double>(row[2].data) + 1e-9);
  }
}
