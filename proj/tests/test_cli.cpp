#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "steiner/app.hpp"
#include "steiner/config.hpp"
#include "support.hpp"

using namespace steiner;
namespace fs = std::filesystem;

namespace {

const char* kTwoPoint = R"([domain]
polygon = 0,0; 1,0; 1,1; 0,1
nx = 49
ny = 49

[measure]
base = 0,0.5
atoms = 1,0.5

[schedule]
epsilon = 0.2, 0.1
beta = 1.5

[output]
dir = out
)";

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("steiner_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the executable, capturing stdout into a file; returns the exit code.
int run(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = std::string("\"") + STEINER_PF_EXE + "\" " + args + " > \"" + stdout_file.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST_CASE("config round-trip") {
  std::istringstream is(kTwoPoint);
  const RunConfig c = parse_config(is);
  CHECK(c.nx == 49);
  CHECK(c.atoms.size() == 1);
  CHECK(c.weights == std::vector<double>{0.5});
  REQUIRE(c.schedule.size() == 2);
  CHECK(c.schedule[1].lambda == 0.1);
  CHECK(!c.eta0);

  RunConfig d = c;
  d.eta0 = 0.3;
  d.weights = {1.0 / 3.0};
  d.seed = 42;
  std::ostringstream os;
  write_config(os, d);
  std::istringstream back(os.str());
  CHECK(parse_config(back) == d);

  const auto t = terminals(c);
  CHECK(t == std::vector<Vec2>{{0, 0.5}, {1, 0.5}});
  CHECK(!config_warnings(c).empty());
}

TEST_CASE("config validation") {
  auto parse = [](const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
  };
  try {
    parse(replace(kTwoPoint, "beta = 1.5", "beta = 2.5"));
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
  }
  CHECK_THROWS_AS(parse(replace(kTwoPoint, "epsilon = 0.2, 0.1", "epsilon = 0.1, 0.2")), ConfigError);
  CHECK_THROWS_AS(parse(replace(kTwoPoint, "nx = 49", "nx = 4")), ConfigError);
  CHECK_THROWS_AS(parse(replace(kTwoPoint, "nx = 49", "nx = forty")), ConfigError);
  CHECK_THROWS_AS(parse(replace(kTwoPoint, "atoms = 1,0.5", "atoms = 1;0.5")), ConfigError);
  CHECK_THROWS_AS(parse(replace(kTwoPoint, "base = 0,0.5\n", "")), ConfigError);
  CHECK_THROWS_AS(build_problem(parse(replace(kTwoPoint, "atoms = 1,0.5", "atoms = 2,0.5"))), ConfigError);
}

TEST_CASE("solve, compare and determinism through the executable") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "two.ini";
  write_file(cfg, kTwoPoint);
  const fs::path log = tmp.path / "log.txt";

  const fs::path a = tmp.path / "a";
  const fs::path b = tmp.path / "b";
  REQUIRE(run("solve --config \"" + cfg.string() + "\" --seed 3 --out \"" + a.string() + "\"", log) == 0);
  CHECK(read_file(log).find("rung") != std::string::npos);
  for (const char* f : {"config.ini", "trace.json", "trace.csv", "field_r0.txt", "field_final.txt", "curve_0.txt",
                        "sublevel.txt", "oracle.json", "plot.svg"})
    CHECK(fs::exists(a / f));
  REQUIRE(run("solve --config \"" + cfg.string() + "\" --seed 3 --out \"" + b.string() + "\"", log) == 0);
  CHECK(read_file(a / "trace.json") == read_file(b / "trace.json"));

  const auto doc = nlohmann::json::parse(read_file(a / "trace.json"));
  CHECK(doc["seed"] == 3);
  REQUIRE(doc["rungs"].size() == 2);
  CHECK(doc["rungs"][1]["final"]["field_ref"] == "field_final.txt");

  SUBCASE("compare exit codes") {
    const fs::path lenient = tmp.path / "lenient.ini";
    write_file(lenient, "[thresholds]\nenergy_rel = 10\nhausdorff = 10\ndistance = 10\nfar_field = 10\n");
    const fs::path strict = tmp.path / "strict.ini";
    write_file(strict, "[thresholds]\nenergy_rel = 1e-9\n");
    CHECK(run("compare --run \"" + a.string() + "\" --thresholds \"" + lenient.string() + "\"", log) == 0);
    CHECK(nlohmann::json::parse(read_file(a / "trace.json"))["comparison"]["pass"] == true);
    CHECK(run("compare --run \"" + a.string() + "\" --thresholds \"" + strict.string() + "\"", log) == 3);
    CHECK(read_file(log).find("FAIL") != std::string::npos);
    CHECK(run("compare --run \"" + (tmp.path / "missing").string() + "\"", log) == 1);
  }

  SUBCASE("empty sublevel set fails the comparison") {
    const fs::path c2 = tmp.path / "low.ini";
    write_file(c2, replace(kTwoPoint, "dir = out", "dir = out\nthreshold = 0.0001"));
    const fs::path d = tmp.path / "d";
    REQUIRE(run("solve --config \"" + c2.string() + "\" --out \"" + d.string() + "\"", log) == 0);
    CHECK(read_file(d / "sublevel.txt").empty());
    const fs::path lenient = tmp.path / "lenient.ini";
    write_file(lenient, "[thresholds]\nenergy_rel = 10\nhausdorff = 10\ndistance = 10\nfar_field = 10\n");
    CHECK(run("compare --run \"" + d.string() + "\" --thresholds \"" + lenient.string() + "\"", log) == 3);
  }

  SUBCASE("several configs go to separate directories") {
    const fs::path other = tmp.path / "other.ini";
    write_file(other, replace(kTwoPoint, "atoms = 1,0.5", "atoms = 1,0.5; 0.5,1"));
    const fs::path many = tmp.path / "many";
    CHECK(run("solve --config \"" + cfg.string() + "\" --config \"" + other.string() + "\" --out \"" + many.string() +
                  "\"",
              log) == 0);
    CHECK(fs::exists(many / "two" / "trace.json"));
    CHECK(fs::exists(many / "other" / "oracle.json"));
  }
}

TEST_CASE("solve rejects bad configs") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "bad.ini";
  write_file(cfg, replace(kTwoPoint, "beta = 1.5", "beta = 2.5"));
  const fs::path log = tmp.path / "log.txt";
  CHECK(run("solve --config \"" + cfg.string() + "\"", log) == 1);
  CHECK(read_file(log).find("(1,2)") != std::string::npos);
  CHECK(run("solve --config \"" + (tmp.path / "nope.ini").string() + "\"", log) == 1);
  CHECK(run("solve", log) == 1);
  CHECK(run("frobnicate", log) == 1);
  CHECK(run("--help", log) == 0);
}

TEST_CASE("oracle subcommand") {
  TempDir tmp;
  const fs::path log = tmp.path / "log.txt";
  REQUIRE(run("oracle --points \"0,0;1,0;1,1;0,1\"", log) == 0);
  const auto j = nlohmann::json::parse(read_file(log));
  CHECK(j["length"].get<double>() == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-12));
  CHECK(j["nodes"].size() == 6);
  CHECK(run("oracle --points \"0,0;1,0;1,1;0,1;0.5,0.5\"", log) == 1);
  CHECK(read_file(log).find("usage") != std::string::npos);
  CHECK(run("oracle --points \"0,0\"", log) == 1);
  CHECK(run("oracle --points \"0,0;x,1\"", log) == 1);

  std::ostringstream out, err;
  CHECK(run_oracle("0,0;1,0", out, err) == exit_code::ok);
  CHECK(nlohmann::json::parse(out.str())["length"] == 1.0);
}
