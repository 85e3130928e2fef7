#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

/// Scratch directory removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("pbh_cli_" + std::to_string(::getpid()))) { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
};

int pbh(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string("\"") + PBH_CLI_PATH + "\" " + args + " > \"" + (dir / "stdout.txt").string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSingular = R"({
  "schema": "pbh/1",
  "name": "fold",
  "kind": "map",
  "parameters": {"p": 3},
  "source": {"dim": 2, "metric": {"type": "euclidean"}},
  "target": {"dim": 2, "metric": {"type": "euclidean"}},
  "components": ["x1^2 + x2^2", "x1*x2"],
  "samples": {"box": {"lower": [0, 0], "upper": [1, 1]}, "points_per_axis": 2},
  "checks": ["p_harmonic"]
})";

} // namespace

TEST_SUITE("cli") {

TEST_CASE("passing run exits 0 and prints CSV") {
    TempDir t;
    CHECK(pbh("run \"builtin:inversion(3)\"", t.path) == 0);
    CHECK(slurp(t.path / "stdout.txt").rfind("scenario,check,", 0) == 0);
}

TEST_CASE("failing run exits 1") {
    TempDir t;
    CHECK(pbh("run \"builtin:inversion(3)\" --set l=2.2", t.path) == 1);
}

TEST_CASE("schema and input errors exit 2") {
    TempDir t;
    write(t.path / "bad.json", R"({"schema": "pbh/1", "name": "x"})");
    CHECK(pbh("run \"" + (t.path / "bad.json").string() + "\"", t.path) == 2);
    CHECK_FALSE(slurp(t.path / "stderr.txt").empty());
    CHECK(pbh("run builtin:nonsense", t.path) == 2);
    CHECK(pbh("run \"" + (t.path / "missing.json").string() + "\"", t.path) == 2);
}

TEST_CASE("singular points: NaN rows by default, exit 3 under --strict") {
    TempDir t;
    const fs::path file = t.path / "fold.json";
    write(file, kSingular);
    CHECK(pbh("run \"" + file.string() + "\"", t.path) == 1);
    CHECK(slurp(t.path / "stdout.txt").find("nan") != std::string::npos);
    CHECK(pbh("run --strict \"" + file.string() + "\"", t.path) == 3);
}

TEST_CASE("--out with --format json writes a parseable report") {
    TempDir t;
    const fs::path out = t.path / "report.json";
    CHECK(pbh("run builtin:proper_pbh_cylinder --format json --out \"" + out.string() + "\"", t.path) == 0);
    CHECK(slurp(t.path / "stdout.txt").find("proper_pbh_cylinder: pass") != std::string::npos);
    const Json j = Json::parse(slurp(out));
    CHECK(j["verdict"] == "pass");
    CHECK_FALSE(j["rows"].empty());
}

TEST_CASE("sweep reports crossings near 1/b^2") {
    TempDir t;
    const fs::path out = t.path / "sweep.json";
    pbh("sweep \"builtin:small_hypersphere(2,0.8)\" --param p --from 2 --to 4 --steps 21 --format json --out \"" + out.string() + "\"", t.path);
    const Json j = Json::parse(slurp(out));
    const Json& crossings = j["sweep"]["zero_crossings"];
    REQUIRE_FALSE(crossings.empty());
    for (const auto& c : crossings) CHECK(std::fabs(c["estimate"].get<double>() - 1.0 / 0.36) < 0.1);
}

TEST_CASE("builtin list and show") {
    TempDir t;
    CHECK(pbh("builtin list", t.path) == 0);
    CHECK(slurp(t.path / "stdout.txt").find("small_hypersphere") != std::string::npos);
    CHECK(pbh("builtin show \"inversion(3)\"", t.path) == 0);
    CHECK(Json::parse(slurp(t.path / "stdout.txt"))["kind"] == "map");
}

}
