#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "stacktherm/formats.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using stacktherm::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (testutil::data_dir() / rel).string(); }

int count_lines_starting(const std::string& text, const std::string& prefix) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) ++n;
    return n;
}

// Restores the previous value of the config-dir variable on scope exit.
struct EnvGuard {
    std::string saved;
    bool had = false;
    explicit EnvGuard(const std::string& value) {
        if (const char* v = std::getenv(stacktherm::cli::kConfigDirEnv)) {
            saved = v;
            had = true;
        }
        setenv(stacktherm::cli::kConfigDirEnv, value.c_str(), 1);
    }
    ~EnvGuard() {
        if (had) setenv(stacktherm::cli::kConfigDirEnv, saved.c_str(), 1);
        else unsetenv(stacktherm::cli::kConfigDirEnv);
    }
};

}  // namespace

TEST_CASE("run prints a block report") {
    const auto r = invoke({"run", "--lcf", data("stack3.lcf"), "--ptrace", data("ptrace/s1.ptrace"),
                           "--grid", "16x16"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("unit,max_K,mean_K\n", 0) == 0);
    CHECK(count_lines_starting(r.out, "__hotspot__") == 1);
    CHECK(count_lines_starting(r.out, "P") == 8);
}

TEST_CASE("run json output parses back") {
    const auto r = invoke({"run", "--lcf", data("stack3.lcf"), "--ptrace", data("ptrace/s3.ptrace"),
                           "--grid", "16x16", "--format", "json"});
    CHECK(r.code == 0);
    const auto report = stacktherm::read_block_report_json(r.out);
    CHECK(report.hotspot_units() == std::vector<std::string>{"P2", "P3", "P6", "P7"});
}

TEST_CASE("input errors exit with the usage code") {
    const auto missing = invoke({"run", "--lcf", "/no/such/stack.lcf", "--ptrace", data("ptrace/s1.ptrace")});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("/no/such/stack.lcf") != std::string::npos);

    const auto coarse = invoke({"run", "--lcf", data("stack3.lcf"), "--ptrace", data("ptrace/s1.ptrace"),
                                "--grid", "4x4"});
    CHECK(coarse.code == 2);

    const auto malformed = invoke({"run", "--lcf", data("stack3.lcf"), "--ptrace",
                                   (testutil::fixture_dir() / "malformed" / "ptrace_negative.ptrace").string()});
    CHECK(malformed.code == 2);
    CHECK(malformed.err.find("ptrace_negative.ptrace") != std::string::npos);
    CHECK(malformed.err.find(":3:") != std::string::npos);

    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"scenarios", "--method", "lu"}).code == 2);
}

TEST_CASE("direct solver refusal maps to the solver exit code") {
    const auto r = invoke({"scenarios", "--only", "S1", "--grid", "64x64", "--method", "direct"});
    CHECK(r.code == 3);
    CHECK(r.err.find("cg") != std::string::npos);
}

TEST_CASE("scenarios prints every run and the ordering") {
    const auto r = invoke({"scenarios", "--grid", "16x16"});
    REQUIRE(r.code == 0);
    CHECK(count_lines_starting(r.out, "# scenario ") == 7);
    CHECK(count_lines_starting(r.out, "unit,max_K,mean_K") == 7);
    CHECK(r.out.find("# ordering S3>S1>S5>S4>S2\n") != std::string::npos);

    const auto one = invoke({"scenarios", "--grid", "16x16", "--only", "S4"});
    CHECK(one.code == 0);
    CHECK(count_lines_starting(one.out, "# scenario ") == 1);
    CHECK(one.out.find("# ordering") == std::string::npos);

    CHECK(invoke({"scenarios", "--only", "S9"}).code == 2);
}

TEST_CASE("sweep prints one row per value plus plot data and trend") {
    const auto r = invoke({"sweep", "resistivity", "0.25,0.0625,0.125", "--grid", "16x16"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "param,hotspot_K,hotspot_units");
    std::vector<std::string> rows;
    while (std::getline(in, line) && !line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].rfind("6.250000e-02,", 0) == 0);
    CHECK(rows[2].rfind("2.500000e-01,", 0) == 0);
    CHECK(r.out.find("# param hotspot_K") != std::string::npos);
    CHECK(r.out.find("# trend:") != std::string::npos);

    const auto single = invoke({"sweep", "thickness", "2e-5", "--grid", "16x16"});
    CHECK(single.code == 0);
    CHECK(count_lines_starting(single.out, "2.000000e-05,") == 1);

    CHECK(invoke({"sweep", "thickness", "2e-5,-1e-5"}).code == 2);
    CHECK(invoke({"sweep", "thickness", "2e-5,abc"}).code == 2);
    CHECK(invoke({"sweep", "conductivity", "1"}).code == 2);
}

TEST_CASE("sweep writes plot data to a separate file") {
    const auto dir = fs::temp_directory_path() / "stacktherm_cli_test";
    fs::create_directories(dir);
    const auto plot = dir / "plot.dat";
    const auto r = invoke({"sweep", "resistivity", "0.1,0.2", "--grid", "16x16", "--plot", plot.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("# param hotspot_K") == std::string::npos);
    std::ifstream in(plot);
    std::string first;
    std::getline(in, first);
    CHECK(first == "# param hotspot_K");
    fs::remove_all(dir);
}

TEST_CASE("validate passes and the corrupted self test fails") {
    const auto ok = invoke({"validate", "--grid", "8x8"});
    CHECK(ok.code == 0);
    CHECK(count_lines_starting(ok.out, "FAIL") == 0);
    CHECK(count_lines_starting(ok.out, "PASS") == 8);

    const auto bad = invoke({"validate", "--grid", "8x8", "--self-test-fail"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("FAIL oracle-uniform-stack") != std::string::npos);
}

TEST_CASE("identical invocations give identical bytes") {
    const std::vector<std::string> args = {"scenarios", "--grid", "24x24", "--format", "json"};
    const auto a = invoke(args);
    const auto b = invoke(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);

    const std::vector<std::string> sweep = {"sweep", "thickness", "1e-5,2e-5", "--grid", "16x16", "--jobs", "2"};
    CHECK(invoke(sweep).out == invoke(sweep).out);
}

TEST_CASE("relative inputs resolve against the config directory") {
    EnvGuard env(testutil::data_dir().string());
    const auto r = invoke({"run", "--lcf", "stack3.lcf", "--ptrace", "ptrace/s2.ptrace", "--grid", "16x16"});
    CHECK(r.code == 0);
    CHECK(count_lines_starting(r.out, "M") == 4);
}
