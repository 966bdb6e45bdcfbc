#include <doctest.h>

#include <gmq/cli.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "gmq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = gmq::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

const char* kConfig = R"({
  "instance": {"id": "cli-ab", "groups": [
      {"id": 1, "arms": [0.2, 0.4, 0.6, 0.8]},
      {"id": 2, "arms": [0.1, 0.3, 0.5, 0.7]}]},
  "mode": "finite",
  "params": {"eps": 0.2, "delta_gap": 0.05, "delta": 0.1},
  "trials": 4, "seed": 9
})";

}  // namespace

TEST_CASE("verify-lb passes on the default grid") {
    const auto r = cli({"verify-lb", "--eps", "0.2", "--delta-gap", "0.2", "--quiet"});
    CHECK(r.code == 0);
    CHECK(r.out.find("result: PASS") != std::string::npos);
    const auto bad = cli({"verify-lb", "--c-drift", "1", "--quiet"});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("offending point") != std::string::npos);
}

TEST_CASE("run reports a missing config by path") {
    const auto r = cli({"run", "--config", "missing.file"});
    CHECK(r.code != 0);
    CHECK(r.err.find("missing.file") != std::string::npos);
}

TEST_CASE("usage errors") {
    CHECK(cli({}).code != 0);
    CHECK(cli({"frobnicate"}).code != 0);
    const auto r = cli({"run", "--config", "x.json", "--bogus"});
    CHECK(r.code != 0);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("run, bound and sweep on a finite config") {
    const auto dir = scratch("gmq_cli_run");
    const auto cfg = (dir / "cfg.json").string();
    std::ofstream(cfg) << kConfig;

    const auto run = cli({"run", "--config", cfg, "--out", (dir / "out").string(), "--noiseless", "--trials", "3"});
    REQUIRE(run.code == 0);
    CHECK(run.out.find("\"success_rate\": 1.0") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "out" / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "out" / "summary.json"));

    const auto bound = cli({"bound", "--config", cfg, "--c", "1"});
    REQUIRE(bound.code == 0);
    CHECK(bound.out.find("finite_bound: 1799.294036") != std::string::npos);

    const auto sweep = cli({"sweep", "--config", cfg, "--delta-gap", "0.05,0.1", "--delta", "0.1,0.2",
                            "--noiseless", "--out", (dir / "sweep").string()});
    REQUIRE(sweep.code == 0);
    CHECK(std::filesystem::exists(dir / "sweep" / "sweep.csv"));
    CHECK(std::filesystem::exists(dir / "sweep" / "point_3.csv"));

    const auto invalid = cli({"run", "--config", cfg, "--delta", "1.5"});
    CHECK(invalid.code == 1);
    CHECK(invalid.err.find("delta") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("make-lb writes runnable configs and bound prints both bucket bounds") {
    const auto dir = scratch("gmq_cli_lb");
    const auto r = cli({"make-lb", "--eps", "0.2", "--delta-gap", "0.2", "--groups", "3", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto good = (dir / "lb-3g-2.json").string();
    REQUIRE(std::filesystem::exists(good));
    const auto b = cli({"bound", "--config", good, "--c", "1"});
    REQUIRE(b.code == 0);
    CHECK(b.out.find("bucket_bound: ") != std::string::npos);
    CHECK(b.out.find("weakened_bound: ") != std::string::npos);
    const auto run = cli({"run", "--config", good, "--trials", "2", "--threads", "1"});
    CHECK(run.code == 0);
    // relative output paths resolve next to the config, not the working directory
    CHECK(std::filesystem::exists(dir / "lb-3g-2-trials.csv"));
    CHECK(std::filesystem::exists(dir / "lb-3g-2-summary.json"));
    CHECK(cli({"make-lb", "--eps", "0.3", "--out", dir.string()}).code == 1);
    std::filesystem::remove_all(dir);
}
