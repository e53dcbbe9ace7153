#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

#include "qcflow/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using qcflow::cli::run_command;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("qcflow_cli_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json read_report(const fs::path& dir, const std::string& name) {
    std::ifstream in(dir / (name + "_report.json"));
    REQUIRE(in.good());
    return json::parse(in);
}

}  // namespace

TEST_CASE("usage errors and help") {
    CHECK(run_command({}) == 1);
    CHECK(run_command({"seminorm", "--no-such-flag"}) == 1);
    CHECK(run_command({"--help"}) == 0);
    CHECK(run_command({"definitely-not-a-command"}) == 1);
}

TEST_CASE("catalog listing") {
    auto dir = fresh_dir("catalog");
    CHECK(run_command({"catalog", "--out-dir", dir.string()}) == 0);
    json rep = read_report(dir, "catalog");
    CHECK(rep["command"][0] == "catalog");
    CHECK(rep["results"]["entries"].size() >= 13);
}

TEST_CASE("unknown inputs map to exit 2") {
    auto dir = fresh_dir("unknown");
    CHECK(run_command({"seminorm", "--catalog", "nope", "--out-dir", dir.string()}) == 2);

    fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "{ this is not json";
    CHECK(run_command({"seminorm", "--spec", bad.string(), "--out-dir",
                       dir.string()}) == 2);

    fs::path badfield = dir / "badfield.json";
    std::ofstream(badfield) << R"({"n": 2, "field": "x1 + ; x2"})";
    CHECK(run_command({"seminorm", "--spec", badfield.string(), "--out-dir",
                       dir.string()}) == 2);
}

TEST_CASE("seminorm report contents") {
    auto dir = fresh_dir("seminorm");
    CHECK(run_command({"seminorm", "--catalog", "rotation2d", "--base-points", "40",
                       "--pairs", "40", "--out-dir", dir.string()}) == 0);
    json rep = read_report(dir, "seminorm");
    CHECK(rep["results"]["Q"]["value"].get<double>() <= 1e-6);
    CHECK(rep["results"]["Lipschitz"]["value"].get<double>() ==
          doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep["results"]["chain"]["verdict"] == "PASS");
    CHECK(rep.contains("timing_ms"));
    CHECK(rep.contains("provenance"));
}

TEST_CASE("results are byte-reproducible under a fixed seed") {
    auto d1 = fresh_dir("repro1");
    auto d2 = fresh_dir("repro2");
    std::vector<std::string> args = {"seminorm", "--catalog", "xloga",
                                     "--base-points", "30", "--pairs", "30",
                                     "--seed", "7"};
    auto run_in = [&](const fs::path& d) {
        auto a = args;
        a.push_back("--out-dir");
        a.push_back(d.string());
        REQUIRE(run_command(a) == 0);
        return read_report(d, "seminorm");
    };
    json r1 = run_in(d1);
    json r2 = run_in(d2);
    CHECK(r1["results"].dump() == r2["results"].dump());
    CHECK(r1["config"].dump() == r2["config"].dump());
}

TEST_CASE("involutivity exit codes discriminate") {
    auto dir = fresh_dir("inv");
    CHECK(run_command({"involutivity", "--catalog", "contact3d", "--residual-grid",
                       "5", "--out-dir", dir.string()}) == 4);
    json rep = read_report(dir, "involutivity");
    CHECK(rep["results"]["involutive"] == false);
    CHECK(rep["results"]["max_residual"].get<double>() >= 0.4);

    CHECK(run_command({"involutivity", "--catalog", "graph-xy3d", "--residual-grid",
                       "5", "--out-dir", dir.string()}) == 0);
}

TEST_CASE("flow command writes a trajectory CSV") {
    auto dir = fresh_dir("flow");
    CHECK(run_command({"flow", "--catalog", "rotation2d", "--x0", "1,0", "--t", "1.5",
                       "--samples", "16", "--out-dir", dir.string()}) == 0);
    CHECK(fs::exists(dir / "flow_report.json"));
    std::ifstream csv(dir / "flow_trajectory.csv");
    REQUIRE(csv.good());
    std::string header;
    std::getline(csv, header);
    CHECK(header.substr(0, 2) == "t,");
    int rows = 0;
    for (std::string line; std::getline(csv, line);) ++rows;
    CHECK(rows >= 16);
}

TEST_CASE("distortion command flags Liouville violations") {
    auto dir = fresh_dir("dist");
    CHECK(run_command({"distortion", "--catalog", "rotation2d", "--times", "0.5,1",
                       "--grid", "3", "--out-dir", dir.string()}) == 0);
    json rep = read_report(dir, "distortion");
    CHECK(rep["results"]["liouville_pass"] == true);

    // An impossible hand-forced bound must trip exit 4 (det = e^{0.1 t}
    // cannot fit inside the e^{0.01 |t|} corridor).
    CHECK(run_command({"distortion", "--catalog", "linear(0.2,0;0,-0.1)", "--times",
                       "1", "--grid", "3", "--div-bound", "0.01", "--out-dir",
                       dir.string()}) == 4);
}

TEST_CASE("mollify command reports a decreasing error sequence") {
    auto dir = fresh_dir("moll");
    CHECK(run_command({"mollify", "--catalog", "abskink", "--eps", "0.4,0.2,0.1",
                       "--t", "0.5", "--grid", "3", "--out-dir", dir.string()}) == 0);
    json rep = read_report(dir, "mollify");
    auto seq = rep["results"]["sequence"];
    REQUIRE(seq.size() == 3);
    CHECK(rep["results"]["strictly_decreasing"] == true);
}

TEST_CASE("chart command exports report and slice meshes") {
    auto dir = fresh_dir("chart");
    CHECK(run_command({"chart", "--catalog", "coords(2,3)", "--slices", "2",
                       "--resolution", "5", "--out-dir", dir.string()}) == 0);
    json rep = read_report(dir, "chart");
    CHECK(rep["results"]["eps"].get<double>() > 0.0);
    CHECK(fs::exists(dir / "slice_0.csv"));
    CHECK(fs::exists(dir / "slice_1.csv"));

    CHECK(run_command({"chart", "--catalog", "contact3d", "--out-dir",
                       dir.string()}) == 4);
}
