#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bikeshare/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "bikeshare");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = bikeshare::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "bikeshare_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_params(const std::string& name, const json& j) {
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << j.dump();
    return path;
}

json analytic() {
    return {{"lambda", 1.0}, {"mu", 1.0},        {"gamma", 0.5},      {"omega", 0},
            {"capacity_c", 1}, {"capacity_k", 2}, {"n_stations", 100}, {"delta", 0.05}};
}

json station50() {
    return {{"lambda", 15.0}, {"mu", 8.0},         {"gamma", 0.25},      {"omega", 1},
            {"capacity_c", 30}, {"capacity_k", 50}, {"n_stations", 1000}, {"delta", 0.05}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fixed-point command") {
    const auto params = write_params("analytic.json", analytic());
    const auto out = scratch_dir() / "fp.json";
    fs::remove(out);
    const auto r = run({"fixed-point", "--params", params.string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(out));
    const auto p = j.at("p").get<std::vector<double>>();
    REQUIRE(p.size() == 3);
    CHECK(std::abs(p[0] - 4.0 / 7) < 1e-10);
    CHECK(std::abs(p[1] - 2.0 / 7) < 1e-10);
    CHECK(std::abs(p[2] - 1.0 / 7) < 1e-10);
    for (const char* key : {"rho", "a", "b", "residual", "iterations", "params"}) CHECK(j.contains(key));

    const std::string first = slurp(out);
    REQUIRE(run({"fixed-point", "--params", params.string(), "--out", out.string()}).code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("overrides") {
    const auto params = write_params("analytic_over.json", analytic());
    const auto r = run({"fixed-point", "--params", params.string(), "--set", "lambda=5", "--set", "mu=4", "--set",
                        "capacity_c=3", "--set", "capacity_k=4"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    for (double v : j.at("p").get<std::vector<double>>()) CHECK(std::abs(v - 0.2) < 1e-10);
}

TEST_CASE("error exits") {
    const auto missing = scratch_dir() / "does_not_exist.json";
    const auto out = scratch_dir() / "never.json";
    fs::remove(out);

    SUBCASE("missing params file") {
        const auto r = run({"fixed-point", "--params", missing.string(), "--out", out.string()});
        CHECK(r.code == 3);
        CHECK_FALSE(fs::exists(out));
        const auto e = json::parse(r.err);
        CHECK(e.at("exit_code") == 3);
        CHECK(e.contains("error"));
    }
    SUBCASE("usage") {
        CHECK(run({}).code == 2);
        CHECK(run({"frobnicate"}).code == 2);
        CHECK(run({"fixed-point"}).code == 2);
    }
    SUBCASE("bad parameter values") {
        auto bad = analytic();
        bad["capacity_c"] = 5;
        const auto path = write_params("bad.json", bad);
        CHECK(run({"fixed-point", "--params", path.string()}).code == 3);
    }
    SUBCASE("fixed point outside the domain") {
        json j = analytic();
        j["lambda"] = 100.0;
        j["mu"] = 0.5;
        const auto path = write_params("outside.json", j);
        const auto r = run({"fixed-point", "--params", path.string()});
        CHECK(r.code == 4);
        CHECK(json::parse(r.err).at("error") == "AssumptionViolationError");
    }
}

TEST_CASE("ode command") {
    const auto params = write_params("fig5_ode.json", station50());
    const auto out = scratch_dir() / "traj.csv";
    const auto r = run({"ode", "--params", params.string(), "--out", out.string(), "--t-end", "2", "--sample-interval",
                        "0.5"});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# params: ", 0) == 0);
    std::getline(csv, line);
    CHECK(line.rfind("t,y0,y1,", 0) == 0);
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 5);
    const auto terminal = json::parse(slurp(scratch_dir() / "traj.csv.terminal.json"));
    CHECK(terminal.at("y").size() == 51);
}

TEST_CASE("simulate command") {
    const auto params = write_params("fig5_sim.json", station50());
    const auto out = scratch_dir() / "sim.json";
    const auto r = run({"simulate", "--params", params.string(), "--out", out.string(), "--seed", "4", "--set",
                        "n_stations=50", "--set", "t_measure=5", "--set", "t_warmup=1"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j.at("seed") == 4);
    CHECK(j.at("time_avg_measure").size() == 51);
    CHECK(j.contains("event_counts"));
    CHECK(j.contains("independence_statistic"));
    const std::string first = slurp(out);
    REQUIRE(run({"simulate", "--params", params.string(), "--out", out.string(), "--seed", "4", "--set",
                 "n_stations=50", "--set", "t_measure=5", "--set", "t_warmup=1"})
                .code == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("sweep command") {
    const auto params = write_params("fig5_sweep.json", station50());
    const auto out = scratch_dir() / "sweep.csv";
    const auto r = run({"sweep", "--params", params.string(), "--out", out.string(), "--vary", "lambda", "--from", "10",
                        "--to", "30", "--points", "5"});
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(out));
    std::string line;
    std::getline(csv, line);
    CHECK(line.rfind("# params: ", 0) == 0);
    std::getline(csv, line);
    CHECK(line == "vary_name,value,p0,pK,p0_plus_pK,eq,profit");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 5);
}

TEST_CASE("optimize command") {
    json j = station50();
    j["search_c"] = {20, 30};
    j["search_k"] = {50};
    j["search_mu"] = {6.0, 8.0};
    j["beta"] = {1.0, 0.0, 0.0};
    const auto params = write_params("fig5_opt.json", j);
    const auto out = scratch_dir() / "opt.json";
    const auto grid = scratch_dir() / "opt_grid.csv";
    const auto r = run({"optimize", "--params", params.string(), "--out", out.string(), "--grid-out", grid.string()});
    REQUIRE(r.code == 0);
    const auto result = json::parse(slurp(out));
    CHECK(result.contains("winner"));
    CHECK(result.at("grid").size() == 4);
    CHECK(fs::exists(grid));
}

TEST_CASE("validate command") {
    const auto params = write_params("fig5_validate.json", station50());
    const auto r = run({"validate", "--params", params.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
}
