#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridwalk/config.hpp"
#include "gridwalk/io.hpp"
#include "gridwalk/runner.hpp"

using gridwalk::ExperimentConfig;
using gridwalk::parse_config;
using gridwalk::run;
using gridwalk::RunResult;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("gridwalk_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> data_lines(const std::string& content) {
    std::vector<std::string> lines;
    std::istringstream is(content);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line[0] != '#') lines.push_back(line);
    }
    return lines;
}

ExperimentConfig make_cfg(const json& node, const std::string& sub,
                          const fs::path& out) {
    gridwalk::CliOverrides overrides;
    overrides.out = out.string();
    return parse_config(node, sub, overrides);
}

}  // namespace

TEST_CASE("feasibility run prints a JSON report") {
    const json node = json::parse(R"({
      "grid": {"kind": "two_sided", "slope_neg": 0.1, "slope_pos": 0.01},
      "gbm": {"mu": 2.0, "sigma2": 0.25, "s0": 1.0, "tau": 0.0002},
      "range": [-10000, 10000]
    })");
    const RunResult result = run(parse_config(node, "feasibility"));
    const json report = json::parse(result.report);
    CHECK(report["feasible"] == true);
    CHECK(report["first_violation"].is_null());

    json bad = node;
    bad["gbm"]["tau"] = 0.02;
    const RunResult bad_result = run(parse_config(bad, "feasibility"));
    const json bad_report = json::parse(bad_result.report);
    CHECK(bad_report["feasible"] == false);
    CHECK(bad_report["first_violation"]["index"] == 0);
    CHECK(bad_report["first_violation"]["inequality"] == 3);
}

TEST_CASE("propagate run emits per-step rows with tiny residuals") {
    TempDir dir("propagate");
    const json node = json::parse(R"({
      "grid": {"kind": "uniform", "h": 1.0},
      "moments": {"mean_step": 0.0, "var_step": 0.2},
      "n": 30,
      "k_max": 30
    })");
    const RunResult result = run(make_cfg(node, "propagate", dir.path));
    REQUIRE(result.files.size() == 1);
    const std::string content = slurp(result.files[0]);
    CHECK(content.rfind("# gridwalk", 0) == 0);
    const auto lines = data_lines(content);
    REQUIRE(lines.size() == 32);  // header + 31 steps
    CHECK(lines[0] ==
          "k,mean,variance,mass_at_boundary,max_recurrence_residual");
    // Final row: variance 0.2*30 = 6, residual below 1e-10.
    std::istringstream last(lines.back());
    std::string field;
    std::getline(last, field, ',');
    CHECK(field == "30");
    std::getline(last, field, ',');
    CHECK(std::abs(std::stod(field)) <= 1e-12);
    std::getline(last, field, ',');
    CHECK(std::stod(field) == doctest::Approx(6.0).epsilon(1e-10));
    std::getline(last, field, ',');
    std::getline(last, field, ',');
    CHECK(std::stod(field) <= 1e-10);
}

TEST_CASE("simulate run writes snapshots that do not depend on threads") {
    const json node = json::parse(R"({
      "grid": {"kind": "uniform", "h": 1.0},
      "moments": {"mean_step": 0.0, "var_step": 0.2},
      "n_paths": 500,
      "k_max": 200,
      "snapshots": [0, 200],
      "seed": 31
    })");

    TempDir dir1("sim1");
    json one = node;
    one["threads"] = 1;
    const RunResult r1 = run(make_cfg(one, "simulate", dir1.path));
    REQUIRE(r1.files.size() == 2);

    TempDir dir4("sim4");
    json four = node;
    four["threads"] = 4;
    const RunResult r4 = run(make_cfg(four, "simulate", dir4.path));
    REQUIRE(r4.files.size() == 2);

    CHECK(slurp(r1.files[0]) == slurp(r4.files[0]));
    CHECK(slurp(r1.files[1]) == slurp(r4.files[1]));

    // Idempotence: identical config and seed, byte-identical outputs.
    TempDir dir_again("sim_again");
    const RunResult r_again = run(make_cfg(one, "simulate", dir_again.path));
    CHECK(slurp(r1.files[1]) == slurp(r_again.files[1]));
}

TEST_CASE("simulate run with bins emits a histogram") {
    TempDir dir("simhist");
    const json node = json::parse(R"({
      "grid": {"kind": "uniform", "h": 1.0},
      "moments": {"mean_step": 0.0, "var_step": 0.2},
      "n_paths": 400,
      "k_max": 50,
      "snapshots": [50],
      "seed": 5,
      "bins": {"lo": -10.0, "hi": 10.0, "count": 20}
    })");
    const RunResult result = run(make_cfg(node, "simulate", dir.path));
    REQUIRE(result.files.size() == 1);
    CHECK(result.files[0].find("hist_k50.csv") != std::string::npos);
    const auto lines = data_lines(slurp(result.files[0]));
    REQUIRE(lines.size() == 21);  // header + 20 bins
    CHECK(lines[0] == "bin_lo,bin_hi,count,density");
    std::int64_t total = 0;
    for (std::size_t j = 1; j < lines.size(); ++j) {
        std::istringstream is(lines[j]);
        std::string f;
        std::getline(is, f, ',');
        std::getline(is, f, ',');
        std::getline(is, f, ',');
        total += std::stoll(f);
    }
    CHECK(total == 400);
}

TEST_CASE("heat run writes one profile per requested step") {
    TempDir dir("heat");
    const json node = json::parse(R"({
      "heat": {"alpha": 1.0, "tau": 0.01, "points": [0.5, 2.0]},
      "base_gap": 0.25,
      "n": 40,
      "k_list": [0, 40]
    })");
    const RunResult result = run(make_cfg(node, "heat", dir.path));
    REQUIRE(result.files.size() == 2);
    const auto rows0 = data_lines(slurp(result.files[0]));
    CHECK(rows0[0] ==
          "index,x,mass,density_estimate,analytic_density,analytic_cell_mass,"
          "abs_error,point_of_interest");
    // k=0 rows carry nan analytic columns.
    CHECK(rows0[1].find("nan") != std::string::npos);
    const auto rows40 = data_lines(slurp(result.files[1]));
    CHECK(rows40.size() == rows0.size());
    CHECK(rows40[1].find("nan") == std::string::npos);
}

TEST_CASE("gbm run writes snapshots, summary and sample paths") {
    TempDir dir("gbm");
    const json node = json::parse(R"({
      "grid": {"kind": "two_sided", "slope_neg": 0.1, "slope_pos": 0.01},
      "gbm": {"mu": 2.0, "sigma2": 0.25, "s0": 1.0, "tau": 0.0002},
      "n_paths": 300,
      "k_max": 120,
      "snapshots": [0, 120],
      "path_sample": 3,
      "seed": 9
    })");
    const RunResult result = run(make_cfg(node, "gbm", dir.path));
    REQUIRE(result.files.size() == 4);

    const auto summary = data_lines(slurp(dir.path / "summary.csv"));
    REQUIRE(summary.size() == 122);  // header + k = 0..120
    CHECK(summary[0] ==
          "k,mean_log_return,var_log_return,law_mean,law_variance,mean_price,"
          "expected_price");
    {
        // k = 0: everything is at the start state.
        std::istringstream is(summary[1]);
        std::string f;
        std::getline(is, f, ',');
        CHECK(f == "0");
        std::getline(is, f, ',');
        CHECK(std::stod(f) == 0.0);
        std::getline(is, f, ',');
        CHECK(std::stod(f) == 0.0);
    }

    const auto paths = data_lines(slurp(dir.path / "paths.csv"));
    CHECK(paths.size() == 1 + 3 * 121);
    CHECK(paths[0] == "path,k,price");

    const auto snap = data_lines(slurp(dir.path / "snapshot_k120.csv"));
    CHECK(snap.size() == 301);
}

TEST_CASE("gbm schedule run matches the homogeneous run when segments repeat") {
    const json base = json::parse(R"({
      "grid": {"kind": "two_sided", "slope_neg": 0.1, "slope_pos": 0.01},
      "gbm": {"mu": 2.0, "sigma2": 0.25, "s0": 1.0, "tau": 0.0002},
      "n_paths": 200,
      "k_max": 100,
      "snapshots": [100],
      "path_sample": 2,
      "seed": 4
    })");
    TempDir dir_plain("sched_plain");
    const RunResult plain = run(make_cfg(base, "gbm", dir_plain.path));

    json split = base;
    split["schedule"] = json::array(
        {{{"start_step", 0}, {"mu", 2.0}, {"sigma2", 0.25}},
         {{"start_step", 50}, {"mu", 2.0}, {"sigma2", 0.25}}});
    TempDir dir_split("sched_split");
    const RunResult split_result = run(make_cfg(split, "gbm", dir_split.path));

    // Config comments differ (one records the schedule); the data must not.
    CHECK(data_lines(slurp(dir_plain.path / "snapshot_k100.csv")) ==
          data_lines(slurp(dir_split.path / "snapshot_k100.csv")));
    CHECK(data_lines(slurp(dir_plain.path / "paths.csv")) ==
          data_lines(slurp(dir_split.path / "paths.csv")));
}

TEST_CASE("wasserstein runs in both modes") {
    TempDir dir("w1");
    const json inline_node = json::parse(R"({
      "grid": {"kind": "uniform", "h": 0.01818181818181818},
      "gbm": {"mu": 2.0, "sigma2": 0.25, "s0": 1.0, "tau": 0.0002},
      "n_paths": 2000,
      "k_max": 200,
      "k_list": [10, 200],
      "seed": 2
    })");
    const RunResult inline_result = run(make_cfg(inline_node, "wasserstein", dir.path));
    REQUIRE(inline_result.files.size() == 1);
    const auto rows = data_lines(slurp(inline_result.files[0]));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "k,w1");

    // File mode over one of this run's snapshots.
    TempDir snap_dir("w1snap");
    json sim = json::parse(R"({
      "grid": {"kind": "uniform", "h": 0.01818181818181818},
      "gbm": {"mu": 2.0, "sigma2": 0.25, "s0": 1.0, "tau": 0.0002},
      "n_paths": 2000,
      "k_max": 200,
      "snapshots": [200],
      "seed": 2
    })");
    const RunResult sim_result = run(make_cfg(sim, "simulate", snap_dir.path));
    json file_node = {
        {"snapshot_csv", sim_result.files[0]},
        {"law", {{"mean", 0.075}, {"variance", 0.01}}},
        {"k_label", 200}};
    TempDir file_dir("w1file");
    const RunResult file_result = run(make_cfg(file_node, "wasserstein", file_dir.path));
    const auto file_rows = data_lines(slurp(file_result.files[0]));
    REQUIRE(file_rows.size() == 2);
    CHECK(file_rows[1].rfind("200,", 0) == 0);
}

TEST_CASE("staged outputs vanish when not committed") {
    TempDir dir("stage");
    {
        gridwalk::OutputStage stage(dir.path.string());
        stage.add("a.csv", "abc\n");
        // no commit
    }
    CHECK(!fs::exists(dir.path / "a.csv"));
    CHECK(fs::is_empty(dir.path));
}
