#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ergocert/runner.hpp"

using namespace ergocert;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ergocert-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        rows.push_back(f);
    }
    return rows;
}

RunConfig config_from(json j, const fs::path& out) {
    j["output"] = {{"dir", out.string()}};
    return parse_config(j);
}

std::string field_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

const json three_state_rows = json::parse(R"([[[1, 1.0]], [[0, 0.5], [2, 0.5]], [[0, 1.0]]])");

}  // namespace

TEST(Config, ErrorsNameTheField) {
    const json base = {{"model", {{"preset", "ex1-uniform"}}}};
    auto with = [&](const std::string& key, json v) {
        json j = base;
        j[key] = std::move(v);
        return j;
    };
    EXPECT_EQ(field_of(with("grid", {{"bin_width", 0.0}})), "grid.bin_width");
    EXPECT_EQ(field_of(with("grid", {{"bin_width", -1}})), "grid.bin_width");
    EXPECT_EQ(field_of(with("grid", {{"escape", "teleport"}})), "grid.escape");
    EXPECT_EQ(field_of(with("gird", json::object())), "gird");
    EXPECT_EQ(field_of(with("solver", {{"tol", -1e-3}})), "solver.tol");
    EXPECT_EQ(field_of(with("solver", {{"scheme", "sor"}})), "solver.scheme");
    EXPECT_EQ(field_of(with("solve", {{"rates", {0.5}}})), "solve.rates");
    EXPECT_EQ(field_of(with("truncation", {{"ladder", {8, 4}}})), "truncation.ladder");
    EXPECT_EQ(field_of(with("mc", {{"paths", 0}})), "mc.paths");
    EXPECT_EQ(field_of(json::object()), "model");
    EXPECT_EQ(field_of({{"model", {{"preset", "ex1-uniform"}, {"inline", {{"rows", three_state_rows}}}}}}), "model");
    EXPECT_EQ(field_of(base), "<accepted>");
}

TEST(Config, PresetParameterErrorsSurfaceOnBuild) {
    const RunConfig c = parse_config({{"model", {{"preset", "ex1-sin"}, {"params", {{"a", 0.5}}}}}});
    try {
        build_model(c);
        FAIL() << "accepted a = 0.5";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "model.params.a");
    }
    const RunConfig noA = parse_config({{"model", {{"inline", {{"rows", three_state_rows}}}}}});
    EXPECT_THROW(build_model(noA), ConfigError);
}

TEST(Config, RegionRoundTrip) {
    const std::vector<Region> regions = {Region::states({0.0, 3.0, 7.0}), Region::closed(0.0, 1.0),
                                         Region::half_open(-1.0, 1.0), Region::open(2.0, 5.5)};
    for (const auto& r : regions) {
        const json j = region_to_json(r);
        const Region back = parse_region(j, "target");
        EXPECT_EQ(region_to_json(back), j);
        for (double x : {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0, 5.5, 7.0}) EXPECT_EQ(back.contains(x), r.contains(x)) << j << x;
    }
}

TEST(Config, NormalizedFormParsesToItself) {
    const RunConfig c = load_config(ERGOCERT_CONFIG_DIR "/solve_three_state.json");
    const json once = to_json(c);
    EXPECT_EQ(to_json(parse_config(once)), once);
}

TEST(Runner, ThreeStateSolution) {
    const fs::path out = scratch("three-state");
    json j = {{"command", "solve"},
              {"model", {{"inline", {{"rows", three_state_rows}}}}},
              {"target", {{"states", {0}}}},
              {"solve", {{"rates", {1.1}}}}};
    const RunResult r = run_solve(config_from(j, out));
    const auto rows = read_csv(out / "solution.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"state", "L", "E_tau", "geometric_sum_r=1.1", "status"}));
    // E_0 tau = 1 + 0.5*1 + 0.5*2 = 2.5; E_1 = 1.5; E_2 = 1
    const double expected_tau[] = {2.5, 1.5, 1.0};
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(std::stod(rows[i + 1][0]), i);
        EXPECT_NEAR(std::stod(rows[i + 1][1]), 1.0, 1e-10);
        EXPECT_NEAR(std::stod(rows[i + 1][2]), expected_tau[i], 1e-10);
        EXPECT_EQ(rows[i + 1][4], "ok");
    }
    // sum_{n < tau} r^n: G(2) = 1, G(1) = 1 + 0.5 r, G(0) = 1 + r G(1)
    EXPECT_NEAR(std::stod(rows[3][3]), 1.0, 1e-10);
    EXPECT_NEAR(std::stod(rows[2][3]), 1.55, 1e-10);
    EXPECT_NEAR(std::stod(rows[1][3]), 1.0 + 1.1 * 1.55, 1e-10);
    const json sol = json::parse(slurp(out / "solution.json"));
    EXPECT_EQ(sol["solves"]["L"]["status"], "converged");
    EXPECT_NE(r.headline.find("E_tau converged"), std::string::npos) << r.headline;
}

TEST(Runner, DivergentSumIsReportedNotThrown) {
    const fs::path out = scratch("divergent");
    RunConfig c = load_config(ERGOCERT_CONFIG_DIR "/solve_divergent.json");
    c.out_dir = out.string();
    const RunResult r = run_solve(c);
    EXPECT_NE(r.headline.find("geometric_sum_r=1.05 exceeds-cap"), std::string::npos) << r.headline;
    const auto rows = read_csv(out / "solution.csv");
    int capped = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) capped += rows[i].back() == "exceeds-cap";
    EXPECT_GT(capped, 0);
    const json sol = json::parse(slurp(out / "solution.json"));
    EXPECT_EQ(sol["solves"]["L"]["status"], "converged");
}

TEST(Runner, ClassifySummaries) {
    {
        RunConfig c = load_config(ERGOCERT_CONFIG_DIR "/classify_ex1_powerlaw.json");
        c.out_dir = scratch("powerlaw").string();
        const RunResult r = run_classify(c);
        EXPECT_NE(r.headline.find("transient: certificate-valid"), std::string::npos) << r.headline;
        EXPECT_NE(r.headline.find("flag transient: yes"), std::string::npos) << r.headline;
    }
    {
        const fs::path out = scratch("sin");
        const RunConfig c = config_from({{"model", {{"preset", "ex1-sin"}}}, {"criteria", {"strongly-ergodic"}}}, out);
        const RunResult r = run_classify(c);
        EXPECT_NE(r.headline.find("strongly-ergodic: certificate-valid"), std::string::npos) << r.headline;
        const auto margins = read_csv(out / "margins.csv");
        ASSERT_GT(margins.size(), 1u);
        EXPECT_EQ(margins[0], (std::vector<std::string>{"criterion", "condition", "rung", "worst_margin", "at"}));
        const json rep = json::parse(slurp(out / "report.json"));
        EXPECT_EQ(rep["checks"][0]["status"], "certificate-valid");
        EXPECT_EQ(rep["config"]["model"]["preset"], "ex1-sin");
    }
}

TEST(Runner, ReplayFromEmbeddedConfigIsBitIdentical) {
    struct Case {
        json config;
        const char* record;
    };
    const std::vector<Case> cases = {
        {{{"command", "classify"}, {"model", {{"preset", "ex1-sin"}}}, {"criteria", {"strongly-ergodic"}}},
         "report.json"},
        {{{"command", "solve"},
          {"model", {{"inline", {{"rows", three_state_rows}}}}},
          {"target", {{"states", {0}}}},
          {"solve", {{"rates", {1.2}}}}},
         "solution.json"},
        {{{"command", "simulate"},
          {"model", {{"preset", "ex2-constant"}}},
          {"mc", {{"paths", 2000}, {"horizon", 512}, {"seed", 99}, {"start", 3}}}},
         "mc_summary.json"},
        {{{"command", "truncate-study"}, {"model", {{"preset", "ex2-harmonic"}}}, {"truncation", {{"ladder", {8, 16, 32}}}}},
         "truncation.json"},
    };
    for (const auto& tc : cases) {
        const std::string cmd = tc.config["command"];
        const fs::path out = scratch("replay-" + cmd);
        const RunResult first = run_command(cmd, config_from(tc.config, out));
        std::map<fs::path, std::string> before;
        for (const auto& f : first.files) before[f] = slurp(f);

        const json embedded = json::parse(before.at(out / tc.record))["config"];
        fs::remove_all(out);
        const RunResult again = run_command(cmd, parse_config(embedded));
        ASSERT_EQ(again.files, first.files) << cmd;
        for (const auto& f : again.files) EXPECT_EQ(slurp(f), before.at(f)) << f;
    }
}

TEST(Runner, TruncationColumnsIncreaseAlongTheLadder) {
    const fs::path out = scratch("truncate");
    RunConfig c = load_config(ERGOCERT_CONFIG_DIR "/truncate_ex2_harmonic.json");
    c.out_dir = out.string();
    run_truncate_study(c);
    const auto rows = read_csv(out / "truncation.csv");
    ASSERT_GT(rows.size(), 2u);
    EXPECT_EQ(rows[0].size(), 9u);
    EXPECT_EQ(rows[0][1], "E_tau@M=8");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double prev = 0.0;
        for (std::size_t k = 1; k < rows[i].size(); ++k) {
            if (rows[i][k].empty()) continue;
            const double v = std::stod(rows[i][k]);
            EXPECT_GE(v, prev - 1e-9) << "state " << rows[i][0] << " column " << k;
            prev = v;
        }
    }
    const auto rungs = read_csv(out / "rungs.csv");
    ASSERT_EQ(rungs.size(), 9u);
    EXPECT_GT(std::stod(rungs.back()[3]), std::stod(rungs[1][3]));
}

TEST(Runner, UnknownCommandIsAConfigError) {
    const RunConfig c = parse_config({{"model", {{"preset", "ex1-uniform"}}}});
    EXPECT_THROW(run_command("optimize", c), ConfigError);
}
