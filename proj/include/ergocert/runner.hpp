#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergocert/classify.hpp"
#include "ergocert/config.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/hitting.hpp"
#include "ergocert/models.hpp"
#include "ergocert/montecarlo.hpp"
#include "ergocert/report.hpp"
#include "ergocert/truncation.hpp"

namespace ergocert {

/// What a run wrote, plus a short line for the terminal.
struct RunResult {
    std::vector<std::filesystem::path> files;
    std::string headline;
};

/// The finite kernel a solve works on: the inline table as is, otherwise the
/// model discretized on its grid with escaped mass routed into the target or
/// dropped.
inline FiniteKernel solve_kernel(const Model& m, const RunConfig& c) {
    if (m.table) return *m.table;
    FiniteKernel fk = discretize(m.kernel, default_grid(m, c.grid.cutoff, c.grid.bin_width));
    if (c.grid.escape == EscapeRule::route_to_target) fk = route_escape(fk, m.target);
    return fk;
}

inline std::vector<double> default_ladder(const Model& m) {
    switch (m.family) {
    case Family::example1: return {2, 4, 8, 16, 32, 64, 128, 256};
    case Family::example2: return {8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
    case Family::ar1: return {2, 4, 8, 16, 32};
    case Family::finite: break;
    }
    throw ConfigError("truncation.ladder", "is required for inline kernels");
}

/// Nested compacts [lo, M) for each cutoff M, over a base grid reaching the
/// largest cutoff. Symmetric models use [-M, M).
inline TruncationFamily ladder_family(const Model& m, const std::vector<double>& ladder, double bin_width = 0.0) {
    if (ladder.empty()) throw ConfigError("truncation.ladder", "ladder is empty");
    TruncationFamily fam;
    fam.target = m.target;
    fam.base = m.table ? *m.table : discretize(m.kernel, default_grid(m, ladder.back(), bin_width));
    const bool symmetric = m.family == Family::ar1;
    for (double M : ladder) {
        fam.ladder.push_back(Region::half_open(symmetric ? -M : 0.0, M));
        fam.labels.push_back("M=" + fmt(M));
    }
    return fam;
}

namespace detail {

inline nlohmann::json embedded(const RunConfig& c, const Model& m, const std::string& command) {
    RunConfig copy = c;
    copy.command = command;
    return to_json(copy, &m);
}

inline std::filesystem::path out_path(const RunConfig& c, const char* name) {
    return std::filesystem::path(c.out_dir) / name;
}

inline nlohmann::json solve_json(const MinSolResult& r) {
    return {{"status", r.label()},
            {"iterations", r.iterations},
            {"increment", jnum(r.increment)},
            {"residual", jnum(r.residual)},
            {"capped_states", r.diverged_at.size()}};
}

}  // namespace detail

/// report.json, summary.txt and margins.csv for the configured criteria.
inline RunResult run_classify(const RunConfig& c) {
    const Model m = build_model(c);
    ClassifyOptions opt;
    opt.settings = c.checks;
    opt.criteria = c.criteria;
    opt.family = c.family;
    const Classification cl = classify(m, opt);

    nlohmann::json report = to_json(cl);
    report["config"] = detail::embedded(c, m, "classify");
    RunResult out;
    out.files = {detail::out_path(c, "report.json"), detail::out_path(c, "summary.txt"),
                 detail::out_path(c, "margins.csv")};
    write_json(out.files[0], report);
    write_atomic(out.files[1], summary_text(cl));
    write_atomic(out.files[2], margins_csv(cl));
    out.headline = summary_text(cl);
    return out;
}

/// solution.csv with L, E tau and each requested geometric sum per state;
/// solution.json with the status of each solve.
inline RunResult run_solve(const RunConfig& c) {
    const Model m = build_model(c);
    const FiniteKernel fk = solve_kernel(m, c);
    const MinSolResult L = return_probability(fk, m.target, c.solver);
    const MinSolResult T = expected_return_time(fk, m.target, c.solver);
    std::vector<MinSolResult> G;
    for (double r : c.rates) G.push_back(geometric_sum(fk, m.target, r, c.solver));

    std::vector<std::string> header = {"state", "L", "E_tau"};
    for (double r : c.rates) header.push_back("geometric_sum_r=" + fmt(r));
    header.push_back("status");
    Csv csv(header);
    for (std::size_t i = 0; i < fk.size(); ++i) {
        std::vector<std::string> row = {fmt(fk.points[i]), fmt(L.solution[i]), fmt(T.solution[i])};
        bool capped = L.solution.capped(i) || T.solution.capped(i);
        for (const auto& g : G) {
            row.push_back(fmt(g.solution[i]));
            capped = capped || g.solution.capped(i);
        }
        row.push_back(capped ? "exceeds-cap" : "ok");
        csv.row(row);
    }

    nlohmann::json solves = {{"L", detail::solve_json(L)}, {"E_tau", detail::solve_json(T)}};
    for (std::size_t k = 0; k < G.size(); ++k) solves["geometric_sum_r=" + fmt(c.rates[k])] = detail::solve_json(G[k]);
    nlohmann::json j = {{"model", m.name},
                        {"kernel", fk.provenance},
                        {"states", fk.size()},
                        {"max_escape_defect", jnum(fk.max_mass_defect())},
                        {"solves", solves},
                        {"config", detail::embedded(c, m, "solve")}};

    RunResult out;
    out.files = {detail::out_path(c, "solution.csv"), detail::out_path(c, "solution.json")};
    write_atomic(out.files[0], csv.str());
    write_json(out.files[1], j);
    out.headline = "solve " + m.name + ": L " + L.label() + ", E_tau " + T.label();
    for (std::size_t k = 0; k < G.size(); ++k) out.headline += ", geometric_sum_r=" + fmt(c.rates[k]) + " " + G[k].label();
    out.headline += "\n";
    return out;
}

/// mc_summary.json and survival.csv for return times from mc.start.
inline RunResult run_simulate(const RunConfig& c) {
    const Model m = build_model(c);
    const double x0 = c.mc.start.value_or(0.0);
    const ReturnTimeStats st = estimate_return_time(m.kernel, m.target, x0, c.mc.paths, c.mc.horizon, c.mc.seed);
    nlohmann::json j = to_json(st);
    j["model"] = m.name;
    j["config"] = detail::embedded(c, m, "simulate");
    if (m.table) {
        const MinSolResult T = expected_return_time(*m.table, m.target, c.solver);
        const auto i = static_cast<std::size_t>(x0);
        if (x0 >= 0.0 && i < T.solution.size() && static_cast<double>(i) == x0) j["solver_mean"] = jnum(T.solution[i]);
    }
    RunResult out;
    out.files = {detail::out_path(c, "mc_summary.json"), detail::out_path(c, "survival.csv")};
    write_json(out.files[0], j);
    write_atomic(out.files[1], survival_csv(st));
    out.headline = "simulate " + m.name + ": mean " + fmt(st.mean) + " se " + fmt(st.se) + " censored " +
                   std::to_string(st.n_censored) + "/" + std::to_string(st.n_paths) + "\n";
    return out;
}

/// truncation.csv holds E tau on every rung, one column per rung, blank
/// outside the rung's compact; rungs.csv has one summary row per rung.
inline RunResult run_truncate_study(const RunConfig& c) {
    const Model m = build_model(c);
    const std::vector<double> ladder = c.ladder.empty() ? default_ladder(m) : c.ladder;
    const TruncationFamily fam = ladder_family(m, ladder, c.grid.bin_width);
    const HittingSequence hs = hitting_sequence(fam, c.solver);

    std::vector<std::string> header = {"state"};
    for (const auto& l : fam.labels) header.push_back("E_tau@" + l);
    Csv wide(header);
    const auto& largest = hs.rungs.back().to_base;
    for (std::size_t b : largest) {
        std::vector<std::string> row = {fmt(fam.base.points[b])};
        for (std::size_t r = 0; r < hs.rungs.size(); ++r) {
            const auto v = hs.value(r, b);
            row.push_back(v ? fmt(*v) : std::string());
        }
        wide.row(row);
    }

    Csv rungs({"rung", "cutoff", "states", "sup_off_target", "stochastic_deviation", "status", "iterations"});
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t r = 0; r < hs.rungs.size(); ++r) {
        rungs.row({std::to_string(r + 1), fmt(ladder[r]), std::to_string(hs.rungs[r].to_base.size()),
                   fmt(hs.sup_off_target[r]), fmt(hs.stochastic_deviation[r]), hs.solutions[r].label(),
                   std::to_string(hs.solutions[r].iterations)});
        per.push_back({{"cutoff", ladder[r]},
                       {"sup_off_target", jnum(hs.sup_off_target[r])},
                       {"stochastic_deviation", jnum(hs.stochastic_deviation[r])},
                       {"solve", detail::solve_json(hs.solutions[r])}});
    }
    nlohmann::json j = {{"model", m.name},
                        {"base", fam.base.provenance},
                        {"worst_monotonicity_step", jnum(hs.worst_monotonicity)},
                        {"rungs", per},
                        {"config", detail::embedded(c, m, "truncate-study")}};

    RunResult out;
    out.files = {detail::out_path(c, "truncation.csv"), detail::out_path(c, "rungs.csv"),
                 detail::out_path(c, "truncation.json")};
    write_atomic(out.files[0], wide.str());
    write_atomic(out.files[1], rungs.str());
    write_json(out.files[2], j);
    out.headline = "truncate-study " + m.name + ": " + std::to_string(hs.rungs.size()) + " rungs, sup off target " +
                   fmt(hs.sup_off_target.back()) + "\n";
    return out;
}

inline RunResult run_command(const std::string& command, const RunConfig& c) {
    if (command == "classify") return run_classify(c);
    if (command == "solve") return run_solve(c);
    if (command == "simulate") return run_simulate(c);
    if (command == "truncate-study") return run_truncate_study(c);
    throw ConfigError("command", "unknown command '" + command + "'");
}

}  // namespace ergocert
