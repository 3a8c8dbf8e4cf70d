#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergocert/classify.hpp"
#include "ergocert/error.hpp"
#include "ergocert/grid.hpp"
#include "ergocert/minsol.hpp"
#include "ergocert/models.hpp"
#include "ergocert/region.hpp"

namespace ergocert {

using json = nlohmann::json;

enum class EscapeRule { route_to_target, absorb };

struct ModelConfig {
    std::string preset;  ///< empty for inline tables
    std::map<std::string, double> params;
    std::vector<std::vector<Entry>> rows;
};

struct GridConfig {
    double cutoff = 0.0;     ///< 0 picks the model default
    double bin_width = 0.0;  ///< 0 picks the model default
    EscapeRule escape = EscapeRule::route_to_target;
};

struct McConfig {
    long paths = 100000;
    long horizon = 100000;
    std::uint64_t seed = 20240601;
    std::optional<double> start;
};

/// Everything a run needs; defaults are filled in by parse_config and written
/// back by to_json, so an embedded config replays the run exactly.
struct RunConfig {
    std::string command;
    ModelConfig model;
    GridConfig grid;
    std::optional<Region> target;
    std::vector<std::string> criteria;
    SolverSettings solver;
    CheckSettings checks;
    FamilyOptions family;
    std::vector<double> rates;   ///< geometric sums to report in solve
    std::vector<double> ladder;  ///< truncation cutoffs
    McConfig mc;
    std::string out_dir = "out";
};

namespace detail {

inline void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw ConfigError(where, "must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
        }
    }
}

inline double number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError(field, "must be a number");
    return j.get<double>();
}

inline double positive(const json& j, const std::string& field) {
    const double v = number(j, field);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be positive");
    return v;
}

inline long positive_int(const json& j, const std::string& field) {
    if (!j.is_number_integer() || j.get<long long>() <= 0) throw ConfigError(field, "must be a positive integer");
    return static_cast<long>(j.get<long long>());
}

inline std::string text(const json& j, const std::string& field) {
    if (!j.is_string()) throw ConfigError(field, "must be a string");
    return j.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& field) {
    if (!j.is_array()) throw ConfigError(field, "must be an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

inline std::pair<double, double> pair_of(const json& j, const std::string& field) {
    auto v = numbers(j, field);
    if (v.size() != 2) throw ConfigError(field, "must be [lo, hi]");
    if (!(v[0] <= v[1])) throw ConfigError(field, "left endpoint above right endpoint");
    return {v[0], v[1]};
}

}  // namespace detail

inline Region parse_region(const json& j, const std::string& field) {
    using namespace detail;
    only_keys(j, field, {"states", "closed", "half_open", "open", "intervals"});
    if (j.size() != 1) throw ConfigError(field, "give exactly one of states, closed, half_open, open, intervals");
    if (j.contains("states")) {
        auto v = numbers(j["states"], field + ".states");
        if (v.empty()) throw ConfigError(field + ".states", "must be nonempty");
        return Region::states(v);
    }
    if (j.contains("closed")) {
        auto [lo, hi] = pair_of(j["closed"], field + ".closed");
        return Region::closed(lo, hi);
    }
    if (j.contains("half_open")) {
        auto [lo, hi] = pair_of(j["half_open"], field + ".half_open");
        return Region::half_open(lo, hi);
    }
    if (j.contains("open")) {
        auto [lo, hi] = pair_of(j["open"], field + ".open");
        return Region::open(lo, hi);
    }
    const json& arr = j["intervals"];
    if (!arr.is_array() || arr.empty()) throw ConfigError(field + ".intervals", "must be a nonempty array");
    std::vector<Interval> parts;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string f = field + ".intervals[" + std::to_string(i) + "]";
        only_keys(arr[i], f, {"lo", "hi", "lo_closed", "hi_closed"});
        if (!arr[i].contains("lo") || !arr[i].contains("hi")) throw ConfigError(f, "needs lo and hi");
        Interval iv{number(arr[i]["lo"], f + ".lo"), number(arr[i]["hi"], f + ".hi"), true, false};
        if (arr[i].contains("lo_closed")) iv.lo_closed = arr[i]["lo_closed"].get<bool>();
        if (arr[i].contains("hi_closed")) iv.hi_closed = arr[i]["hi_closed"].get<bool>();
        if (!(iv.lo <= iv.hi)) throw ConfigError(f, "left endpoint above right endpoint");
        parts.push_back(iv);
    }
    return Region::intervals(parts);
}

inline json region_to_json(const Region& r) {
    switch (r.kind()) {
    case Region::Kind::states: return json{{"states", r.members()}};
    case Region::Kind::intervals: {
        json arr = json::array();
        for (const auto& iv : r.parts())
            arr.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"lo_closed", iv.lo_closed}, {"hi_closed", iv.hi_closed}});
        return json{{"intervals", arr}};
    }
    case Region::Kind::complement: break;
    }
    throw ConfigError("target", "complements cannot be written to a config");
}

inline RunConfig parse_config(const json& j) {
    using namespace detail;
    only_keys(j, "", {"command", "model", "grid", "target", "criteria", "solver", "solve", "truncation", "mc",
                      "output", "family"});
    RunConfig c;
    if (j.contains("command")) c.command = text(j["command"], "command");

    if (!j.contains("model")) throw ConfigError("model", "is required");
    const json& m = j["model"];
    only_keys(m, "model", {"preset", "params", "inline"});
    if (m.contains("preset") == m.contains("inline")) throw ConfigError("model", "give exactly one of preset, inline");
    if (m.contains("preset")) {
        c.model.preset = text(m["preset"], "model.preset");
        if (m.contains("params")) {
            only_keys(m["params"], "model.params", {"r", "delta", "width", "a", "s", "q", "exponent"});
            for (auto it = m["params"].begin(); it != m["params"].end(); ++it)
                c.model.params[it.key()] = number(it.value(), "model.params." + it.key());
        }
    } else {
        if (m.contains("params")) throw ConfigError("model.params", "only valid with a preset");
        only_keys(m["inline"], "model.inline", {"rows"});
        const json& rows = m["inline"].value("rows", json());
        if (!rows.is_array() || rows.empty()) throw ConfigError("model.inline.rows", "must be a nonempty array");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string f = "model.inline.rows[" + std::to_string(i) + "]";
            if (!rows[i].is_array()) throw ConfigError(f, "must be an array of [to, p] pairs");
            std::vector<Entry> row;
            for (const auto& e : rows[i]) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer())
                    throw ConfigError(f, "entries must be [to, p] with integer to");
                const long long to = e[0].get<long long>();
                if (to < 0) throw ConfigError(f, "target state must be nonnegative");
                row.push_back({static_cast<std::size_t>(to), number(e[1], f)});
            }
            c.model.rows.push_back(std::move(row));
        }
    }

    if (j.contains("grid")) {
        const json& g = j["grid"];
        only_keys(g, "grid", {"cutoff", "bin_width", "escape"});
        if (g.contains("cutoff")) c.grid.cutoff = positive(g["cutoff"], "grid.cutoff");
        if (g.contains("bin_width")) c.grid.bin_width = positive(g["bin_width"], "grid.bin_width");
        if (g.contains("escape")) {
            const auto e = text(g["escape"], "grid.escape");
            if (e == "route-to-target") c.grid.escape = EscapeRule::route_to_target;
            else if (e == "absorb") c.grid.escape = EscapeRule::absorb;
            else throw ConfigError("grid.escape", "must be route-to-target or absorb");
        }
    }
    if (j.contains("target")) c.target = parse_region(j["target"], "target");

    if (j.contains("criteria")) {
        if (!j["criteria"].is_array()) throw ConfigError("criteria", "must be an array of names");
        auto known = criterion_names();
        known.push_back("non-ergodic-corollary");
        for (const auto& x : j["criteria"]) {
            const auto name = text(x, "criteria");
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw ConfigError("criteria", "unknown criterion '" + name + "'");
            c.criteria.push_back(name);
        }
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        only_keys(s, "solver", {"tol", "cap", "max_iter", "scheme", "slack", "div_threshold", "quad_tol"});
        if (s.contains("tol")) c.solver.tol = positive(s["tol"], "solver.tol");
        if (s.contains("cap")) c.solver.cap = positive(s["cap"], "solver.cap");
        if (s.contains("max_iter")) c.solver.max_iter = positive_int(s["max_iter"], "solver.max_iter");
        if (s.contains("scheme")) {
            const auto v = text(s["scheme"], "solver.scheme");
            if (v == "gauss-seidel") c.solver.scheme = Scheme::gauss_seidel;
            else if (v == "jacobi") c.solver.scheme = Scheme::jacobi;
            else throw ConfigError("solver.scheme", "must be gauss-seidel or jacobi");
        }
        if (s.contains("slack")) {
            c.checks.slack_abs = c.checks.slack_rel = number(s["slack"], "solver.slack");
            if (c.checks.slack_abs < 0.0) throw ConfigError("solver.slack", "must be nonnegative");
        }
        if (s.contains("div_threshold")) c.checks.div_threshold = positive(s["div_threshold"], "solver.div_threshold");
        if (s.contains("quad_tol")) c.checks.integrate.quad.tol = positive(s["quad_tol"], "solver.quad_tol");
    }
    if (j.contains("solve")) {
        only_keys(j["solve"], "solve", {"rates"});
        if (j["solve"].contains("rates")) {
            c.rates = numbers(j["solve"]["rates"], "solve.rates");
            for (double r : c.rates)
                if (!(r > 1.0)) throw ConfigError("solve.rates", "geometric-sum rates must exceed 1");
        }
    }
    if (j.contains("truncation")) {
        only_keys(j["truncation"], "truncation", {"ladder"});
        if (j["truncation"].contains("ladder")) {
            c.ladder = numbers(j["truncation"]["ladder"], "truncation.ladder");
            for (std::size_t i = 0; i < c.ladder.size(); ++i) {
                if (!(c.ladder[i] > 0.0)) throw ConfigError("truncation.ladder", "cutoffs must be positive");
                if (i > 0 && !(c.ladder[i] > c.ladder[i - 1]))
                    throw ConfigError("truncation.ladder", "ladder must be strictly increasing");
            }
        }
    }
    if (j.contains("mc")) {
        const json& s = j["mc"];
        only_keys(s, "mc", {"paths", "horizon", "seed", "start"});
        if (s.contains("paths")) c.mc.paths = positive_int(s["paths"], "mc.paths");
        if (s.contains("horizon")) c.mc.horizon = positive_int(s["horizon"], "mc.horizon");
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned() && !(s["seed"].is_number_integer() && s["seed"].get<long long>() >= 0))
                throw ConfigError("mc.seed", "must be a nonnegative integer");
            c.mc.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("start")) c.mc.start = number(s["start"], "mc.start");
    }
    if (j.contains("output")) {
        only_keys(j["output"], "output", {"dir"});
        if (j["output"].contains("dir")) c.out_dir = text(j["output"]["dir"], "output.dir");
    }
    if (j.contains("family")) {
        only_keys(j["family"], "family", {"first_rung_log2", "last_rung_log2"});
        if (j["family"].contains("first_rung_log2"))
            c.family.first_rung_log2 = static_cast<int>(positive_int(j["family"]["first_rung_log2"], "family.first_rung_log2"));
        if (j["family"].contains("last_rung_log2"))
            c.family.last_rung_log2 = static_cast<int>(positive_int(j["family"]["last_rung_log2"], "family.last_rung_log2"));
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/// The model a config describes; inline tables need an explicit target.
inline Model build_model(const RunConfig& c) {
    if (!c.model.preset.empty()) {
        Model m = preset(c.model.preset, c.model.params);
        if (c.target) m.target = *c.target;
        return m;
    }
    if (!c.target) throw ConfigError("target", "is required for inline kernels");
    return inline_model(finite_kernel(c.model.rows, "inline"), *c.target);
}

/// Normalized form with every default written out.
inline json to_json(const RunConfig& c, const Model* resolved = nullptr) {
    json j;
    if (!c.command.empty()) j["command"] = c.command;
    if (!c.model.preset.empty()) {
        json params = json::object();
        for (const auto& [k, v] : resolved ? resolved->params : c.model.params) params[k] = v;
        j["model"] = {{"preset", c.model.preset}, {"params", params}};
    } else {
        json rows = json::array();
        for (const auto& r : c.model.rows) {
            json row = json::array();
            for (const auto& e : r) row.push_back(json::array({e.to, e.p}));
            rows.push_back(row);
        }
        j["model"] = {{"inline", {{"rows", rows}}}};
    }
    j["grid"] = json::object();
    if (c.grid.cutoff > 0.0) j["grid"]["cutoff"] = c.grid.cutoff;
    if (c.grid.bin_width > 0.0) j["grid"]["bin_width"] = c.grid.bin_width;
    j["grid"]["escape"] = c.grid.escape == EscapeRule::absorb ? "absorb" : "route-to-target";
    if (c.target) j["target"] = region_to_json(*c.target);
    else if (resolved) j["target"] = region_to_json(resolved->target);
    if (!c.criteria.empty()) j["criteria"] = c.criteria;
    j["solver"] = {{"tol", c.solver.tol},
                   {"cap", c.solver.cap},
                   {"max_iter", c.solver.max_iter},
                   {"scheme", c.solver.scheme == Scheme::jacobi ? "jacobi" : "gauss-seidel"},
                   {"slack", c.checks.slack_abs},
                   {"div_threshold", c.checks.div_threshold},
                   {"quad_tol", c.checks.integrate.quad.tol}};
    if (!c.rates.empty()) j["solve"] = {{"rates", c.rates}};
    if (!c.ladder.empty()) j["truncation"] = {{"ladder", c.ladder}};
    j["mc"] = {{"paths", c.mc.paths}, {"horizon", c.mc.horizon}, {"seed", c.mc.seed}};
    if (c.mc.start) j["mc"]["start"] = *c.mc.start;
    j["output"] = {{"dir", c.out_dir}};
    if (c.family.last_rung_log2 > 0 || c.family.first_rung_log2 != 1) {
        j["family"] = {{"first_rung_log2", c.family.first_rung_log2}};
        if (c.family.last_rung_log2 > 0) j["family"]["last_rung_log2"] = c.family.last_rung_log2;
    }
    return j;
}

}  // namespace ergocert
