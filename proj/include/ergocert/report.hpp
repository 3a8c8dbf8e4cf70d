#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ergocert/classify.hpp"
#include "ergocert/criteria.hpp"
#include "ergocert/error.hpp"
#include "ergocert/montecarlo.hpp"

namespace ergocert {

/// Shortest round-trip text for a double; "inf", "-inf" and "nan" otherwise.
inline std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw InternalConsistencyError("cannot format number");
    return std::string(buf, end);
}

/// JSON has no infinities; they are written as strings.
inline nlohmann::json jnum(double v) {
    if (std::isfinite(v)) return v;
    return fmt(v);
}

template <class T>
nlohmann::json jopt(const std::optional<T>& v) {
    if (!v) return nullptr;
    if constexpr (std::is_floating_point_v<T>) return jnum(*v);
    else return *v;
}

/// Writes through a sibling temp file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("output.dir", "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw ConfigError("output.dir", "write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_atomic(path, j.dump(2) + "\n"); }

/// Plain CSV builder; every field goes through fmt when numeric.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : width_(header.size()) { line(header); }

    Csv& row(const std::vector<std::string>& fields) {
        if (fields.size() != width_) throw InternalConsistencyError("csv row has the wrong width");
        line(fields);
        return *this;
    }

    const std::string& str() const { return text_; }

private:
    void line(const std::vector<std::string>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) text_ += ',';
            const bool quote = f[i].find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                text_ += f[i];
                continue;
            }
            text_ += '"';
            for (char c : f[i]) {
                if (c == '"') text_ += '"';
                text_ += c;
            }
            text_ += '"';
        }
        text_ += '\n';
    }

    std::size_t width_;
    std::string text_;
};

inline nlohmann::json to_json(const ConditionResult& c) {
    nlohmann::json rungs = nlohmann::json::array();
    for (const auto& r : c.per_rung) rungs.push_back({{"rung", jnum(r.rung)}, {"worst", jnum(r.worst)}, {"at", jnum(r.at)}});
    return {{"name", c.name},
            {"held", c.held},
            {"worst_margin", jnum(c.worst_margin)},
            {"witness", jopt(c.witness)},
            {"witness_rung", jopt(c.witness_rung)},
            {"checked", c.checked},
            {"note", c.note},
            {"per_rung", rungs}};
}

inline nlohmann::json to_json(const DivergenceEvidence& d) {
    nlohmann::json idx = nlohmann::json::array(), seq = nlohmann::json::array();
    for (double v : d.index) idx.push_back(jnum(v));
    for (double v : d.sequence) seq.push_back(jnum(v));
    return {{"index", idx},
            {"sequence", seq},
            {"threshold", jnum(d.threshold)},
            {"threshold_required", d.threshold_required},
            {"crossing", d.crossing ? nlohmann::json(*d.crossing) : nlohmann::json(nullptr)},
            {"growing", d.growing},
            {"demonstrated", d.demonstrated()},
            {"witness", jopt(d.witness)},
            {"note", d.note}};
}

inline nlohmann::json to_json(const CertificateReport& r) {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : r.conditions) conds.push_back(to_json(c));
    return {{"criterion", r.criterion},
            {"verdict", to_string(r.verdict)},
            {"conditions", conds},
            {"divergence", r.divergence ? to_json(*r.divergence) : nlohmann::json(nullptr)},
            {"domain", r.domain},
            {"probes", r.probes},
            {"worst_margin", jnum(r.worst_margin())},
            {"settings",
             {{"slack_abs", r.settings.slack_abs},
              {"slack_rel", r.settings.slack_rel},
              {"div_threshold", r.settings.div_threshold},
              {"ratio_tol", r.settings.ratio_tol},
              {"rate_tol", r.settings.rate_tol}}},
            {"note", r.note}};
}

inline nlohmann::json to_json(const CheckOutcome& o) {
    nlohmann::json consts = nlohmann::json::object();
    for (const auto& [k, v] : o.constants) consts[k] = jnum(v);
    nlohmann::json j = {{"criterion", o.criterion},
                        {"status", o.status()},
                        {"applicable", o.applicable},
                        {"family", o.family},
                        {"constants", consts}};
    if (!o.applicable) j["reason"] = o.reason;
    if (o.report) j["report"] = to_json(*o.report);
    return j;
}

inline nlohmann::json to_json(const Classification& c) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& o : c.checks) checks.push_back(to_json(o));
    nlohmann::json flags = nlohmann::json::object();
    for (const auto& [k, v] : c.flags) flags[k] = v;
    return {{"model", c.model}, {"flags", flags}, {"checks", checks}};
}

/// One "criterion: status" line per check, then the flags.
inline std::string summary_text(const Classification& c) {
    std::string s = "model: " + c.model + "\n";
    for (const auto& o : c.checks) {
        s += o.criterion + ": " + o.status();
        if (o.report) s += " (worst margin " + fmt(o.report->worst_margin()) + ")";
        else if (!o.reason.empty()) s += " (" + o.reason + ")";
        s += "\n";
    }
    for (const auto& [k, v] : c.flags) s += "flag " + k + ": " + (v ? "yes" : "no") + "\n";
    return s;
}

/// criterion, condition, rung, worst margin, location; one row per rung.
inline std::string margins_csv(const Classification& c) {
    Csv csv({"criterion", "condition", "rung", "worst_margin", "at"});
    for (const auto& o : c.checks) {
        if (!o.report) continue;
        for (const auto& cond : o.report->conditions) {
            if (cond.per_rung.empty()) {
                csv.row({o.criterion, cond.name, "", fmt(cond.worst_margin),
                         cond.witness ? fmt(*cond.witness) : std::string()});
                continue;
            }
            for (const auto& r : cond.per_rung)
                csv.row({o.criterion, cond.name, fmt(r.rung), fmt(r.worst), fmt(r.at)});
        }
    }
    return csv.str();
}

inline nlohmann::json to_json(const ReturnTimeStats& s) {
    auto fit = [](const TailFit& f) {
        return nlohmann::json{{"model", f.model},
                              {"slope", jnum(f.slope)},
                              {"slope_se", jnum(f.slope_se)},
                              {"r2", jnum(f.r2)},
                              {"points", f.points}};
    };
    return {{"seed", s.seed},
            {"start", jnum(s.start)},
            {"horizon", s.horizon},
            {"paths", s.n_paths},
            {"censored", s.n_censored},
            {"censored_fraction", s.censored_fraction()},
            {"mean", jnum(s.mean)},
            {"se", jnum(s.se)},
            {"lower_biased", s.lower_biased},
            {"tail_shape", s.tail_shape()},
            {"power_fit", fit(s.power)},
            {"exponential_fit", fit(s.exponential)}};
}

inline std::string survival_csv(const ReturnTimeStats& s) {
    Csv csv({"n", "survival", "se"});
    for (const auto& p : s.survival) csv.row({std::to_string(p.n), fmt(p.survival), fmt(p.se)});
    return csv.str();
}

}  // namespace ergocert
