#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ergocert/region.hpp"

namespace ergocert {

struct TestFunction {
    std::function<double(double)> fn;
    std::vector<double> breakpoints;   ///< jumps and kinks, handed to quadrature
    std::optional<double> support_hi;  ///< declared compact support [lower, support_hi]
    std::vector<double> focus;         ///< extra probe points where margins are tight
    std::string label;

    double operator()(double x) const { return fn(x); }
};

/// A family V^(1), V^(2), ... with optional rates r_n and companion W, plus the
/// set (A or C) and constants the target criterion needs.
struct TestFunctionSequence {
    std::string target;
    std::vector<TestFunction> functions;
    std::vector<double> rungs;  ///< the index n of each function
    std::vector<double> rates;
    std::optional<TestFunction> companion;
    Region region;
    std::map<std::string, double> constants;
    std::vector<double> ladder;
    std::string note;

    std::size_t size() const noexcept { return functions.size(); }

    double constant(const std::string& key, double fallback = 0.0) const {
        auto it = constants.find(key);
        return it == constants.end() ? fallback : it->second;
    }
};

/// Points where pointwise conditions are checked, each with its weight under
/// the reference measure (zero for far-out probes that only test inequalities).
struct ProbeDomain {
    std::vector<double> points;
    std::vector<double> weights;
    double floor = 0.0;  ///< smallest measure accepted as positive
    std::string label;

    void add(double x, double w) {
        points.push_back(x);
        weights.push_back(w);
    }

    std::size_t size() const noexcept { return points.size(); }

    ProbeDomain with(const std::vector<double>& extra) const {
        ProbeDomain d = *this;
        for (double x : extra) d.add(x, 0.0);
        return d;
    }

    double max_point() const {
        return points.empty() ? 0.0 : *std::max_element(points.begin(), points.end());
    }
};

}  // namespace ergocert
