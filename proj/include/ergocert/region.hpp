#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "ergocert/error.hpp"

namespace ergocert {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = true;
    bool hi_closed = false;

    bool contains(double x) const noexcept {
        const bool above = lo_closed ? x >= lo : x > lo;
        const bool below = hi_closed ? x <= hi : x < hi;
        return above && below;
    }
};

/// A measurable subset of the state space: a finite set of states, a finite
/// union of intervals, or the complement of another region.
class Region {
public:
    enum class Kind { states, intervals, complement };

    Region() : kind_(Kind::intervals) {}

    static Region states(std::vector<double> members) {
        if (members.empty()) throw ConfigError("region", "finite state set must be nonempty");
        Region r;
        r.kind_ = Kind::states;
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        r.members_ = std::move(members);
        return r;
    }

    static Region intervals(std::vector<Interval> parts) {
        for (const auto& iv : parts) {
            if (!(iv.lo <= iv.hi)) throw ConfigError("region", "interval with left endpoint above right endpoint");
        }
        Region r;
        r.kind_ = Kind::intervals;
        r.parts_ = std::move(parts);
        return r;
    }

    static Region closed(double lo, double hi) { return intervals({Interval{lo, hi, true, true}}); }
    static Region half_open(double lo, double hi) { return intervals({Interval{lo, hi, true, false}}); }
    static Region open(double lo, double hi) { return intervals({Interval{lo, hi, false, false}}); }

    static Region everything() {
        const double inf = std::numeric_limits<double>::infinity();
        return intervals({Interval{-inf, inf, true, true}});
    }

    static Region nothing() { return Region{}; }

    Region complement() const {
        Region r;
        r.kind_ = Kind::complement;
        r.inner_ = std::make_shared<const Region>(*this);
        return r;
    }

    Kind kind() const noexcept { return kind_; }

    bool contains(double x) const {
        switch (kind_) {
        case Kind::states:
            return std::binary_search(members_.begin(), members_.end(), x);
        case Kind::intervals:
            return std::any_of(parts_.begin(), parts_.end(), [x](const Interval& iv) { return iv.contains(x); });
        case Kind::complement:
            return !inner_->contains(x);
        }
        return false;
    }

    /// Points where the indicator may jump; quadrature splits there.
    std::vector<double> breakpoints() const {
        switch (kind_) {
        case Kind::states:
            return members_;
        case Kind::intervals: {
            std::vector<double> out;
            for (const auto& iv : parts_) {
                if (std::isfinite(iv.lo)) out.push_back(iv.lo);
                if (std::isfinite(iv.hi)) out.push_back(iv.hi);
            }
            return out;
        }
        case Kind::complement:
            return inner_->breakpoints();
        }
        return {};
    }

    std::string describe() const {
        std::string s;
        switch (kind_) {
        case Kind::states:
            s = "{";
            for (std::size_t i = 0; i < members_.size(); ++i) {
                if (i) s += ",";
                s += fmt(members_[i]);
            }
            return s + "}";
        case Kind::intervals:
            if (parts_.empty()) return "{}";
            for (std::size_t i = 0; i < parts_.size(); ++i) {
                if (i) s += " U ";
                s += (parts_[i].lo_closed ? "[" : "(") + fmt(parts_[i].lo) + "," + fmt(parts_[i].hi) +
                     (parts_[i].hi_closed ? "]" : ")");
            }
            return s;
        case Kind::complement:
            return "complement of " + inner_->describe();
        }
        return s;
    }

    const std::vector<double>& members() const noexcept { return members_; }
    const std::vector<Interval>& parts() const noexcept { return parts_; }

private:
    static std::string fmt(double v) {
        if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    }

    Kind kind_;
    std::vector<double> members_;
    std::vector<Interval> parts_;
    std::shared_ptr<const Region> inner_;
};

}  // namespace ergocert
