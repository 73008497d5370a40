#include "nvisc/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"

namespace nvisc {

MeasuredBand MeasuredBand::make(double value, double lo, double hi) {
    if (!std::isfinite(value) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InputError("measured band must be finite");
    }
    if (!(lo <= value && value <= hi)) {
        throw InputError("measured band violates lo <= value <= hi (" + text::format_double(lo) + ", " +
                         text::format_double(value) + ", " + text::format_double(hi) + ")");
    }
    return {value, lo, hi};
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
    for (const auto& iv : intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) throw InputError("interval with lo > hi");
    }
    std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : intervals) {
        if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }
}

bool IntervalSet::contains(double x) const {
    return std::any_of(intervals_.begin(), intervals_.end(), [x](const Interval& iv) { return iv.contains(x); });
}

bool IntervalSet::covers(double lo, double hi) const {
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [=](const Interval& iv) { return iv.lo <= lo && hi <= iv.hi; });
}

double IntervalSet::measure() const {
    double m = 0.0;
    for (const auto& iv : intervals_) m += iv.width();
    return m;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
    std::vector<Interval> all(intervals_);
    all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::remove_below(double floor) const {
    return clip(floor, INFINITY);
}

IntervalSet IntervalSet::clip(double lo, double hi) const {
    std::vector<Interval> out;
    for (const auto& iv : intervals_) {
        const double a = std::max(iv.lo, lo);
        const double b = std::min(iv.hi, hi);
        if (a <= b) out.push_back({a, b});
    }
    return IntervalSet(std::move(out));
}

namespace gridfn {

namespace {

// Sub-interval of t in [0, 1] where (v0 + t (v1 - v0)) * sign <= bound * sign.
std::optional<Interval> linear_feasible(double v0, double v1, double bound, bool want_below) {
    const double a = want_below ? v0 - bound : bound - v0;
    const double b = want_below ? v1 - bound : bound - v1;
    // need a + t (b - a) <= 0
    if (a <= 0.0 && b <= 0.0) return Interval{0.0, 1.0};
    if (a > 0.0 && b > 0.0) return std::nullopt;
    const double t = a / (a - b);
    return a <= 0.0 ? Interval{0.0, t} : Interval{t, 1.0};
}

}  // namespace

IntervalSet band_intersections(const GridFunction& lower, const GridFunction& upper, const MeasuredBand& band) {
    if (lower.size() != upper.size() || std::abs(lower.step() - upper.step()) > 1e-9 * lower.step() ||
        std::abs(lower.omega_min() - upper.omega_min()) > 1e-9 * lower.step()) {
        throw InputError("band_intersections: lower and upper curves must share a grid");
    }
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < lower.size(); ++i) {
        const auto c1 = linear_feasible(lower[i], lower[i + 1], band.hi, true);
        const auto c2 = linear_feasible(upper[i], upper[i + 1], band.lo, false);
        if (!c1 || !c2) continue;
        const double t0 = std::max(c1->lo, c2->lo);
        const double t1 = std::min(c1->hi, c2->hi);
        if (t0 > t1) continue;
        const double x0 = lower.omega_at(i);
        const double h = lower.step();
        out.push_back({x0 + t0 * h, t1 >= 1.0 ? lower.omega_at(i + 1) : x0 + t1 * h});
    }
    return IntervalSet(std::move(out));
}

}  // namespace gridfn
}  // namespace nvisc
