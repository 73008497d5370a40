#pragma once

#include <initializer_list>
#include <vector>

#include "nvisc/grid_function.hpp"

namespace nvisc {

/// A measured quantity with its 95% confidence interval.
struct MeasuredBand {
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    /// Throws InputError unless lo <= value <= hi.
    static MeasuredBand make(double value, double lo, double hi);
    static MeasuredBand point(double value) { return make(value, value, value); }
};

struct Interval {
    double lo;
    double hi;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Sorted union of disjoint closed intervals. Touching or overlapping inputs
/// are merged on construction.
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> intervals);
    IntervalSet(std::initializer_list<Interval> intervals)
        : IntervalSet(std::vector<Interval>(intervals)) {}

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    std::size_t size() const { return intervals_.size(); }
    const Interval& operator[](std::size_t i) const { return intervals_[i]; }

    bool contains(double x) const;
    /// True when some member interval covers [lo, hi] entirely.
    bool covers(double lo, double hi) const;
    double measure() const;

    IntervalSet unite(const IntervalSet& other) const;
    /// Drops everything strictly below floor (intervals straddling it are cut).
    IntervalSet remove_below(double floor) const;
    IntervalSet clip(double lo, double hi) const;

    bool operator==(const IntervalSet&) const = default;

private:
    std::vector<Interval> intervals_;
};

namespace gridfn {

/// Abscissa set where the curve band [lower(x), upper(x)] overlaps
/// [band.lo, band.hi]. lower and upper share a grid; both are treated as
/// linear between nodes, so endpoints are exact crossings of the interpolants.
IntervalSet band_intersections(const GridFunction& lower, const GridFunction& upper,
                               const MeasuredBand& band);

}  // namespace gridfn
}  // namespace nvisc
