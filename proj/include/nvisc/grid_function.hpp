#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace nvisc {

/// Real function of energy sampled on a uniform grid: sample i sits at
/// omega_min + i * step (meV). Immutable after construction.
class GridFunction {
public:
    /// Throws InputError unless step > 0, at least two samples are given and
    /// every value is finite.
    GridFunction(double omega_min, double step, std::vector<double> values);

    /// Samples fn on omega_min, omega_min + step, ... up to the last node not
    /// beyond omega_max (within a 1e-9 step slack).
    static GridFunction tabulate(double omega_min, double omega_max, double step,
                                 const std::function<double(double)>& fn);

    double omega_min() const { return omega_min_; }
    double omega_max() const { return omega_min_ + step_ * static_cast<double>(values_.size() - 1); }
    double step() const { return step_; }
    std::size_t size() const { return values_.size(); }
    double omega_at(std::size_t i) const { return omega_min_ + step_ * static_cast<double>(i); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const { return values_; }

    GridFunction scaled(double factor) const;

private:
    double omega_min_;
    double step_;
    std::vector<double> values_;
};

namespace gridfn {

/// Trapezoid estimate of the integral of g over [lo, hi] clipped to the
/// support. Partial end cells use the linear interpolant, so the result is
/// exact for piecewise-linear data.
double integrate(const GridFunction& g, double lo, double hi);
double integrate(const GridFunction& g);

/// Discrete linear convolution scaled by the step. Steps must agree to 1e-9
/// relative; the output covers [a_min + b_min, a_max + b_max]. The mass
/// identity integral(a*b) = integral(a) * integral(b) is exact when the
/// inputs vanish at their support edges.
GridFunction convolve(const GridFunction& a, const GridFunction& b);

/// Linear interpolation inside the support, 0 outside.
double sample(const GridFunction& g, double omega);

/// Linear resampling onto a new step over the same support.
GridFunction resample(const GridFunction& g, double step);

/// Restriction to the grid nodes inside [lo, hi].
GridFunction crop(const GridFunction& g, double lo, double hi);

/// Pointwise a + b on a common grid (same origin and step).
GridFunction add(const GridFunction& a, const GridFunction& b);

/// Pointwise maximum distance.
double max_abs_difference(const GridFunction& a, const GridFunction& b);

/// Integral of |a - b| over the union of supports, with out-of-support
/// samples taken as 0. Steps must agree.
double l1_distance(const GridFunction& a, const GridFunction& b);

/// Ordered samples (omega, value) as read from CSV.
GridFunction read_csv(std::istream& in, const std::string& source = "<stream>");
GridFunction read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const GridFunction& g, const std::string& value_header = "value");

}  // namespace gridfn
}  // namespace nvisc
