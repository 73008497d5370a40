#include "nvisc/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"

namespace nvisc {

namespace {

constexpr double kNodeSlack = 1e-9;  // in units of the step

// Fractional node coordinate of omega on g's grid, snapped to an integer when
// within kNodeSlack of one.
double node_coordinate(const GridFunction& g, double omega) {
    const double x = (omega - g.omega_min()) / g.step();
    const double r = std::round(x);
    return std::abs(x - r) < kNodeSlack ? r : x;
}

void require_same_step(const GridFunction& a, const GridFunction& b, const char* op) {
    if (std::abs(a.step() - b.step()) > 1e-9 * a.step()) {
        throw InputError(std::string(op) + ": grid steps differ (" + text::format_double(a.step()) + " vs " +
                         text::format_double(b.step()) + " meV); resample first");
    }
}

// Integer offset of b's origin on a's grid; throws when the grids are not aligned.
long aligned_offset(const GridFunction& a, const GridFunction& b, const char* op) {
    require_same_step(a, b, op);
    const double x = (b.omega_min() - a.omega_min()) / a.step();
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-6) throw InputError(std::string(op) + ": grids are not aligned");
    return static_cast<long>(r);
}

}  // namespace

GridFunction::GridFunction(double omega_min, double step, std::vector<double> values)
    : omega_min_(omega_min), step_(step), values_(std::move(values)) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) throw InputError("grid step must be positive and finite");
    if (!std::isfinite(omega_min_)) throw InputError("grid origin must be finite");
    if (values_.size() < 2) throw InputError("a grid function needs at least two samples");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InputError("non-finite sample at omega = " + text::format_double(omega_at(i)) + " meV");
        }
    }
}

GridFunction GridFunction::tabulate(double omega_min, double omega_max, double step,
                                    const std::function<double(double)>& fn) {
    if (!(step > 0.0)) throw InputError("grid step must be positive");
    const auto n = static_cast<std::size_t>(std::floor((omega_max - omega_min) / step + kNodeSlack)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(omega_min + step * static_cast<double>(i));
    return {omega_min, step, std::move(v)};
}

GridFunction GridFunction::scaled(double factor) const {
    std::vector<double> v(values_);
    for (auto& x : v) x *= factor;
    return {omega_min_, step_, std::move(v)};
}

namespace gridfn {

double integrate(const GridFunction& g, double lo, double hi) {
    if (lo > hi) throw InputError("integrate: lower limit exceeds upper limit");
    lo = std::max(lo, g.omega_min());
    hi = std::min(hi, g.omega_max());
    if (lo >= hi) return 0.0;

    const double h = g.step();
    const double xlo = node_coordinate(g, lo);
    const double xhi = node_coordinate(g, hi);
    const auto first = static_cast<std::size_t>(std::ceil(xlo));
    const auto last = static_cast<std::size_t>(std::floor(xhi));
    const double vlo = sample(g, lo);
    const double vhi = sample(g, hi);

    if (first > last) return (hi - lo) * 0.5 * (vlo + vhi);

    double sum = 0.0;
    for (std::size_t i = first; i < last; ++i) sum += 0.5 * (g[i] + g[i + 1]);
    sum *= h;
    sum += (static_cast<double>(first) - xlo) * h * 0.5 * (vlo + g[first]);
    sum += (xhi - static_cast<double>(last)) * h * 0.5 * (g[last] + vhi);
    return sum;
}

double integrate(const GridFunction& g) { return integrate(g, g.omega_min(), g.omega_max()); }

GridFunction convolve(const GridFunction& a, const GridFunction& b) {
    require_same_step(a, b, "convolve");
    const double h = a.step();
    const auto av = a.values();
    const auto bv = b.values();
    std::vector<double> out(av.size() + bv.size() - 1, 0.0);
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double ai = av[i] * h;
        if (ai == 0.0) continue;
        double* dst = out.data() + i;
        for (std::size_t j = 0; j < bv.size(); ++j) dst[j] += ai * bv[j];
    }
    return {a.omega_min() + b.omega_min(), h, std::move(out)};
}

double sample(const GridFunction& g, double omega) {
    if (!(omega >= g.omega_min() && omega <= g.omega_max())) return 0.0;
    const double x = node_coordinate(g, omega);
    const auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= g.size()) return g[g.size() - 1];
    const double t = x - static_cast<double>(i);
    if (t == 0.0) return g[i];
    return (1.0 - t) * g[i] + t * g[i + 1];
}

GridFunction resample(const GridFunction& g, double step) {
    return GridFunction::tabulate(g.omega_min(), g.omega_max(), step, [&g](double w) { return sample(g, w); });
}

GridFunction crop(const GridFunction& g, double lo, double hi) {
    const double x0 = std::max(0.0, std::ceil(node_coordinate(g, lo)));
    const double x1 = std::min(static_cast<double>(g.size() - 1), std::floor(node_coordinate(g, hi)));
    if (x1 - x0 < 1.0) throw InputError("crop: window [" + text::format_double(lo) + ", " + text::format_double(hi) +
                                        "] keeps fewer than two samples");
    const auto i0 = static_cast<std::size_t>(x0);
    const auto i1 = static_cast<std::size_t>(x1);
    const auto v = g.values();
    return {g.omega_at(i0), g.step(), std::vector<double>(v.begin() + static_cast<long>(i0), v.begin() + static_cast<long>(i1) + 1)};
}

namespace {

template <class Op>
GridFunction combine_on_union(const GridFunction& a, const GridFunction& b, const char* name, Op op) {
    const long off = aligned_offset(a, b, name);
    const long lo = std::min(0L, off);
    const long hi = std::max(static_cast<long>(a.size()) - 1, off + static_cast<long>(b.size()) - 1);
    std::vector<double> v(static_cast<std::size_t>(hi - lo + 1));
    for (long k = lo; k <= hi; ++k) {
        const double va = (k >= 0 && k < static_cast<long>(a.size())) ? a[static_cast<std::size_t>(k)] : 0.0;
        const long kb = k - off;
        const double vb = (kb >= 0 && kb < static_cast<long>(b.size())) ? b[static_cast<std::size_t>(kb)] : 0.0;
        v[static_cast<std::size_t>(k - lo)] = op(va, vb);
    }
    return {a.omega_min() + static_cast<double>(lo) * a.step(), a.step(), std::move(v)};
}

}  // namespace

GridFunction add(const GridFunction& a, const GridFunction& b) {
    return combine_on_union(a, b, "add", [](double x, double y) { return x + y; });
}

double max_abs_difference(const GridFunction& a, const GridFunction& b) {
    const auto d = combine_on_union(a, b, "max_abs_difference", [](double x, double y) { return std::abs(x - y); });
    return *std::max_element(d.values().begin(), d.values().end());
}

double l1_distance(const GridFunction& a, const GridFunction& b) {
    return integrate(combine_on_union(a, b, "l1_distance", [](double x, double y) { return std::abs(x - y); }));
}

GridFunction read_csv(std::istream& in, const std::string& source) {
    const std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    auto records = text::csv_records(body);
    const auto where = [&source](std::size_t line) { return source + ":" + std::to_string(line) + ": "; };

    std::size_t begin = 0;
    if (!records.empty() && !text::parse_double(records.front().fields.front())) {
        const auto& header = records.front();
        if (header.fields.size() != 2 || header.fields[0] != "omega_meV") {
            throw InputError(where(header.line_number) + "expected header 'omega_meV,value'");
        }
        begin = 1;
    }
    std::vector<double> omega;
    std::vector<double> value;
    for (std::size_t r = begin; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 2) throw InputError(where(rec.line_number) + "expected two columns");
        const auto w = text::parse_double(rec.fields[0]);
        const auto v = text::parse_double(rec.fields[1]);
        if (!w || !v) throw InputError(where(rec.line_number) + "malformed number");
        omega.push_back(*w);
        value.push_back(*v);
    }
    if (omega.size() < 2) throw InputError(source + ": need at least two samples");
    const double step = (omega.back() - omega.front()) / static_cast<double>(omega.size() - 1);
    if (!(step > 0.0)) throw InputError(source + ": omega must be strictly increasing");
    for (std::size_t i = 1; i < omega.size(); ++i) {
        const double d = omega[i] - omega[i - 1];
        if (!(d > 0.0)) throw InputError(source + ": omega must be strictly increasing (row " + std::to_string(i + 1) + ")");
        if (std::abs(d - step) > 1e-9 * step + 1e-12 * std::abs(omega[i])) {
            throw InputError(source + ": omega is not equally spaced near " + text::format_double(omega[i]) + " meV");
        }
    }
    return {omega.front(), step, std::move(value)};
}

GridFunction read_csv_file(const std::string& path) {
    std::istringstream in(text::read_file(path));
    return read_csv(in, path);
}

void write_csv(std::ostream& out, const GridFunction& g, const std::string& value_header) {
    out << "omega_meV," << value_header << '\n';
    for (std::size_t i = 0; i < g.size(); ++i) {
        out << text::format_double(g.omega_at(i)) << ',' << text::format_double(g[i]) << '\n';
    }
}

}  // namespace gridfn
}  // namespace nvisc
