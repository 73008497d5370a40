#include "nvisc/inference.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"

namespace nvisc::inference {

namespace {

constexpr double kRatioStep = 0.01;  // meV, cumulative-ratio grid

GridFunction on_sweep(const std::vector<double>& x, std::vector<double> y) {
    const double step = x.size() > 1 ? x[1] - x[0] : 1.0;
    return {x.front(), step, std::move(y)};
}

// Crossing of level by the non-decreasing piecewise-linear c on nodes k*h,
// searching for the first node with c > level (strict) or c >= level.
double first_crossing(const std::vector<double>& c, double h, double level, bool strict) {
    for (std::size_t k = 0; k < c.size(); ++k) {
        const bool hit = strict ? c[k] > level : c[k] >= level;
        if (!hit) continue;
        if (k == 0) return 0.0;
        const double d = c[k] - c[k - 1];
        const double t = d > 0.0 ? (level - c[k - 1]) / d : 1.0;
        return h * (static_cast<double>(k - 1) + std::clamp(t, 0.0, 1.0));
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace

std::vector<double> Sweep::points() const {
    if (!(step > 0.0) || !(hi >= lo)) throw InputError("sweep needs step > 0 and hi >= lo");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    return out;
}

DeltaInference infer_delta(const rates::SpinOrbitParams& so, const GridFunction& F, const MeasuredBand& target,
                           double exclusion_floor_mev, const Sweep& sweep) {
    const auto deltas = sweep.points();
    if (deltas.size() < 2) throw InputError("infer_delta: sweep needs at least two points");
    std::vector<double> lo(deltas.size()), mid(deltas.size()), hi(deltas.size());
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const auto r = rates::gamma_a1(so, F, deltas[i]);
        lo[i] = r.lo();
        mid[i] = r.value_mhz;
        hi[i] = r.hi();
    }
    DeltaInference out{{}, {}, on_sweep(deltas, lo), on_sweep(deltas, mid), on_sweep(deltas, hi)};
    out.before_exclusion = gridfn::band_intersections(out.lower, out.upper, target);
    out.intervals = out.before_exclusion.remove_below(exclusion_floor_mev);
    return out;
}

OmegaInference infer_omega(const rates::PhononCoupling& pc, const GridFunction& F, const Interval& delta_range,
                           double delta_prime_mev, const MeasuredBand& ratio_target, bool include_singlet_path,
                           double delta_step) {
    const auto deltas = Sweep{delta_range.lo, delta_range.hi, delta_step}.points();
    const double eta = units::eta_to_internal(pc.eta.value);
    std::vector<Interval> found;
    double asym_min = std::numeric_limits<double>::infinity();
    double asym_max = 0.0;
    for (const double delta : deltas) {
        const double f = gridfn::sample(F, delta);
        if (!(f > 0.0)) continue;
        const auto ls = rates::LevelSpacings::make(delta, delta_prime_mev);
        const auto cells = static_cast<std::size_t>(std::ceil(delta / kRatioStep - 1e-9));
        const double h = delta / static_cast<double>(cells);
        std::vector<double> ratio(cells + 1, 0.0);
        const double scale = 2.0 / std::numbers::pi * eta / f;
        double prev = 0.0;
        for (std::size_t k = 1; k <= cells; ++k) {
            const double w = h * static_cast<double>(k);
            double g = w * gridfn::sample(F, delta - w);
            if (include_singlet_path) g *= std::pow(1.0 - 2.0 * w / (delta + ls.delta_prime_mev), 2);
            ratio[k] = ratio[k - 1] + 0.5 * h * (prev + g) * scale;
            prev = g;
        }
        asym_min = std::min(asym_min, ratio.back());
        asym_max = std::max(asym_max, ratio.back());
        if (ratio.back() < ratio_target.lo) continue;
        const double omega_lo = first_crossing(ratio, h, ratio_target.lo, false);
        const double omega_hi = ratio.back() <= ratio_target.hi ? std::numeric_limits<double>::infinity()
                                                                : first_crossing(ratio, h, ratio_target.hi, true);
        found.push_back({omega_lo, std::max(omega_lo, omega_hi)});
    }
    if (deltas.empty() || asym_max == 0.0) asym_min = asym_max = 0.0;
    return {IntervalSet(std::move(found)), asym_min, asym_max};
}

double asymptotic_ratio(const rates::PhononCoupling& pc, const GridFunction& F, const rates::LevelSpacings& ls,
                        bool include_singlet_path) {
    auto open = pc;
    open.omega_mev = std::numeric_limits<double>::infinity();
    return rates::e12_a1_ratio(open, F, ls, include_singlet_path).value;
}

double ratio_exclusion_threshold(const rates::PhononCoupling& pc, const GridFunction& F, double delta_prime_mev,
                                 double target_lo, const Sweep& sweep) {
    for (const double delta : sweep.points()) {
        if (!(gridfn::sample(F, delta) > 0.0)) continue;
        if (asymptotic_ratio(pc, F, rates::LevelSpacings::make(delta, delta_prime_mev), true) >= target_lo) return delta;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

GridFunction lowT_error_map(const rates::SpinOrbitParams& so, const rates::PhononCoupling& pc,
                            const psb::PsbModel& model, const rates::LevelSpacings& ls, Temperature t,
                            ErrorAxis axis, const Sweep& sweep) {
    if (t.is_zero()) throw InputError("lowT_error_map: requires T > 0");
    const auto F0 = psb::thermal_overlap(model, Temperature(0.0));
    const auto FT = psb::thermal_overlap(model, t);
    const auto xs = sweep.points();
    if (xs.size() < 2) throw InputError("lowT_error_map: sweep needs at least two points");
    std::vector<double> err(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        auto l = ls;
        auto p = pc;
        (axis == ErrorAxis::delta ? l.delta_mev : p.omega_mev) = xs[i];
        const double a1 = rates::gamma_a1(so, FT, l.delta_mev).value_mhz;
        if (!(a1 > 0.0)) {
            throw NumericalError("lowT_error_map: F(Delta, T) = 0 at Delta = " + text::format_double(l.delta_mev) + " meV");
        }
        const double r_t = rates::gamma_e12_finiteT(so, p, FT, l, t).value_mhz / a1;
        const double r_0 = rates::e12_a1_ratio(p, F0, l, false).value;
        err[i] = std::abs(r_t - r_0) / r_0;
    }
    return on_sweep(xs, std::move(err));
}

LifetimeSeries parse_lifetime_series(const std::string& body, const std::string& source) {
    const auto records = text::csv_records(body);
    const auto where = [&source](std::size_t line) { return source + ":" + std::to_string(line) + ": "; };
    if (records.empty()) throw InputError(source + ": empty lifetime series");
    if (records.front().fields != std::vector<std::string>{"temperature_K", "tau_ns", "sigma_ns", "spin_class"}) {
        throw InputError(where(records.front().line_number) + "expected header 'temperature_K,tau_ns,sigma_ns,spin_class'");
    }
    LifetimeSeries out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 4) throw InputError(where(rec.line_number) + "expected four columns");
        const auto t = text::parse_double(rec.fields[0]);
        const auto tau = text::parse_double(rec.fields[1]);
        const auto sig = text::parse_double(rec.fields[2]);
        if (!t || !tau || !sig) throw InputError(where(rec.line_number) + "malformed number");
        if (!(*t > 0.0 && *tau > 0.0 && *sig > 0.0)) throw InputError(where(rec.line_number) + "values must be positive");
        rates::SpinClass spin;
        if (rec.fields[3] == "ms0") {
            spin = rates::SpinClass::ms0;
        } else if (rec.fields[3] == "ms1") {
            spin = rates::SpinClass::ms1;
        } else {
            throw InputError(where(rec.line_number) + "spin_class must be ms0 or ms1");
        }
        out.push_back({*t, *tau, *sig, spin});
    }
    return out;
}

LifetimeSeries read_lifetime_series(const std::filesystem::path& path) {
    return parse_lifetime_series(text::read_file(path), path.string());
}

double mott_seitz_lifetime_ns(double s, double delta_e_ev, const rates::RateResult& rad, double tau0_ns,
                              Temperature t) {
    const auto ht = rates::gamma_ht(rates::HighTempParams::make(s, delta_e_ev, 0.0), rad, t);
    return 1.0 / (1.0 / tau0_ns + 2.0 * std::numbers::pi * ht.value_mhz * 1e-3);
}

namespace {

struct MottSeitzResiduals {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const LifetimeSeries& data;
    double base;  // 1/tau0, 1/ns
    double b;     // 2 pi Gamma_Rad, 1/ns

    int inputs() const { return 2; }
    int values() const { return static_cast<int>(data.size()); }

    // rate term b s exp(-DeltaE/kT) and its lifetime
    std::pair<double, double> eval(const Eigen::VectorXd& x, const LifetimePoint& p) const {
        const double kt = Temperature(p.temperature_k).thermal_energy_mev();
        const double rate = b * std::exp(x[0] - x[1] * units::mev_per_ev / kt);
        return {rate, 1.0 / (base + rate)};
    }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto [rate, tau] = eval(x, data[i]);
            f[static_cast<Eigen::Index>(i)] = (tau - data[i].tau_ns) / data[i].sigma_ns;
        }
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
        for (std::size_t i = 0; i < data.size(); ++i) {
            const auto [rate, tau] = eval(x, data[i]);
            const double kt = Temperature(data[i].temperature_k).thermal_energy_mev();
            const double dtau_dlog = -tau * tau * rate;
            const auto row = static_cast<Eigen::Index>(i);
            jac(row, 0) = dtau_dlog / data[i].sigma_ns;
            jac(row, 1) = -dtau_dlog * units::mev_per_ev / kt / data[i].sigma_ns;
        }
        return 0;
    }
};

}  // namespace

MottSeitzFit fit_mott_seitz(const LifetimeSeries& data, const rates::RateResult& rad, double tau0_ns) {
    LifetimeSeries ms0;
    std::copy_if(data.begin(), data.end(), std::back_inserter(ms0),
                 [](const LifetimePoint& p) { return p.spin == rates::SpinClass::ms0; });
    std::sort(ms0.begin(), ms0.end(), [](const auto& a, const auto& b) { return a.temperature_k < b.temperature_k; });
    if (ms0.size() < 3) throw InputError("fit_mott_seitz: need at least 3 ms0 points");
    if (!(tau0_ns > 0.0)) throw InputError("fit_mott_seitz: tau0 must be positive");
    if (!(rad.value_mhz > 0.0)) throw InputError("fit_mott_seitz: Gamma_Rad must be positive");

    const bool turn_on = std::any_of(ms0.begin(), ms0.end(), [&](const LifetimePoint& p) {
        return tau0_ns - p.tau_ns > 2.0 * p.sigma_ns;
    });
    if (!turn_on) throw NumericalError("fit_mott_seitz: DeltaE unidentifiable (no point falls 2 sigma below tau0)");

    // Arrhenius start from the three hottest points.
    const double base = 1.0 / tau0_ns;
    const double b = 2.0 * std::numbers::pi * rad.value_mhz * 1e-3;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = ms0.size() - 3; i < ms0.size(); ++i) {
        const double excess = 1.0 / ms0[i].tau_ns - base;
        if (!(excess > 0.0)) {
            throw NumericalError("fit_mott_seitz: DeltaE unidentifiable (no excess decay at the hottest points)");
        }
        const double x = 1.0 / Temperature(ms0[i].temperature_k).thermal_energy_mev();
        const double y = std::log(excess);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    const double delta_e0 = std::max(-slope, 1.0) / units::mev_per_ev;
    const auto& hot = ms0.back();
    const double kt_hot = Temperature(hot.temperature_k).thermal_energy_mev();
    const double log_s0 = std::log((1.0 / hot.tau_ns - base) / b) + delta_e0 * units::mev_per_ev / kt_hot;

    MottSeitzResiduals functor{ms0, base, b};
    Eigen::VectorXd x(2);
    x << log_s0, delta_e0;
    Eigen::LevenbergMarquardt<MottSeitzResiduals> lm(functor);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 5000;
    const auto status = lm.minimize(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters || !x.allFinite()) {
        throw NumericalError("fit_mott_seitz: optimizer failed");
    }

    Eigen::MatrixXd jac(ms0.size(), 2);
    functor.df(x, jac);
    const Eigen::Matrix2d info = jac.transpose() * jac;
    if (std::abs(info.determinant()) <= 1e-300) throw NumericalError("fit_mott_seitz: DeltaE unidentifiable (singular normal matrix)");
    const Eigen::Matrix2d cov = info.inverse();
    Eigen::VectorXd f(ms0.size());
    functor(x, f);

    MottSeitzFit fit{};
    fit.s = std::exp(x[0]);
    fit.delta_e_ev = x[1];
    fit.sigma_log_s = std::sqrt(cov(0, 0));
    fit.sigma_s = fit.s * fit.sigma_log_s;
    fit.sigma_delta_e_ev = std::sqrt(cov(1, 1));
    fit.correlation = cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
    fit.chi_squared = f.squaredNorm();
    for (std::size_t i = 0; i < ms0.size(); ++i) fit.residuals_ns.push_back(f[static_cast<Eigen::Index>(i)] * ms0[i].sigma_ns);
    fit.iterations = static_cast<int>(lm.iter);
    return fit;
}

std::vector<LifetimeRow> lifetime_curves(const LifetimeInputs& in, const psb::PsbModel& model,
                                         const std::vector<double>& temperatures_k,
                                         const std::vector<double>& epsilons) {
    const auto isc_at = [&](Temperature t) {
        const auto F = psb::thermal_overlap(model, t);
        return rates::isc_average(rates::gamma_a1(in.so, F, in.ls.delta_mev),
                                  rates::gamma_e12_finiteT(in.so, in.pc, F, in.ls, t));
    };
    double scale = 1.0;
    if (in.isc_anchor_mhz > 0.0) {
        const double model_cold = isc_at(Temperature(5.0)).value_mhz;
        if (!(model_cold > 0.0)) throw NumericalError("lifetime_curves: model ISC rate vanishes at 5 K; cannot anchor");
        scale = in.isc_anchor_mhz / model_cold;
    }
    std::vector<LifetimeRow> rows;
    for (const double T : temperatures_k) {
        const Temperature t(T);
        const auto isc = rates::RateResult::point(scale * isc_at(t).value_mhz);
        for (const double eps : epsilons) {
            const auto ht = rates::gamma_ht(rates::HighTempParams::make(in.s, in.delta_e_ev, eps), in.rad, t);
            for (const auto spin : {rates::SpinClass::ms0, rates::SpinClass::ms1}) {
                rows.push_back({T, spin, eps, rates::lifetime_ns(in.rad, isc, ht, eps, spin), isc.value_mhz,
                                ht.value_mhz});
            }
        }
    }
    return rows;
}

double isc_sensitivity(const rates::SpinOrbitParams& so, const rates::PhononCoupling& pc, const GridFunction& F,
                       const rates::LevelSpacings& ls, double step_mev) {
    if (!(step_mev > 0.0)) throw InputError("isc_sensitivity: step must be positive");
    const auto isc = [&](double delta) {
        if (delta - F.omega_min() < 0.0 || F.omega_max() - delta < 0.0 || !(gridfn::sample(F, delta) > 0.0)) {
            throw InputError("isc_sensitivity: Delta = " + text::format_double(ls.delta_mev) +
                             " meV is too close to the sideband support edge");
        }
        const auto l = rates::LevelSpacings::make(delta, ls.delta_prime_mev);
        return rates::isc_average(rates::gamma_a1(so, F, delta), rates::gamma_e12_lowT(so, pc, F, l, true)).value_mhz;
    };
    return -(isc(ls.delta_mev + step_mev) - isc(ls.delta_mev - step_mev)) / (2.0 * step_mev);
}

}  // namespace nvisc::inference
