#include "nvisc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"

namespace nvisc::rates {

namespace {

constexpr double kQuadratureStep = 0.01;  // meV

struct Nodes {
    std::size_t cells;
    double step;
};

Nodes nodes_for(double upper) {
    const auto cells = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(upper / kQuadratureStep - 1e-9)));
    return {cells, upper / static_cast<double>(cells)};
}

double singlet_weight(double omega, const LevelSpacings& ls, bool on) {
    if (!on) return 1.0;
    const double x = 1.0 - 2.0 * omega / (ls.delta_mev + ls.delta_prime_mev);
    return x * x;
}

// int_0^upper w g(w) F(Delta - w) dw by trapezoid on the quadrature grid.
double lowT_integral(const GridFunction& F, const LevelSpacings& ls, double upper, bool singlet) {
    if (!(upper > 0.0)) return 0.0;
    const auto [cells, h] = nodes_for(upper);
    double acc = 0.0;
    for (std::size_t k = 0; k <= cells; ++k) {
        const double w = h * static_cast<double>(k);
        const double v = w * singlet_weight(w, ls, singlet) * gridfn::sample(F, ls.delta_mev - w);
        acc += (k == 0 || k == cells) ? 0.5 * v : v;
    }
    return acc * h;
}

double central_prefactor(const SpinOrbitParams& so, double eta_mhz) {
    const double lp = so.lambda_perp_mev(so.ratio_perp.value);
    return 8.0 * lp * lp * units::eta_to_internal(eta_mhz);
}

// Band for a quantity proportional to ratio^2 * eta.
RateResult banded_e12(double value_mhz, const SpinOrbitParams& so, const PhononCoupling& pc) {
    const auto& r = so.ratio_perp;
    const auto& e = pc.eta;
    if (value_mhz == 0.0) return RateResult::with_band(0.0, 0.0, 0.0);
    const double lo = value_mhz * (r.lo * r.lo * e.lo) / (r.value * r.value * e.value);
    const double hi = value_mhz * (r.hi * r.hi * e.hi) / (r.value * r.value * e.value);
    return RateResult::with_band(value_mhz, lo, hi);
}

}  // namespace

SpinOrbitParams SpinOrbitParams::make(double lambda_par_ghz, const MeasuredBand& ratio_perp) {
    if (!(lambda_par_ghz > 0.0) || !std::isfinite(lambda_par_ghz)) throw InputError("lambda_par must be positive");
    if (!(ratio_perp.lo > 0.0)) throw InputError("lambda_perp/lambda_par band must be positive");
    return {units::ghz_to_mev(lambda_par_ghz), ratio_perp};
}

PhononCoupling PhononCoupling::make(const MeasuredBand& eta, double omega_mev) {
    if (!(eta.lo > 0.0)) throw InputError("eta band must be positive");
    if (!(omega_mev > 0.0)) throw InputError("Omega must be positive");
    return {eta, omega_mev};
}

LevelSpacings LevelSpacings::make(double delta_mev, double delta_prime_mev) {
    if (!(delta_mev > 0.0) || !std::isfinite(delta_mev)) throw InputError("Delta must be positive and finite");
    if (!(delta_prime_mev > 0.0)) throw InputError("Delta' must be positive");
    return {delta_mev, delta_prime_mev};
}

RateResult RateResult::point(double mhz) {
    if (!(mhz >= 0.0) || !std::isfinite(mhz)) throw InputError("rate must be finite and non-negative");
    return {mhz, std::nullopt, false, {}};
}

RateResult RateResult::with_band(double mhz, double lo, double hi) {
    auto r = point(mhz);
    if (!(lo <= mhz && mhz <= hi)) throw InputError("rate band must contain its value");
    r.band = Interval{lo, hi};
    return r;
}

HighTempParams HighTempParams::make(double s, double delta_e_ev, double epsilon) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InputError("Mott-Seitz s must be non-negative");
    if (!(delta_e_ev > 0.0) || !std::isfinite(delta_e_ev)) throw InputError("Mott-Seitz barrier must be positive");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be non-negative");
    return {s, delta_e_ev, epsilon};
}

RateResult gamma_a1(const SpinOrbitParams& so, const GridFunction& F, double delta_mev) {
    if (!(delta_mev > 0.0)) throw InputError("gamma_a1: Delta must be positive");
    if (delta_mev < F.omega_min() || delta_mev > F.omega_max()) {
        auto r = RateResult::with_band(0.0, 0.0, 0.0);
        r.flagged = true;
        r.note = "Delta = " + text::format_double(delta_mev) + " meV lies outside the sideband support";
        return r;
    }
    const double f = std::max(0.0, gridfn::sample(F, delta_mev));
    const auto rate = [&](double ratio) {
        const double lp = so.lambda_perp_mev(ratio);
        return units::rate_mev_to_mhz(4.0 * std::numbers::pi * lp * lp * f);
    };
    return RateResult::with_band(rate(so.ratio_perp.value), rate(so.ratio_perp.lo), rate(so.ratio_perp.hi));
}

RateResult gamma_e12_lowT(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F,
                          const LevelSpacings& ls, bool include_singlet_path) {
    if (!(gridfn::sample(F, ls.delta_mev) > 0.0)) {
        throw NumericalError("gamma_e12_lowT: F(Delta) = 0 at Delta = " + text::format_double(ls.delta_mev) +
                             " meV; the ratio form is undefined");
    }
    const double upper = std::min(ls.delta_mev, pc.omega_mev);
    const double integral = lowT_integral(F, ls, upper, include_singlet_path);
    return banded_e12(units::rate_mev_to_mhz(central_prefactor(so, pc.eta.value) * integral), so, pc);
}

MeasuredBand e12_a1_ratio(const PhononCoupling& pc, const GridFunction& F, const LevelSpacings& ls,
                          bool include_singlet_path) {
    const double f = gridfn::sample(F, ls.delta_mev);
    if (!(f > 0.0)) {
        throw NumericalError("e12_a1_ratio: F(Delta) = 0 at Delta = " + text::format_double(ls.delta_mev) + " meV");
    }
    const double upper = std::min(ls.delta_mev, pc.omega_mev);
    const double base = 2.0 / std::numbers::pi * lowT_integral(F, ls, upper, include_singlet_path) / f;
    const auto& e = pc.eta;
    return MeasuredBand::make(base * units::eta_to_internal(e.value), base * units::eta_to_internal(e.lo),
                              base * units::eta_to_internal(e.hi));
}

E12Spectrum gamma_e12_spectral(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F_T,
                               const LevelSpacings& ls, Temperature t) {
    const double reach = std::max({ls.delta_mev - F_T.omega_min(), F_T.omega_max() - ls.delta_mev, 0.0});
    const double upper = std::min(pc.omega_mev, reach);
    const auto [cells, h] = nodes_for(upper > 0.0 ? upper : kQuadratureStep);
    const double c = units::rate_mev_to_mhz(central_prefactor(so, pc.eta.value));
    std::vector<double> em(cells + 1), ab(cells + 1), tot(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
        const double w = h * static_cast<double>(k);
        const double wn = psb::omega_times_occupation(w, t);
        em[k] = upper > 0.0 ? c * (w + wn) * gridfn::sample(F_T, ls.delta_mev - w) : 0.0;
        ab[k] = upper > 0.0 ? c * wn * gridfn::sample(F_T, ls.delta_mev + w) : 0.0;
        tot[k] = em[k] + ab[k];
    }
    return {GridFunction(0.0, h, std::move(em)), GridFunction(0.0, h, std::move(ab)),
            GridFunction(0.0, h, std::move(tot))};
}

E12Spectrum gamma_e12_spectral(const SpinOrbitParams& so, const PhononCoupling& pc, const psb::PsbModel& model,
                               const LevelSpacings& ls, Temperature t) {
    return gamma_e12_spectral(so, pc, psb::thermal_overlap(model, t), ls, t);
}

RateResult gamma_e12_finiteT(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F_T,
                             const LevelSpacings& ls, Temperature t) {
    const auto spectrum = gamma_e12_spectral(so, pc, F_T, ls, t);
    return banded_e12(std::max(0.0, gridfn::integrate(spectrum.total)), so, pc);
}

RateResult gamma_e12_finiteT(const SpinOrbitParams& so, const PhononCoupling& pc, const psb::PsbModel& model,
                             const LevelSpacings& ls, Temperature t) {
    return gamma_e12_finiteT(so, pc, psb::thermal_overlap(model, t), ls, t);
}

RateResult isc_average(const RateResult& a1, const RateResult& e12) {
    const double v = (a1.value_mhz + 2.0 * e12.value_mhz) / 4.0;
    if (!a1.band && !e12.band) return RateResult::point(v);
    return RateResult::with_band(v, (a1.lo() + 2.0 * e12.lo()) / 4.0, (a1.hi() + 2.0 * e12.hi()) / 4.0);
}

RateResult gamma_ht(const HighTempParams& ht, const RateResult& rad, Temperature t) {
    if (t.is_zero()) return rad.band ? RateResult::with_band(0.0, 0.0, 0.0) : RateResult::point(0.0);
    const double factor = ht.s * std::exp(-ht.delta_e_ev * units::mev_per_ev / t.thermal_energy_mev());
    if (!rad.band) return RateResult::point(factor * rad.value_mhz);
    return RateResult::with_band(factor * rad.value_mhz, factor * rad.lo(), factor * rad.hi());
}

double lifetime_ns(const RateResult& rad, const RateResult& isc, const RateResult& ht, double epsilon,
                   SpinClass spin) {
    if (rad.value_mhz < 0.0 || isc.value_mhz < 0.0 || ht.value_mhz < 0.0 || epsilon < 0.0) {
        throw InputError("lifetime: rates and epsilon must be non-negative");
    }
    const double total = spin == SpinClass::ms0 ? rad.value_mhz + ht.value_mhz
                                                : rad.value_mhz + isc.value_mhz + epsilon * ht.value_mhz;
    if (!(total > 0.0)) throw NumericalError("lifetime: all decay rates vanish (infinite lifetime)");
    return units::lifetime_ns(total);
}

}  // namespace nvisc::rates
