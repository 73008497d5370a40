#pragma once

// Intersystem-crossing rates, orbital averaging, the thermally activated
// channel and fluorescence lifetimes. Rates are reported as Gamma/2pi in MHz.

#include <optional>
#include <string>

#include "nvisc/grid_function.hpp"
#include "nvisc/intervals.hpp"
#include "nvisc/psb.hpp"
#include "nvisc/units.hpp"

namespace nvisc::rates {

struct SpinOrbitParams {
    double lambda_par_mev;    // hbar * lambda_par
    MeasuredBand ratio_perp;  // lambda_perp / lambda_par

    static SpinOrbitParams make(double lambda_par_ghz, const MeasuredBand& ratio_perp);
    double lambda_perp_mev(double ratio) const { return ratio * lambda_par_mev; }
};

struct PhononCoupling {
    MeasuredBand eta;  // eta/2pi in MHz meV^-3
    double omega_mev;  // acoustic cutoff; may be +inf

    static PhononCoupling make(const MeasuredBand& eta, double omega_mev);
};

struct LevelSpacings {
    double delta_mev;
    double delta_prime_mev;  // may be +inf

    static LevelSpacings make(double delta_mev, double delta_prime_mev);
};

struct RateResult {
    double value_mhz = 0.0;
    std::optional<Interval> band;
    bool flagged = false;
    std::string note;

    double lo() const { return band ? band->lo : value_mhz; }
    double hi() const { return band ? band->hi : value_mhz; }

    static RateResult point(double mhz);
    static RateResult with_band(double mhz, double lo, double hi);
};

struct HighTempParams {
    double s;
    double delta_e_ev;
    double epsilon;

    static HighTempParams make(double s, double delta_e_ev, double epsilon);
};

enum class SpinClass { ms0, ms1 };

/// 4 pi lambda_perp^2 F(Delta). Flagged (value 0) when Delta lies outside F's support.
RateResult gamma_a1(const SpinOrbitParams& so, const GridFunction& F, double delta_mev);

/// Low-temperature Gamma_E1,2 = 8 lambda_perp^2 eta int_0^min(Delta,Omega) w g(w) F(Delta - w) dw
/// with g = 1, or g = (1 - 2w/(Delta + Delta'))^2 when include_singlet_path.
/// Throws NumericalError when F(Delta) = 0.
RateResult gamma_e12_lowT(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F,
                          const LevelSpacings& ls, bool include_singlet_path);

/// Gamma_E1,2 / Gamma_A1 in the low-temperature limit, banded by eta only.
/// Throws NumericalError when F(Delta) = 0.
MeasuredBand e12_a1_ratio(const PhononCoupling& pc, const GridFunction& F, const LevelSpacings& ls,
                          bool include_singlet_path);

/// Emission and absorption parts of the finite-temperature integrand (MHz per meV).
struct E12Spectrum {
    GridFunction emission;
    GridFunction absorption;
    GridFunction total;
};

/// Integrand of gamma_e12_finiteT over [0, Omega] at step <= 0.01 meV, with
/// F_T the temperature-dependent overlap at T (use thermal_overlap). When
/// Omega exceeds what F_T can reach, the range stops where both branches vanish.
E12Spectrum gamma_e12_spectral(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F_T,
                               const LevelSpacings& ls, Temperature t);
E12Spectrum gamma_e12_spectral(const SpinOrbitParams& so, const PhononCoupling& pc, const psb::PsbModel& model,
                               const LevelSpacings& ls, Temperature t);

/// 8 lambda_perp^2 eta int_0^Omega w {[n+1] F_T(Delta - w) + n F_T(Delta + w)} dw.
RateResult gamma_e12_finiteT(const SpinOrbitParams& so, const PhononCoupling& pc, const GridFunction& F_T,
                             const LevelSpacings& ls, Temperature t);
RateResult gamma_e12_finiteT(const SpinOrbitParams& so, const PhononCoupling& pc, const psb::PsbModel& model,
                             const LevelSpacings& ls, Temperature t);

/// (Gamma_A1 + 2 Gamma_E1,2) / 4.
RateResult isc_average(const RateResult& a1, const RateResult& e12);

/// s Gamma_Rad exp(-DeltaE / kT); 0 at T = 0.
RateResult gamma_ht(const HighTempParams& ht, const RateResult& rad, Temperature t);

/// Lifetime in ns: ms0 decays at Gamma_Rad + Gamma_HT, ms1 at
/// Gamma_Rad + Gamma_ISC + epsilon Gamma_HT.
double lifetime_ns(const RateResult& rad, const RateResult& isc, const RateResult& ht, double epsilon,
                   SpinClass spin);

}  // namespace nvisc::rates
