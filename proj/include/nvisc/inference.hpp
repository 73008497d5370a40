#pragma once

// Inverse analyses: Delta from the A1 rate, Omega from the E1,2/A1 ratio,
// low-temperature-limit error maps, Mott-Seitz fitting, lifetime curves and
// the ISC sensitivity to Delta.

#include <filesystem>
#include <string>
#include <vector>

#include "nvisc/grid_function.hpp"
#include "nvisc/intervals.hpp"
#include "nvisc/psb.hpp"
#include "nvisc/rates.hpp"

namespace nvisc::inference {

struct Sweep {
    double lo;
    double hi;
    double step;

    std::vector<double> points() const;
};

struct DeltaInference {
    IntervalSet intervals;         // after the exclusion floor
    IntervalSet before_exclusion;
    GridFunction lower;            // Gamma_A1 at the ratio band's low edge, MHz
    GridFunction central;
    GridFunction upper;
};

/// Delta values whose predicted Gamma_A1 band meets the target band, with
/// everything below exclusion_floor removed.
DeltaInference infer_delta(const rates::SpinOrbitParams& so, const GridFunction& F, const MeasuredBand& target,
                           double exclusion_floor_mev = 148.0, const Sweep& sweep = {20.0, 600.0, 1.0});

struct OmegaInference {
    IntervalSet intervals;
    double asymptotic_ratio_min;  // ratio at Omega -> inf over the Delta range
    double asymptotic_ratio_max;
};

/// Omega values that bring the low-temperature E1,2/A1 ratio (central eta)
/// into the target band for some Delta in delta_range (swept at delta_step).
/// An upper end of +inf means every larger Omega also fits.
OmegaInference infer_omega(const rates::PhononCoupling& pc, const GridFunction& F, const Interval& delta_range,
                           double delta_prime_mev, const MeasuredBand& ratio_target, bool include_singlet_path = true,
                           double delta_step = 1.0);

/// Ratio at Omega -> inf (the full 0..Delta range).
double asymptotic_ratio(const rates::PhononCoupling& pc, const GridFunction& F, const rates::LevelSpacings& ls,
                        bool include_singlet_path = true);

/// Smallest Delta on the sweep from which the asymptotic ratio reaches
/// target_lo; NaN if it never does.
double ratio_exclusion_threshold(const rates::PhononCoupling& pc, const GridFunction& F, double delta_prime_mev,
                                 double target_lo, const Sweep& sweep = {20.0, 600.0, 1.0});

enum class ErrorAxis { delta, omega };

/// |r_T - r_0| / r_0 with r_T the finite-temperature ratio on F(., T) and r_0
/// the low-temperature ratio (singlet path off) on F(., 0), swept along axis
/// with the other of Delta/Omega held at ls/pc.
GridFunction lowT_error_map(const rates::SpinOrbitParams& so, const rates::PhononCoupling& pc,
                            const psb::PsbModel& model, const rates::LevelSpacings& ls, Temperature t,
                            ErrorAxis axis, const Sweep& sweep);

struct LifetimePoint {
    double temperature_k;
    double tau_ns;
    double sigma_ns;
    rates::SpinClass spin;
};
using LifetimeSeries = std::vector<LifetimePoint>;

/// CSV with header temperature_K,tau_ns,sigma_ns,spin_class (ms0 | ms1).
LifetimeSeries parse_lifetime_series(const std::string& body, const std::string& source);
LifetimeSeries read_lifetime_series(const std::filesystem::path& path);

struct MottSeitzFit {
    double s;
    double sigma_s;
    double delta_e_ev;
    double sigma_delta_e_ev;
    double sigma_log_s;
    double correlation;  // between ln s and DeltaE
    double chi_squared;
    std::vector<double> residuals_ns;  // model - data
    int iterations;
};

/// tau(T) = 1 / (1/tau0 + 2 pi s Gamma_Rad exp(-DeltaE/kT)) fitted to the
/// ms0 points by Levenberg-Marquardt in (ln s, DeltaE).
/// Throws NumericalError("DeltaE unidentifiable") without a visible turn-on.
MottSeitzFit fit_mott_seitz(const LifetimeSeries& data, const rates::RateResult& rad, double tau0_ns);

/// Lifetime in ns predicted by a Mott-Seitz fit.
double mott_seitz_lifetime_ns(double s, double delta_e_ev, const rates::RateResult& rad, double tau0_ns,
                              Temperature t);

struct LifetimeRow {
    double temperature_k;
    rates::SpinClass spin;
    double epsilon;
    double tau_ns;
    double gamma_isc_mhz;
    double gamma_ht_mhz;
};

struct LifetimeInputs {
    rates::SpinOrbitParams so;
    rates::PhononCoupling pc;
    rates::LevelSpacings ls;
    rates::RateResult rad;
    double s;
    double delta_e_ev;
    /// When positive, model Gamma_ISC(T) is rescaled so that Gamma_ISC(5 K)
    /// equals this measured value (MHz).
    double isc_anchor_mhz = 0.0;
};

/// One row per temperature per spin class per epsilon.
std::vector<LifetimeRow> lifetime_curves(const LifetimeInputs& in, const psb::PsbModel& model,
                                         const std::vector<double>& temperatures_k,
                                         const std::vector<double>& epsilons);

/// -(d Gamma_ISC / d Delta) in MHz/meV by central difference (low-temperature
/// rates, singlet path on), i.e. positive when the rate grows as Delta falls.
double isc_sensitivity(const rates::SpinOrbitParams& so, const rates::PhononCoupling& pc, const GridFunction& F,
                       const rates::LevelSpacings& ls, double step_mev = 2.0);

}  // namespace nvisc::inference
