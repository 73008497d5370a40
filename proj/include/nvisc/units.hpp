#pragma once

// Internal unit system: hbar = 1, energies in meV. A rate Gamma is carried
// internally as the energy hbar*Gamma and reported as the ordinary frequency
// Gamma/2pi in MHz, so hbar*Gamma [meV] = h * (Gamma/2pi) and the conversion
// factor is E/h = 241.79892 GHz per meV.

#include <cmath>
#include <numbers>

#include "nvisc/error.hpp"

namespace nvisc {

namespace units {

inline constexpr double k_boltzmann_mev_per_kelvin = 0.08617333;
inline constexpr double ghz_per_mev = 241.79892;
inline constexpr double mhz_per_mev = 241798.92;
inline constexpr double mev_per_ev = 1000.0;

constexpr double ghz_to_mev(double ghz) { return ghz / ghz_per_mev; }
constexpr double mev_to_ghz(double mev) { return mev * ghz_per_mev; }

/// Gamma/2pi in MHz -> hbar*Gamma in meV.
constexpr double rate_mhz_to_mev(double mhz) { return mhz / mhz_per_mev; }
/// hbar*Gamma in meV -> Gamma/2pi in MHz.
constexpr double rate_mev_to_mhz(double mev) { return mev * mhz_per_mev; }

/// Phonon coupling eta quoted as eta/2pi in MHz meV^-3 -> hbar*eta in meV^-2.
constexpr double eta_to_internal(double eta_mhz_per_mev3) { return eta_mhz_per_mev3 / mhz_per_mev; }
constexpr double eta_from_internal(double eta_per_mev2) { return eta_per_mev2 * mhz_per_mev; }

/// Lifetime in ns of a level decaying at Gamma/2pi [MHz].
inline double lifetime_ns(double gamma_over_2pi_mhz) {
    return 1.0e3 / (2.0 * std::numbers::pi * gamma_over_2pi_mhz);
}

}  // namespace units

/// Absolute temperature in kelvin.
class Temperature {
public:
    constexpr Temperature() = default;
    explicit Temperature(double kelvin) : kelvin_(kelvin) {
        if (!(kelvin >= 0.0) || !std::isfinite(kelvin)) {
            throw InputError("temperature must be finite and non-negative");
        }
    }

    constexpr double kelvin() const { return kelvin_; }
    constexpr double thermal_energy_mev() const { return units::k_boltzmann_mev_per_kelvin * kelvin_; }
    constexpr bool is_zero() const { return kelvin_ == 0.0; }

private:
    double kelvin_ = 0.0;
};

}  // namespace nvisc
