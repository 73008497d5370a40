#pragma once

// Phonon-induced orbital mixing inside the excited triplet: two-phonon Raman
// rate, its spectral decomposition, the one-phonon channel and eta extraction.

#include <filesystem>
#include <string>
#include <vector>

#include "nvisc/grid_function.hpp"
#include "nvisc/intervals.hpp"
#include "nvisc/rates.hpp"
#include "nvisc/units.hpp"

namespace nvisc::mixing {

/// int_0^inf x^4/(e^x - 1) (1/(e^(x + x_delta) - 1) + 1) dx. x_delta may be +inf.
double alpha_const(double x_delta);

struct MixingParams {
    MeasuredBand eta;     // eta/2pi in MHz meV^-3
    double delta_xy_mev;  // orbital splitting
    Temperature t;

    static MixingParams make(const MeasuredBand& eta, double delta_xy_mev, Temperature t);
};

/// (64/pi) alpha eta^2 (kT)^5, banded by eta. Requires T > 0.
rates::RateResult gamma_mix(const MixingParams& mp);

/// (64/pi) eta^2 w^4 n(w) [n(w + Delta_xy) + 1] in MHz per meV on
/// [0, 40 kT] at step kT/200.
GridFunction gamma_mix_spectral(const MixingParams& mp);

struct OnePhononMix {
    rates::RateResult emission;       // 4 eta [n + 1] Delta_xy^3
    rates::RateResult absorption;     // 4 eta n Delta_xy^3
    rates::RateResult linear_in_t;    // 4 eta kT Delta_xy^2
    bool linear_regime;               // Delta_xy < 0.05 kT
};
OnePhononMix gamma_mix_one_phonon(const MixingParams& mp);

struct MixPoint {
    double temperature_k;
    double gamma_mhz;
    double sigma_mhz;
};
using MixSeries = std::vector<MixPoint>;

/// CSV with header temperature_K,gamma_mix_MHz,sigma_MHz; '#' comments.
MixSeries read_mix_series(const std::filesystem::path& path);
MixSeries parse_mix_series(const std::string& body, const std::string& source);
std::string format_mix_series(const MixSeries& series);

struct EtaFit {
    double eta;        // MHz meV^-3
    double sigma_eta;  // 1 sigma
    double eta_squared;
    double sigma_eta_squared;
    double chi_squared;
    std::size_t points;
};

/// Weighted linear least squares in eta^2 with the exact alpha(T) per point.
EtaFit extract_eta(const MixSeries& data, double delta_xy_mev);

}  // namespace nvisc::mixing
