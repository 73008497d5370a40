#pragma once

// Run configuration: flat key = value text where every numeric key carries
// its unit as a suffix (delta_mev, eta_mhz_per_mev3, lambda_par_ghz, ...).
// Banded values are written "1.2 +- 0.2" or "1.2 [1.0, 1.4]".

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nvisc/inference.hpp"
#include "nvisc/intervals.hpp"
#include "nvisc/rates.hpp"

namespace nvisc::config {

struct RunConfig {
    std::filesystem::path psb_manifest;
    std::optional<std::filesystem::path> mix_series;
    std::optional<std::filesystem::path> lifetime_series;

    double lambda_par_ghz;
    MeasuredBand lambda_perp_ratio;
    MeasuredBand eta_mhz;                     // eta/2pi, MHz meV^-3
    double omega_cutoff_mev;
    double delta_mev;
    double delta_prime_mev;
    MeasuredBand gamma_rad_mhz;

    MeasuredBand gamma_a1_target_mhz{16.0, 15.4, 16.6};
    MeasuredBand ratio_target{0.50, 0.45, 0.55};
    double exclusion_floor_mev = 148.0;
    double delta_xy_ghz = 3.9;
    double temperature_k = 5.0;
    inference::Sweep delta_sweep{20.0, 600.0, 1.0};
    inference::Sweep omega_sweep{60.0, 110.0, 1.0};
    Interval delta_range{344.0, 430.0};
    inference::Sweep temperature_sweep{300.0, 700.0, 25.0};
    double ht_frequency_factor = 5.8e7;
    double ht_activation_ev = 0.94;
    std::optional<double> tau0_ns;            // defaults to 1 / (2 pi Gamma_Rad)
    std::vector<double> ht_coupling_fractions{0.0, 0.5, 1.0};
    double isc_anchor_mhz = 0.0;              // 0 disables anchoring
    double sensitivity_step_mev = 2.0;
    double grid_step_mev = 0.0;               // 0 keeps the manifest grid
    bool singlet_path = true;

    rates::SpinOrbitParams spin_orbit() const;
    rates::PhononCoupling coupling() const;
    rates::LevelSpacings spacings() const;
    rates::RateResult radiative() const;
    double tau0() const;
};

/// Parses config text. Relative paths resolve against base_dir and must
/// exist. Throws InputError citing the line for unknown keys, bad numbers,
/// wrong suffixes and duplicates, and listing every missing required key.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {},
                       const std::string& source = "<config>");

RunConfig read_config(const std::filesystem::path& path);

/// Every accepted key, required ones first.
const std::vector<std::string>& known_keys();

}  // namespace nvisc::config
