#pragma once

// Phonon sideband model: Bose occupation, one-phonon density extraction and
// the temperature-dependent vibrational overlap function.

#include <cstddef>
#include <filesystem>
#include <string>

#include "nvisc/grid_function.hpp"
#include "nvisc/units.hpp"

namespace nvisc::psb {

/// 1/(exp(omega/kT) - 1); 0 at T = 0. Throws InputError for omega = 0 at T > 0.
double thermal_occupation(double omega_mev, Temperature t);

/// omega * n(omega, T), continuous at omega = 0 where it equals kT.
double omega_times_occupation(double omega_mev, Temperature t);

struct PsbModel {
    GridFunction F0;  // low-temperature overlap, meV^-1, integral 1 - exp(-S0)
    GridFunction f1;  // one-phonon density, unit integral
    double S0 = 0.0;
    double Omega = 200.0;  // upper limit of the S(T) integral, meV
};

struct DeconvolutionOptions {
    double relax = 0.5;
    int max_iterations = 500;
    double tolerance = 1e-4;  // L1 residual
    double support_cap_mev = 200.0;
};

struct Deconvolution {
    GridFunction f;
    double residual_l1;
    int iterations;  // polishing sweeps after the direct inversion
};

/// Smallest admissible series length for Huang-Rhys factor S.
std::size_t required_terms(double S);

/// exp(-S) * sum_{i=1..i_max} S^i/i! * F1^(*i), with F1 scaled to unit
/// discrete mass. F1's origin must be a grid node multiple.
GridFunction forward_overlap(const GridFunction& F1, double S, std::size_t i_max);

/// Inverts F0 = forward_overlap(f, S0) for f. Direct compound-Poisson
/// recursion on the sample masses, then damped fixed-point polishing.
/// Throws NumericalError (with the residual) when the tolerance is not met.
Deconvolution deconvolve(const GridFunction& F0, double S0, const DeconvolutionOptions& opts = {});

GridFunction extract_one_phonon(const GridFunction& F0, double S0, const DeconvolutionOptions& opts = {});

/// F1(omega, T): (n+1) f on omega >= 0, n f(|omega|) on omega < 0, on the
/// symmetric grid [-omega_max(f), omega_max(f)].
GridFunction thermal_one_phonon(const GridFunction& f, Temperature t);

/// S(T) = S0 * integral_0^Omega (2n + 1) f.
double huang_rhys(const GridFunction& f, double S0, Temperature t, double Omega);

GridFunction thermal_overlap(const PsbModel& model, Temperature t);
/// Throws InputError if i_max is below required_terms(S(T)).
GridFunction thermal_overlap(const PsbModel& model, Temperature t, std::size_t i_max);

/// Validates and normalizes F0 (to 1 - exp(-S0), padded to start at 0 meV)
/// and extracts f1.
PsbModel make_model(const GridFunction& F0, double S0, double Omega = 200.0,
                    const DeconvolutionOptions& opts = {});

/// Manifest: key = value lines with keys f0_csv (relative to the manifest),
/// s0 and optional omega_mev. '#' starts a comment.
struct Manifest {
    std::filesystem::path f0_csv;
    double s0 = 0.0;
    double omega_mev = 200.0;
};
Manifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const Manifest& m);

/// Loads the manifest and builds the model; grid_step > 0 resamples F0 first.
PsbModel load_model(const std::filesystem::path& manifest_path, double grid_step = 0.0);

/// Analytic test density on [0, 200] meV: two normalized Gaussians
/// (64 meV, sigma 6; 110 meV, sigma 15) weighted 0.6/0.4, zero at the origin.
GridFunction synthetic_one_phonon(double step = 0.25);
/// Unit spike at omega0 (a single node of height 1/step) on [0, 200] meV.
GridFunction single_mode(double omega0, double step = 0.25);

}  // namespace nvisc::psb
