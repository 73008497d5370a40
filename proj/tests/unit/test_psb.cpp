#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nvisc/error.hpp"
#include "nvisc/psb.hpp"

using namespace nvisc;

namespace {

double second_moment(const GridFunction& g) {
    const double mass = gridfn::integrate(g);
    double mean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) mean += g.omega_at(i) * g[i];
    mean *= g.step() / mass;
    double var = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) var += std::pow(g.omega_at(i) - mean, 2) * g[i];
    return var * g.step() / mass;
}

double peak(const GridFunction& g) { return *std::max_element(g.values().begin(), g.values().end()); }

GridFunction random_density(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(20.0, 160.0), sig(3.0, 20.0), wt(0.1, 1.0);
    const double m1 = mu(rng), s1 = sig(rng), m2 = mu(rng), s2 = sig(rng), w1 = wt(rng), w2 = wt(rng);
    auto f = GridFunction::tabulate(0.0, 200.0, 0.5, [&](double w) {
        if (w == 0.0) return 0.0;
        return w1 * std::exp(-0.5 * std::pow((w - m1) / s1, 2)) + w2 * std::exp(-0.5 * std::pow((w - m2) / s2, 2));
    });
    return f.scaled(1.0 / gridfn::integrate(f));
}

}  // namespace

TEST_SUITE("psb") {

TEST_CASE("thermal occupation") {
    CHECK(psb::thermal_occupation(10.0, Temperature(0.0)) == 0.0);
    const Temperature t(300.0);
    const double kt = t.thermal_energy_mev();
    CHECK(psb::thermal_occupation(kt, t) == doctest::Approx(1.0 / (std::numbers::e - 1.0)).epsilon(1e-12));
    CHECK(std::abs(psb::thermal_occupation(0.43089, Temperature(5.0)) - 0.58198) < 1e-4);
    CHECK_THROWS_AS(psb::thermal_occupation(0.0, t), InputError);
    CHECK(psb::omega_times_occupation(0.0, t) == doctest::Approx(kt));
    CHECK(psb::omega_times_occupation(1e-9, t) == doctest::Approx(kt).epsilon(1e-8));
    CHECK_THROWS_AS(Temperature(-1.0), InputError);
}

TEST_CASE("required terms") {
    CHECK(psb::required_terms(0.0) == 20);
    CHECK(psb::required_terms(3.49) == 23);
    CHECK(psb::required_terms(25.0) == 75);
}

TEST_CASE("Poisson comb from a single mode") {
    const double S = 3.49;
    const psb::PsbModel model{psb::single_mode(64.0), psb::single_mode(64.0), S, 200.0};
    const auto F = psb::thermal_overlap(model, Temperature(0.0));
    double weight = std::exp(-S);
    for (int i = 1; i <= 15; ++i) {
        weight *= S / i;
        const double line = gridfn::sample(F, 64.0 * i) * F.step();
        CHECK(std::abs(line - weight) < 1e-6);
        CHECK(gridfn::sample(F, 64.0 * i + 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(psb::thermal_overlap(model, Temperature(0.0), 5), InputError);
}

TEST_CASE("deconvolution recovers a single mode") {
    const auto f = psb::single_mode(64.0);
    const auto F0 = psb::forward_overlap(f, 3.49, psb::required_terms(3.49));
    const auto d = psb::deconvolve(F0, 3.49);
    CHECK(gridfn::l1_distance(d.f, f) < 1e-6);
    CHECK(d.residual_l1 < 1e-4);
}

TEST_CASE("deconvolution recovers a two-gaussian density") {
    const auto f = psb::synthetic_one_phonon();
    const auto F0 = psb::forward_overlap(f, 3.49, psb::required_terms(3.49));
    CHECK(gridfn::integrate(F0) == doctest::Approx(-std::expm1(-3.49)).epsilon(1e-9));
    const auto back = psb::extract_one_phonon(F0, 3.49);
    CHECK(gridfn::l1_distance(back, f) < 1e-4);
    CHECK(gridfn::integrate(back) == doctest::Approx(1.0).epsilon(1e-6));
    for (double v : back.values()) CHECK(v >= 0.0);
}

TEST_CASE("deconvolution at weak coupling is first-order") {
    const double S0 = 0.01;
    const auto f = psb::synthetic_one_phonon();
    const auto F0 = psb::forward_overlap(f, S0, psb::required_terms(S0));
    const auto back = psb::extract_one_phonon(F0, S0);
    const auto first_order = gridfn::crop(F0, 0.0, 200.0).scaled(std::exp(S0) / S0);
    CHECK(gridfn::l1_distance(back, first_order) < 2.0 * S0);
    CHECK(gridfn::l1_distance(back, f) < 1e-4);
}

TEST_CASE("deconvolution reports non-convergence with its residual") {
    // A flat sideband is not the compound-Poisson image of any capped density.
    auto F0 = GridFunction::tabulate(0.0, 1000.0, 1.0, [](double w) { return w > 10.0 && w < 900.0 ? 1.0 : 0.0; });
    psb::DeconvolutionOptions opts;
    opts.max_iterations = 5;
    CHECK_THROWS_WITH_AS(psb::deconvolve(F0.scaled(0.01), 3.49, opts), doctest::Contains("residual"), NumericalError);
}

TEST_CASE("thermal one-phonon function") {
    const auto f = psb::synthetic_one_phonon();
    const auto F1_0 = psb::thermal_one_phonon(f, Temperature(0.0));
    CHECK(F1_0.omega_min() == doctest::Approx(-200.0));
    for (std::size_t i = 0; i < F1_0.size(); ++i) {
        const double w = F1_0.omega_at(i);
        if (w < -1e-9) {
            CHECK(F1_0[i] == 0.0);
        } else {
            CHECK(F1_0[i] == gridfn::sample(f, w));
        }
    }

    const Temperature t(300.0);
    const auto F1 = psb::thermal_one_phonon(f, t);
    double worst = 0.0;
    for (std::size_t k = 1; k < f.size(); ++k) {
        const double w = f.omega_at(k);
        const double emit = gridfn::sample(F1, w);
        const double absorb = gridfn::sample(F1, -w);
        worst = std::max(worst, std::abs(absorb - std::exp(-w / t.thermal_energy_mev()) * emit));
    }
    CHECK(worst < 1e-10);

    auto weighted = GridFunction::tabulate(0.0, 200.0, f.step(), [&](double w) {
        if (w == 0.0) return 0.0;
        return (2.0 * psb::thermal_occupation(w, t) + 1.0) * gridfn::sample(f, w);
    });
    CHECK(gridfn::integrate(F1) == doctest::Approx(gridfn::integrate(weighted)).epsilon(1e-12));
}

TEST_CASE("Huang-Rhys factor") {
    const auto f = psb::synthetic_one_phonon();
    CHECK(psb::huang_rhys(f, 3.49, Temperature(0.0), 1000.0) == doctest::Approx(3.49).epsilon(1e-9));
    CHECK(psb::huang_rhys(f, 3.49, Temperature(0.0), 200.0) == doctest::Approx(3.49).epsilon(1e-9));
    CHECK(psb::huang_rhys(f, 3.49, Temperature(0.0), 64.0) < 3.49);
    // n(w0) = 1 at kT = w0 / ln 2
    const double T1 = 64.0 / (units::k_boltzmann_mev_per_kelvin * std::numbers::ln2);
    CHECK(psb::huang_rhys(psb::single_mode(64.0), 3.49, Temperature(T1), 200.0) ==
          doctest::Approx(3.0 * 3.49).epsilon(1e-9));
    // increases with T
    double prev = 0.0;
    for (double T : {0.0, 50.0, 150.0, 300.0, 700.0}) {
        const double S = psb::huang_rhys(f, 3.49, Temperature(T), 200.0);
        CHECK(S >= prev);
        prev = S;
    }
}

TEST_CASE("Poisson normalization for random densities and temperatures") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> temp(0.0, 700.0), s0(0.5, 5.0);
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = random_density(rng);
        const psb::PsbModel model{f, f, s0(rng), 200.0};
        const Temperature t(trial == 0 ? 0.0 : temp(rng));
        const double S = psb::huang_rhys(f, model.S0, t, model.Omega);
        const auto F = psb::thermal_overlap(model, t);
        CHECK(std::abs(gridfn::integrate(F) + std::expm1(-S)) < 1e-6);
        for (double v : F.values()) CHECK(v >= 0.0);
    }
}

TEST_CASE("thermal broadening") {
    const auto f = psb::synthetic_one_phonon();
    const auto F0 = psb::forward_overlap(f, 3.49, psb::required_terms(3.49));
    const auto model = psb::make_model(F0, 3.49);
    const auto cold = psb::thermal_overlap(model, Temperature(0.0));
    CHECK(gridfn::l1_distance(cold, model.F0) < 1e-3);
    const auto warm = psb::thermal_overlap(model, Temperature(300.0));
    CHECK(peak(warm) < peak(cold));
    CHECK(warm.omega_min() < 0.0);
    CHECK(gridfn::sample(warm, -20.0) > 0.0);
    double prev = 0.0;
    for (double T : {0.0, 100.0, 200.0, 300.0, 500.0, 700.0}) {
        const double m2 = second_moment(psb::thermal_overlap(model, Temperature(T)));
        CHECK(m2 >= prev);
        prev = m2;
    }
}

TEST_CASE("make_model normalizes and validates") {
    const auto f = psb::synthetic_one_phonon();
    const auto F0 = psb::forward_overlap(f, 3.49, psb::required_terms(3.49)).scaled(7.0);
    const auto model = psb::make_model(F0, 3.49);
    CHECK(gridfn::integrate(model.F0) == doctest::Approx(-std::expm1(-3.49)).epsilon(1e-12));
    CHECK(gridfn::l1_distance(model.f1, f) < 1e-4);
    CHECK_THROWS_AS(psb::make_model(F0, -1.0), InputError);
    CHECK_THROWS_AS(psb::make_model(F0.scaled(-1.0), 3.49), InputError);
}

TEST_CASE("manifest io") {
    const auto dir = std::filesystem::temp_directory_path() / "nvisc_manifest_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "F0.csv");
        gridfn::write_csv(csv, psb::forward_overlap(psb::synthetic_one_phonon(), 3.49, 23));
        std::ofstream man(dir / "psb.manifest");
        man << "# test\nf0_csv = F0.csv\ns0 = 3.49\nomega_mev = 150\n";
    }
    const auto m = psb::read_manifest(dir / "psb.manifest");
    CHECK(m.s0 == 3.49);
    CHECK(m.omega_mev == 150.0);
    const auto model = psb::load_model(dir / "psb.manifest");
    CHECK(model.Omega == 150.0);
    {
        std::ofstream man(dir / "bad.manifest");
        man << "f0_csv = F0.csv\ns0 = 3.49\nomega = 150\n";
    }
    CHECK_THROWS_WITH_AS(psb::read_manifest(dir / "bad.manifest"), doctest::Contains(":3:"), InputError);
    std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
