#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nvisc/error.hpp"
#include "nvisc/rates.hpp"

using namespace nvisc;

namespace {

const auto kSo = rates::SpinOrbitParams::make(5.33, MeasuredBand::make(1.2, 1.0, 1.4));
const auto kEta = MeasuredBand::make(44.0, 41.6, 46.4);

// Linear F(w) = a + b w on [0, 1000] meV; exactly representable on the grid.
GridFunction linear_F(double a, double b) {
    return GridFunction::tabulate(0.0, 1000.0, 0.25, [=](double w) { return a + b * w; });
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("unit conversions round trip") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1e-3, 1e3);
    for (int i = 0; i < 100; ++i) {
        const double x = u(rng);
        CHECK(std::abs(units::rate_mev_to_mhz(units::rate_mhz_to_mev(x)) - x) <= 1e-12 * x);
        CHECK(std::abs(units::eta_from_internal(units::eta_to_internal(x)) - x) <= 1e-12 * x);
        CHECK(std::abs(units::mev_to_ghz(units::ghz_to_mev(x)) - x) <= 1e-12 * x);
    }
    CHECK(units::ghz_to_mev(5.33) == doctest::Approx(0.022044).epsilon(1e-4));
    CHECK(units::ghz_to_mev(3.9) == doctest::Approx(0.016130).epsilon(1e-4));
}

TEST_CASE("gamma_a1: closed form, zeros and support") {
    const auto F = linear_F(2e-3, 0.0);
    const double lp = 1.2 * 5.33 / 241.79892;
    const double expected = 4.0 * std::numbers::pi * lp * lp * 2e-3 * 241798.92;
    const auto r = rates::gamma_a1(kSo, F, 392.0);
    CHECK(r.value_mhz == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.lo() == doctest::Approx(expected / 1.44).epsilon(1e-12));
    CHECK(r.hi() == doctest::Approx(expected * 1.96 / 1.44).epsilon(1e-12));
    CHECK_FALSE(r.flagged);

    const auto zero = GridFunction::tabulate(0.0, 1000.0, 0.25, [](double w) { return w < 500 ? 0.0 : 1.0; });
    CHECK(rates::gamma_a1(kSo, zero, 300.0).value_mhz == 0.0);
    const auto outside = rates::gamma_a1(kSo, F, 1500.0);
    CHECK(outside.value_mhz == 0.0);
    CHECK(outside.flagged);
    CHECK_THROWS_AS(rates::gamma_a1(kSo, F, 0.0), InputError);
}

TEST_CASE("scaling laws under random rescaling") {
    const auto F = testing::reference_overlap();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    const double a1 = rates::gamma_a1(kSo, F, 392.0).value_mhz;
    const double e12 = rates::gamma_e12_lowT(kSo, pc, F, ls, false).value_mhz;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.2, 5.0);
    for (int i = 0; i < 10; ++i) {
        const double k = u(rng);
        const double q = u(rng);
        const auto so2 = rates::SpinOrbitParams::make(5.33 * k, kSo.ratio_perp);
        const auto pc2 = rates::PhononCoupling::make(MeasuredBand::make(44.0 * q, 41.6 * q, 46.4 * q), 85.0);
        CHECK(std::abs(rates::gamma_a1(so2, F, 392.0).value_mhz / (a1 * k * k) - 1.0) < 1e-12);
        CHECK(std::abs(rates::gamma_e12_lowT(so2, pc2, F, ls, false).value_mhz / (e12 * k * k * q) - 1.0) < 1e-12);
    }
}

TEST_CASE("gamma_e12_lowT against a closed-form integral") {
    const double a = 1e-3, b = 2e-6, delta = 300.0, omega = 85.0;
    const auto F = linear_F(a, b);
    const auto pc = rates::PhononCoupling::make(kEta, omega);
    const auto ls = rates::LevelSpacings::make(delta, 1190.0);
    // int_0^U w (a + b (Delta - w)) dw
    const double integral = (a + b * delta) * omega * omega / 2.0 - b * omega * omega * omega / 3.0;
    const double lp = 1.2 * 5.33 / 241.79892;
    const double expected = 8.0 * lp * lp * (44.0 / 241798.92) * integral * 241798.92;
    const auto r = rates::gamma_e12_lowT(kSo, pc, F, ls, false);
    CHECK(r.value_mhz == doctest::Approx(expected).epsilon(1e-9));
    CHECK(r.lo() < r.value_mhz);
    CHECK(r.hi() > r.value_mhz);
    const auto ratio = rates::e12_a1_ratio(pc, F, ls, false);
    CHECK(ratio.value == doctest::Approx(r.value_mhz / rates::gamma_a1(kSo, F, delta).value_mhz).epsilon(1e-12));
}

TEST_CASE("gamma_e12_lowT limits") {
    const auto F = testing::reference_overlap();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto far = rates::LevelSpacings::make(392.0, INFINITY);
    const double on = rates::gamma_e12_lowT(kSo, pc, F, far, true).value_mhz;
    const double off = rates::gamma_e12_lowT(kSo, pc, F, far, false).value_mhz;
    CHECK(std::abs(on - off) <= 1e-12 * off);
    const auto huge = rates::LevelSpacings::make(392.0, 1e15);
    CHECK(std::abs(rates::gamma_e12_lowT(kSo, pc, F, huge, true).value_mhz - off) <= 1e-12 * off);

    const auto tiny = rates::PhononCoupling::make(kEta, 1e-12);
    CHECK(rates::gamma_e12_lowT(kSo, tiny, F, far, false).value_mhz < 1e-20);

    const auto zero = GridFunction::tabulate(0.0, 1000.0, 0.25, [](double w) { return w < 500 ? 0.0 : 1.0; });
    CHECK_THROWS_AS(rates::gamma_e12_lowT(kSo, pc, zero, far, false), NumericalError);
}

TEST_CASE("gamma_e12_lowT is non-decreasing in Omega") {
    const auto F = testing::reference_overlap();
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    double prev = 0.0;
    for (double omega = 5.0; omega < 392.0; omega += 7.0) {
        const double v = rates::gamma_e12_lowT(kSo, rates::PhononCoupling::make(kEta, omega), F, ls, true).value_mhz;
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("appendix correction at 392 meV is about 15 percent") {
    const auto F = testing::reference_overlap();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    const double on = rates::gamma_e12_lowT(kSo, pc, F, ls, true).value_mhz;
    const double off = rates::gamma_e12_lowT(kSo, pc, F, ls, false).value_mhz;
    const double shift = 1.0 - on / off;
    CHECK(shift > 0.10);
    CHECK(shift < 0.20);
}

TEST_CASE("finite-temperature form reduces to the low-temperature form") {
    const auto& model = testing::reference_model();
    const auto F0 = psb::thermal_overlap(model, Temperature(0.0));
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    const double low = rates::gamma_e12_lowT(kSo, pc, F0, ls, false).value_mhz;
    const double at0 = rates::gamma_e12_finiteT(kSo, pc, F0, ls, Temperature(0.0)).value_mhz;
    CHECK(std::abs(at0 - low) <= 1e-9 * low);
    const double cold = rates::gamma_e12_finiteT(kSo, pc, model, ls, Temperature(1e-3)).value_mhz;
    CHECK(std::abs(cold - low) <= 1e-9 * low);
}

TEST_CASE("finite-temperature error at 5 K stays below 1 percent") {
    const auto& model = testing::reference_model();
    const auto F0 = psb::thermal_overlap(model, Temperature(0.0));
    const auto F5 = psb::thermal_overlap(model, Temperature(5.0));
    for (double delta : {344.0, 392.0, 430.0}) {
        for (double omega : {74.0, 85.0, 93.0}) {
            const auto pc = rates::PhononCoupling::make(kEta, omega);
            const auto ls = rates::LevelSpacings::make(delta, 1190.0);
            const double low = rates::gamma_e12_lowT(kSo, pc, F0, ls, false).value_mhz;
            const double warm = rates::gamma_e12_finiteT(kSo, pc, F5, ls, Temperature(5.0)).value_mhz;
            CHECK(std::abs(warm - low) / low < 0.01);
        }
    }
}

TEST_CASE("spectral decomposition") {
    const auto& model = testing::reference_model();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    for (double T : {0.0, 5.0, 300.0}) {
        const Temperature t(T);
        const auto F = psb::thermal_overlap(model, t);
        const auto spec = rates::gamma_e12_spectral(kSo, pc, F, ls, t);
        const double rate = rates::gamma_e12_finiteT(kSo, pc, F, ls, t).value_mhz;
        CHECK(std::abs(gridfn::integrate(spec.total) - rate) <= 1e-9 * rate);
        CHECK(spec.total.step() <= 0.01 + 1e-12);
        CHECK(spec.total.omega_max() == doctest::Approx(85.0));
        if (T == 0.0) {
            for (double v : spec.absorption.values()) CHECK(v == 0.0);
        }
        if (T == 5.0) {
            const double kt = t.thermal_energy_mev();
            for (std::size_t i = 0; i < spec.total.size(); ++i) {
                if (spec.total.omega_at(i) > 5.0 * kt) CHECK(spec.emission[i] > spec.absorption[i]);
            }
        }
    }
}

TEST_CASE("absorption branch needs support above Delta") {
    const auto F = GridFunction::tabulate(0.0, 392.0, 0.25, [](double w) { return 1e-3 + 1e-6 * w; });
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    const auto spec = rates::gamma_e12_spectral(kSo, pc, F, ls, Temperature(0.0));
    for (double v : spec.absorption.values()) CHECK(v == 0.0);
}

TEST_CASE("orbital average") {
    CHECK(rates::isc_average(rates::RateResult::point(16.0), rates::RateResult::point(8.0)).value_mhz ==
          doctest::Approx(8.0));
    CHECK(rates::isc_average(rates::RateResult::point(0.0), rates::RateResult::point(0.0)).value_mhz == 0.0);
    CHECK(rates::isc_average(rates::RateResult::point(16.0), rates::RateResult::point(0.0)).value_mhz ==
          doctest::Approx(4.0));
    const auto banded = rates::isc_average(rates::RateResult::with_band(16.0, 15.4, 16.6),
                                           rates::RateResult::with_band(8.0, 7.0, 9.0));
    CHECK(banded.lo() == doctest::Approx((15.4 + 14.0) / 4.0));
    CHECK(banded.hi() == doctest::Approx((16.6 + 18.0) / 4.0));
}

TEST_CASE("thermally activated channel") {
    const auto rad = rates::RateResult::with_band(13.2, 12.7, 13.7);
    const auto ht = rates::HighTempParams::make(5.8e7, 0.94, 1.0);
    CHECK(rates::gamma_ht(ht, rad, Temperature(0.0)).value_mhz == 0.0);
    CHECK(rates::gamma_ht(ht, rad, Temperature(1.0)).value_mhz == 0.0);
    CHECK(rates::gamma_ht(ht, rad, Temperature(700.0)).value_mhz == doctest::Approx(130.707221960348).epsilon(1e-9));
    double prev = 0.0;
    for (double T = 50.0; T <= 1000.0; T += 50.0) {
        const double v = rates::gamma_ht(ht, rad, Temperature(T)).value_mhz;
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(rates::HighTempParams::make(1.0, -0.1, 0.0), InputError);
}

TEST_CASE("lifetimes") {
    const auto rad = rates::RateResult::point(13.2);
    const auto none = rates::RateResult::point(0.0);
    const double ms0 = rates::lifetime_ns(rad, none, none, 1.0, rates::SpinClass::ms0);
    CHECK(ms0 == doctest::Approx(12.0572).epsilon(1e-4));
    CHECK(std::abs(ms0 - 12.0) < 0.5);
    const double ms1 = rates::lifetime_ns(rad, rates::RateResult::point(8.0), none, 1.0, rates::SpinClass::ms1);
    CHECK(std::abs(ms1 - 7.51) < 0.01);
    const auto ht = rates::RateResult::point(50.0);
    CHECK(rates::lifetime_ns(rad, rates::RateResult::point(8.0), ht, 0.0, rates::SpinClass::ms1) == doctest::Approx(ms1));
    CHECK(rates::lifetime_ns(rad, rates::RateResult::point(8.0), ht, 1.0, rates::SpinClass::ms1) < ms1);
    CHECK_THROWS_AS(rates::lifetime_ns(none, none, none, 0.0, rates::SpinClass::ms1), NumericalError);
}

}  // TEST_SUITE
