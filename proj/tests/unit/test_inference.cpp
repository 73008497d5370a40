#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nvisc/error.hpp"
#include "nvisc/inference.hpp"

using namespace nvisc;

namespace {

const auto kSo = rates::SpinOrbitParams::make(5.33, MeasuredBand::make(1.2, 1.0, 1.4));
const auto kEta = MeasuredBand::make(44.0, 41.6, 46.4);
const auto kRad = rates::RateResult::with_band(13.2, 12.7, 13.7);

bool near_set(const IntervalSet& set, double x, double tol) {
    for (const auto& iv : set.intervals()) {
        if (x >= iv.lo - tol && x <= iv.hi + tol) return true;
    }
    return false;
}

inference::LifetimeSeries mott_seitz_data(double s, double de, double tau0, double noise, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    inference::LifetimeSeries out;
    for (double T : {295.0, 450.0, 500.0, 550.0, 600.0, 625.0, 650.0, 675.0, 700.0}) {
        const double tau = inference::mott_seitz_lifetime_ns(s, de, kRad, tau0, Temperature(T));
        out.push_back({T, tau + noise * n(rng), noise > 0.0 ? noise : 0.1, rates::SpinClass::ms0});
    }
    out.push_back({295.0, 7.8, 0.4, rates::SpinClass::ms1});
    return out;
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("sweep points") {
    const auto p = inference::Sweep{20.0, 600.0, 1.0}.points();
    CHECK(p.size() == 581);
    CHECK(p.back() == 600.0);
    CHECK(inference::Sweep{5.0, 5.0, 1.0}.points().size() == 1);
    CHECK_THROWS_AS(inference::Sweep({1.0, 0.0, 1.0}).points(), InputError);
}

TEST_CASE("infer_delta returns the Delta that produced the rate") {
    const auto& F = testing::reference_overlap();
    const auto point_so = rates::SpinOrbitParams::make(5.33, MeasuredBand::point(1.2));
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> pick(150, 590);
    for (int i = 0; i < 25; ++i) {
        const double d = pick(rng);
        const double g = rates::gamma_a1(point_so, F, d).value_mhz;
        const auto res = inference::infer_delta(point_so, F, MeasuredBand::point(g));
        CHECK(near_set(res.intervals, d, 1e-9));
        const auto banded = inference::infer_delta(kSo, F, MeasuredBand::make(g, 0.97 * g, 1.03 * g));
        CHECK(near_set(banded.intervals, d, 1e-9));
    }
}

TEST_CASE("infer_delta exclusion floor and empty results") {
    const auto& F = testing::reference_overlap();
    const double g = rates::gamma_a1(kSo, F, 392.0).value_mhz;
    const auto target = MeasuredBand::make(g, 0.95 * g, 1.05 * g);
    const auto res = inference::infer_delta(kSo, F, target);
    CHECK(res.intervals.contains(392.0));
    for (const auto& iv : res.intervals.intervals()) CHECK(iv.lo >= 148.0);
    const auto kept = inference::infer_delta(kSo, F, target, 0.0);
    CHECK(kept.intervals == kept.before_exclusion);
    CHECK(kept.intervals.intervals().front().lo < 148.0);

    const auto unreachable = inference::infer_delta(kSo, F, MeasuredBand::make(1e4, 9e3, 1.1e4));
    CHECK(unreachable.intervals.empty());
    CHECK(unreachable.central.size() == 581);
}

TEST_CASE("infer_omega on the reference sideband") {
    const auto& F = testing::reference_overlap();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto res = inference::infer_omega(pc, F, {344.0, 430.0}, 1190.0, MeasuredBand::make(0.50, 0.45, 0.55));
    REQUIRE_FALSE(res.intervals.empty());
    const double lo = res.intervals.intervals().front().lo;
    const double hi = res.intervals.intervals().back().hi;
    CHECK(std::abs(lo - 74.0) < 10.0);
    CHECK(std::abs(hi - 93.0) < 10.0);
    CHECK(res.asymptotic_ratio_min > 0.55);

    // below the exclusion threshold the ratio cannot reach the target
    const double threshold = inference::ratio_exclusion_threshold(pc, F, 1190.0, 0.45);
    CHECK(threshold > 148.0);
    CHECK(threshold < 170.0);
    const auto low = inference::infer_omega(pc, F, {60.0, threshold - 1.0}, 1190.0, MeasuredBand::make(0.50, 0.45, 0.55));
    CHECK(low.intervals.empty());
    CHECK(low.asymptotic_ratio_max < 0.45);
}

TEST_CASE("infer_omega inverts the forward ratio") {
    const auto& F = testing::reference_overlap();
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ud(150.0, 600.0);
    std::uniform_real_distribution<double> uo(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double delta = std::round(ud(rng));
        const double omega = 10.0 + uo(rng) * (std::min(delta - 10.0, 200.0) - 10.0);
        const auto pc = rates::PhononCoupling::make(kEta, omega);
        const auto ls = rates::LevelSpacings::make(delta, 1190.0);
        const double r = rates::e12_a1_ratio(pc, F, ls, true).value;
        const auto res = inference::infer_omega(pc, F, {delta, delta}, 1190.0, MeasuredBand::point(r));
        REQUIRE(res.intervals.size() == 1);
        CHECK(std::abs(res.intervals[0].lo - omega) < 0.02);
        CHECK(std::abs(res.intervals[0].hi - omega) < 0.02);
    }
}

TEST_CASE("low-temperature error map") {
    const auto& model = testing::reference_model();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);

    const auto cold = inference::lowT_error_map(kSo, pc, model, ls, Temperature(0.1), inference::ErrorAxis::delta,
                                                {344.0, 430.0, 2.0});
    for (double v : cold.values()) {
        CHECK(v >= 0.0);
        CHECK(v < 1e-4);
    }

    const auto warm = inference::lowT_error_map(kSo, pc, model, ls, Temperature(5.0), inference::ErrorAxis::delta,
                                                {20.0, 110.0, 1.0});
    for (double v : warm.values()) CHECK(v >= 0.0);
    // grows as Delta shrinks: strictly below 50 meV and on a 20 meV coarse grid up to 100 meV
    for (std::size_t i = 1; i < warm.size() && warm.omega_at(i) <= 50.0; ++i) CHECK(warm[i] < warm[i - 1]);
    for (double d = 20.0; d < 100.0; d += 20.0) CHECK(gridfn::sample(warm, d) > gridfn::sample(warm, d + 20.0));

    const auto omega_axis = inference::lowT_error_map(kSo, pc, model, ls, Temperature(5.0),
                                                      inference::ErrorAxis::omega, {74.0, 93.0, 1.0});
    for (double v : omega_axis.values()) CHECK(v < 0.01);
    CHECK_THROWS_AS(inference::lowT_error_map(kSo, pc, model, ls, Temperature(0.0), inference::ErrorAxis::delta,
                                              {344.0, 430.0, 2.0}),
                    InputError);
}

TEST_CASE("Mott-Seitz fit") {
    std::mt19937_64 rng(7);
    const auto clean = mott_seitz_data(5.2e6, 0.94, 12.0, 0.0, rng);
    const auto fit = inference::fit_mott_seitz(clean, kRad, 12.0);
    CHECK(fit.s == doctest::Approx(5.2e6).epsilon(1e-6));
    CHECK(fit.delta_e_ev == doctest::Approx(0.94).epsilon(1e-6));
    CHECK(fit.chi_squared < 1e-12);
    CHECK(fit.residuals_ns.size() == 9);
    CHECK(fit.correlation > 0.9);

    int inside = 0;
    const int draws = 20;
    for (int i = 0; i < draws; ++i) {
        const auto f = inference::fit_mott_seitz(mott_seitz_data(5.2e6, 0.94, 12.0, 0.2, rng), kRad, 12.0);
        if (std::abs(f.delta_e_ev - 0.94) <= 2.0 * f.sigma_delta_e_ev) ++inside;
    }
    CHECK(inside >= 16);

    inference::LifetimeSeries flat;
    for (double T : {295.0, 400.0, 500.0, 600.0}) flat.push_back({T, 12.0, 0.3, rates::SpinClass::ms0});
    CHECK_THROWS_WITH_AS(inference::fit_mott_seitz(flat, kRad, 12.0), doctest::Contains("unidentifiable"),
                         NumericalError);
    CHECK_THROWS_AS(inference::fit_mott_seitz({flat[0], flat[1]}, kRad, 12.0), InputError);
}

TEST_CASE("lifetime series CSV") {
    const std::string body = "# comment\ntemperature_K,tau_ns,sigma_ns,spin_class\n295,12.1,0.5,ms0\n295,7.8,0.4,ms1\n";
    const auto s = inference::parse_lifetime_series(body, "mem");
    REQUIRE(s.size() == 2);
    CHECK(s[1].spin == rates::SpinClass::ms1);
    CHECK_THROWS_WITH_AS(inference::parse_lifetime_series(
                             "temperature_K,tau_ns,sigma_ns,spin_class\n295,12.1,0.5,ms2\n", "x.csv"),
                         doctest::Contains("x.csv:2"), InputError);
    const auto shipped = inference::read_lifetime_series(NVISC_DATA_DIR "/highT_lifetimes.csv");
    CHECK(shipped.size() >= 7);
}

TEST_CASE("lifetime curves") {
    const auto& model = testing::reference_model();
    inference::LifetimeInputs in{kSo, rates::PhononCoupling::make(kEta, 85.0), rates::LevelSpacings::make(392.0, 1190.0),
                                 rates::RateResult::point(13.2), 5.2e6, 0.94, 8.0};
    std::vector<double> temps;
    for (double T = 300.0; T <= 700.0; T += 25.0) temps.push_back(T);
    temps.insert(temps.begin(), 5.0);
    const std::vector<double> eps{0.0, 0.5, 1.0};
    const auto rows = inference::lifetime_curves(in, model, temps, eps);
    CHECK(rows.size() == temps.size() * eps.size() * 2);

    for (const auto& r : rows) {
        if (r.temperature_k != 5.0) continue;
        CHECK(r.gamma_isc_mhz == doctest::Approx(8.0).epsilon(1e-12));
        if (r.spin == rates::SpinClass::ms0) CHECK(r.tau_ns == doctest::Approx(12.057).epsilon(1e-4));
        if (r.spin == rates::SpinClass::ms1) CHECK(std::abs(r.tau_ns - 7.51) < 0.01);
    }
    for (double e : eps) {
        double prev = INFINITY;
        double ms0_ref = NAN;
        for (const auto& r : rows) {
            if (r.epsilon != e || r.temperature_k < 300.0) continue;
            if (r.spin == rates::SpinClass::ms1) {
                CHECK(r.tau_ns < prev);
                prev = r.tau_ns;
            } else if (r.temperature_k == 700.0) {
                ms0_ref = r.tau_ns;
            }
        }
        // ms0 does not depend on epsilon
        CHECK(ms0_ref == doctest::Approx(rows[rows.size() - 6].tau_ns));
    }
}

TEST_CASE("ISC sensitivity") {
    const auto& F = testing::reference_overlap();
    const auto pc = rates::PhononCoupling::make(kEta, 85.0);
    const auto ls = rates::LevelSpacings::make(392.0, 1190.0);
    const double coarse = inference::isc_sensitivity(kSo, pc, F, ls, 2.0);
    const double fine = inference::isc_sensitivity(kSo, pc, F, ls, 1.0);
    CHECK(std::abs(coarse - fine) < 0.01 * std::abs(fine));
    CHECK(coarse > 0.0);

    const auto flat = GridFunction::tabulate(0.0, 1000.0, 0.25, [](double) { return 1e-3; });
    const auto no_e12 = rates::PhononCoupling::make(kEta, 1e-9);
    CHECK(std::abs(inference::isc_sensitivity(kSo, no_e12, flat, ls)) < 1e-15);
    CHECK_THROWS_AS(inference::isc_sensitivity(kSo, pc, F, rates::LevelSpacings::make(F.omega_max() - 1.0, 1e4)), InputError);
}

}  // TEST_SUITE
