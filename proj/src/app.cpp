#include "nvisc/app.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"
#include "nvisc/inference.hpp"
#include "nvisc/mixing.hpp"
#include "nvisc/psb.hpp"
#include "nvisc/rates.hpp"

namespace nvisc::app {

namespace {

namespace fs = std::filesystem;
using text::format_double;

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_double(x, 12);
}

std::string short_num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return format_double(x, 6);
}

std::string band_text(const MeasuredBand& b) {
    if (b.lo == b.value && b.hi == b.value) return short_num(b.value);
    return short_num(b.value) + " [" + short_num(b.lo) + ", " + short_num(b.hi) + "]";
}

std::string rate_text(const rates::RateResult& r) {
    std::string s = short_num(r.value_mhz) + " MHz";
    if (r.band) s += " [" + short_num(r.lo()) + ", " + short_num(r.hi()) + "]";
    if (r.flagged) s += " (flagged: " + r.note + ")";
    return s;
}

std::string spin_name(rates::SpinClass s) { return s == rates::SpinClass::ms0 ? "ms0" : "ms1"; }

std::string intervals_csv(const IntervalSet& set) {
    std::string out = "lo_mev,hi_mev\n";
    for (const auto& iv : set.intervals()) out += num(iv.lo) + "," + num(iv.hi) + "\n";
    return out;
}

std::string intervals_text(const IntervalSet& set) {
    if (set.empty()) return "(none)";
    std::string out;
    for (const auto& iv : set.intervals()) {
        out += (out.empty() ? "" : " U ") + std::string("[") + short_num(iv.lo) + ", " + short_num(iv.hi) + "]";
    }
    return out;
}

std::string grid_csv(const GridFunction& g, const std::string& header) {
    std::ostringstream os;
    gridfn::write_csv(os, g, header);
    return os.str();
}

class Run {
public:
    Run(const std::string& command, const config::RunConfig& cfg, const Options& opts)
        : command_(command), cfg_(cfg), opts_(opts) {}

    const config::RunConfig& cfg() const { return cfg_; }

    const psb::PsbModel& model() {
        if (!model_) {
            const double step = opts_.grid_step_mev.value_or(cfg_.grid_step_mev);
            model_ = psb::load_model(cfg_.psb_manifest, step);
        }
        return *model_;
    }

    const GridFunction& F0() {
        if (!F0_) F0_ = psb::thermal_overlap(model(), Temperature(0.0));
        return *F0_;
    }

    Temperature temperature() const { return Temperature(cfg_.temperature_k); }

    void result(const std::string& key, const std::string& value) { results_ += "  " + key + " = " + value + "\n"; }
    void note(const std::string& line) { results_ += "  " + line + "\n"; }
    void file(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    std::string summary() const {
        std::string s = "nvisc " + command_ + "\n";
        s += "units: energies meV, rates Gamma/2pi MHz, eta/2pi MHz meV^-3, temperatures K, hbar = 1\n";
        s += "inputs:\n";
        const auto& c = cfg_;
        const auto in = [&s](const std::string& k, const std::string& v) { s += "  " + k + " = " + v + "\n"; };
        in("psb_manifest_path", c.psb_manifest.generic_string());
        if (c.mix_series) in("mix_series_path", c.mix_series->generic_string());
        if (c.lifetime_series) in("lifetime_series_path", c.lifetime_series->generic_string());
        in("grid_step_mev", short_num(opts_.grid_step_mev.value_or(c.grid_step_mev)));
        in("lambda_par_ghz", short_num(c.lambda_par_ghz));
        in("lambda_perp_ratio", band_text(c.lambda_perp_ratio));
        in("eta_mhz_per_mev3", band_text(c.eta_mhz));
        in("omega_cutoff_mev", short_num(c.omega_cutoff_mev));
        in("delta_mev", short_num(c.delta_mev));
        in("delta_prime_mev", short_num(c.delta_prime_mev));
        in("gamma_rad_mhz", band_text(c.gamma_rad_mhz));
        in("gamma_a1_target_mhz", band_text(c.gamma_a1_target_mhz));
        in("e12_a1_target_ratio", band_text(c.ratio_target));
        in("exclusion_floor_mev", short_num(c.exclusion_floor_mev));
        in("delta_xy_ghz", short_num(c.delta_xy_ghz));
        in("temperature_k", short_num(c.temperature_k));
        in("singlet_path_flag", c.singlet_path ? "on" : "off");
        s += "results:\n" + results_;
        return s;
    }

    void commit(std::ostream& log) const {
        fs::create_directories(opts_.out_dir);
        for (const auto& [name, content] : files_) text::write_file_atomic(opts_.out_dir / name, content);
        const auto s = summary();
        text::write_file_atomic(opts_.out_dir / "summary.txt", s);
        if (!opts_.quiet) log << s;
    }

private:
    std::string command_;
    const config::RunConfig& cfg_;
    const Options& opts_;
    std::optional<psb::PsbModel> model_;
    std::optional<GridFunction> F0_;
    std::string results_;
    std::vector<std::pair<std::string, std::string>> files_;
};

rates::LevelSpacings spacings_at(const config::RunConfig& c, double delta) {
    return rates::LevelSpacings::make(delta, c.delta_prime_mev);
}

rates::PhononCoupling coupling_at(const config::RunConfig& c, double omega) {
    return rates::PhononCoupling::make(c.eta_mhz, omega);
}

mixing::MixingParams mixing_at(const config::RunConfig& c, double T) {
    return mixing::MixingParams::make(c.eta_mhz, units::ghz_to_mev(c.delta_xy_ghz), Temperature(T));
}

// --- commands -------------------------------------------------------------

int cmd_psb_build(Run& r) {
    const auto& m = r.model();
    const auto t = r.temperature();
    const auto FT = psb::thermal_overlap(m, t);
    const double ST = psb::huang_rhys(m.f1, m.S0, t, m.Omega);
    double mean = 0.0;
    for (std::size_t i = 0; i < m.f1.size(); ++i) mean += m.f1.omega_at(i) * m.f1[i];
    mean *= m.f1.step();
    r.file("one_phonon.csv", grid_csv(m.f1, "f1_per_meV"));
    r.file("overlap_T.csv", grid_csv(FT, "F_per_meV"));
    r.result("S0", short_num(m.S0));
    r.result("S(T)", short_num(ST));
    r.result("Omega_mev", short_num(m.Omega));
    r.result("integral F(T)", short_num(gridfn::integrate(FT)));
    r.result("1 - exp(-S(T))", short_num(-std::expm1(-ST)));
    r.result("mean one-phonon energy_mev", short_num(mean));
    r.result("grid", "[" + short_num(m.F0.omega_min()) + ", " + short_num(m.F0.omega_max()) + "] step " +
                         short_num(m.F0.step()) + " meV");
    return exit_ok;
}

int cmd_deconvolve(Run& r) {
    const auto& m = r.model();
    const auto d = psb::deconvolve(m.F0, m.S0);
    const auto back = psb::forward_overlap(d.f, m.S0, psb::required_terms(m.S0));
    r.file("one_phonon.csv", grid_csv(d.f, "f1_per_meV"));
    r.file("reconvolved.csv", grid_csv(back, "F_per_meV"));
    r.result("residual_l1", short_num(d.residual_l1));
    r.result("polish iterations", std::to_string(d.iterations));
    r.result("one-phonon mass", short_num(gridfn::integrate(d.f)));
    return exit_ok;
}

int cmd_rate_a1(Run& r) {
    const auto& c = r.cfg();
    const auto a1 = rates::gamma_a1(c.spin_orbit(), r.F0(), c.delta_mev);
    r.file("rate_a1.csv", "delta_meV,gamma_a1_MHz,lo_MHz,hi_MHz\n" + num(c.delta_mev) + "," + num(a1.value_mhz) + "," +
                              num(a1.lo()) + "," + num(a1.hi()) + "\n");
    r.result("F(Delta)_per_mev", short_num(gridfn::sample(r.F0(), c.delta_mev)));
    r.result("Gamma_A1/2pi", rate_text(a1));
    r.result("measured Gamma_A1/2pi", band_text(c.gamma_a1_target_mhz) + " MHz");
    return exit_ok;
}

int cmd_rate_e12(Run& r) {
    const auto& c = r.cfg();
    const auto so = c.spin_orbit();
    const auto pc = c.coupling();
    const auto ls = c.spacings();
    const auto t = r.temperature();
    const auto on = rates::gamma_e12_lowT(so, pc, r.F0(), ls, true);
    const auto off = rates::gamma_e12_lowT(so, pc, r.F0(), ls, false);
    const auto FT = psb::thermal_overlap(r.model(), t);
    const auto warm = rates::gamma_e12_finiteT(so, pc, FT, ls, t);
    const auto spec = rates::gamma_e12_spectral(so, pc, FT, ls, t);
    const auto a1 = rates::gamma_a1(so, r.F0(), c.delta_mev);
    std::string csv = "omega_meV,emission_MHz_per_meV,absorption_MHz_per_meV,total_MHz_per_meV\n";
    for (std::size_t i = 0; i < spec.total.size(); ++i) {
        csv += num(spec.total.omega_at(i)) + "," + num(spec.emission[i]) + "," + num(spec.absorption[i]) + "," +
               num(spec.total[i]) + "\n";
    }
    r.file("e12_spectrum.csv", csv);
    r.result("Gamma_E12/2pi (low T, singlet path on)", rate_text(on));
    r.result("Gamma_E12/2pi (low T, singlet path off)", rate_text(off));
    r.result("singlet-path correction", short_num(100.0 * (1.0 - on.value_mhz / off.value_mhz)) + " %");
    r.result("Gamma_E12/2pi (T = " + short_num(c.temperature_k) + " K)", rate_text(warm));
    r.result("Gamma_A1/2pi", rate_text(a1));
    r.result("Gamma_ISC/2pi (orbital average)", rate_text(rates::isc_average(a1, c.singlet_path ? on : off)));
    return exit_ok;
}

int cmd_ratio(Run& r) {
    const auto& c = r.cfg();
    const auto ratio = rates::e12_a1_ratio(c.coupling(), r.F0(), c.spacings(), c.singlet_path);
    const double asym = inference::asymptotic_ratio(c.coupling(), r.F0(), c.spacings(), c.singlet_path);
    std::string csv = "omega_meV,ratio,ratio_lo,ratio_hi\n";
    for (const double omega : c.omega_sweep.points()) {
        const auto v = rates::e12_a1_ratio(coupling_at(c, omega), r.F0(), c.spacings(), c.singlet_path);
        csv += num(omega) + "," + num(v.value) + "," + num(v.lo) + "," + num(v.hi) + "\n";
    }
    r.file("ratio_vs_omega.csv", csv);
    r.result("Gamma_E12/Gamma_A1", band_text(ratio));
    r.result("Gamma_E12/Gamma_A1 (Omega -> inf)", short_num(asym));
    r.result("measured ratio", band_text(c.ratio_target));
    return exit_ok;
}

std::string mix_row(const config::RunConfig& c, double T) {
    const auto mp = mixing_at(c, T);
    const auto g = mixing::gamma_mix(mp);
    const auto one = mixing::gamma_mix_one_phonon(mp);
    return num(T) + "," + num(g.value_mhz) + "," + num(g.lo()) + "," + num(g.hi()) + "," +
           num(one.emission.value_mhz + one.absorption.value_mhz) + "\n";
}

const char* kMixHeader = "temperature_K,gamma_mix_MHz,lo_MHz,hi_MHz,one_phonon_MHz\n";

int cmd_mix(Run& r) {
    const auto& c = r.cfg();
    const auto mp = mixing_at(c, c.temperature_k);
    const auto g = mixing::gamma_mix(mp);
    const auto one = mixing::gamma_mix_one_phonon(mp);
    std::string csv = kMixHeader;
    for (int T = 1; T <= 40; ++T) csv += mix_row(c, T);
    r.file("mix_vs_T.csv", csv);
    r.result("alpha", short_num(mixing::alpha_const(mp.delta_xy_mev / mp.t.thermal_energy_mev())));
    r.result("Gamma_Mix/2pi", rate_text(g));
    r.result("one-phonon emission/2pi", rate_text(one.emission));
    r.result("one-phonon absorption/2pi", rate_text(one.absorption));
    r.result("one-phonon linear-in-T/2pi", rate_text(one.linear_in_t) + (one.linear_regime ? "" : " (outside Delta_xy << kT)"));
    return exit_ok;
}

int cmd_mix_spectral(Run& r) {
    const auto& c = r.cfg();
    const auto mp = mixing_at(c, c.temperature_k);
    const auto spec = mixing::gamma_mix_spectral(mp);
    std::size_t peak = 0;
    for (std::size_t i = 0; i < spec.size(); ++i) {
        if (spec[i] > spec[peak]) peak = i;
    }
    r.file("mix_spectrum.csv", grid_csv(spec, "gamma_mix_MHz_per_meV"));
    r.result("integral", short_num(gridfn::integrate(spec)) + " MHz");
    r.result("Gamma_Mix/2pi", rate_text(mixing::gamma_mix(mp)));
    r.result("peak_mev", short_num(spec.omega_at(peak)) + " (" + short_num(spec.omega_at(peak) / mp.t.thermal_energy_mev()) +
                             " kT)");
    return exit_ok;
}

int cmd_extract_eta(Run& r) {
    const auto& c = r.cfg();
    if (!c.mix_series) throw InputError("mix_series_path is required");
    const auto data = mixing::read_mix_series(*c.mix_series);
    const double dxy = units::ghz_to_mev(c.delta_xy_ghz);
    const auto fit = mixing::extract_eta(data, dxy);
    std::string csv = "temperature_K,gamma_mix_MHz,sigma_MHz,model_MHz,residual_MHz\n";
    for (const auto& p : data) {
        const double model = mixing::gamma_mix(mixing::MixingParams::make(MeasuredBand::point(fit.eta), dxy,
                                                                          Temperature(p.temperature_k)))
                                 .value_mhz;
        csv += num(p.temperature_k) + "," + num(p.gamma_mhz) + "," + num(p.sigma_mhz) + "," + num(model) + "," +
               num(model - p.gamma_mhz) + "\n";
    }
    r.file("eta_fit.csv", csv);
    r.result("eta/2pi", short_num(fit.eta) + " +- " + short_num(fit.sigma_eta) + " MHz meV^-3");
    r.result("chi_squared", short_num(fit.chi_squared) + " over " + std::to_string(fit.points) + " points");
    return exit_ok;
}

int cmd_infer_delta(Run& r) {
    const auto& c = r.cfg();
    const auto res = inference::infer_delta(c.spin_orbit(), r.F0(), c.gamma_a1_target_mhz, c.exclusion_floor_mev,
                                            c.delta_sweep);
    std::string csv = "delta_meV,lower_MHz,central_MHz,upper_MHz\n";
    double peak = 0.0, peak_at = 0.0;
    for (std::size_t i = 0; i < res.central.size(); ++i) {
        csv += num(res.central.omega_at(i)) + "," + num(res.lower[i]) + "," + num(res.central[i]) + "," +
               num(res.upper[i]) + "\n";
        if (res.upper[i] > peak) {
            peak = res.upper[i];
            peak_at = res.central.omega_at(i);
        }
    }
    r.file("delta_intervals.csv", intervals_csv(res.intervals));
    r.file("gamma_a1_vs_delta.csv", csv);
    r.result("target Gamma_A1/2pi", band_text(c.gamma_a1_target_mhz) + " MHz");
    r.result("Delta before exclusion", intervals_text(res.before_exclusion));
    r.result("Delta", intervals_text(res.intervals));
    r.result("largest predicted Gamma_A1/2pi", short_num(peak) + " MHz at Delta = " + short_num(peak_at) + " meV");
    if (res.intervals.empty()) {
        r.note("no Delta reproduces the target rate");
        return exit_empty;
    }
    return exit_ok;
}

int cmd_infer_omega(Run& r) {
    const auto& c = r.cfg();
    const auto res = inference::infer_omega(c.coupling(), r.F0(), c.delta_range, c.delta_prime_mev, c.ratio_target,
                                            c.singlet_path);
    const double threshold =
        inference::ratio_exclusion_threshold(c.coupling(), r.F0(), c.delta_prime_mev, c.ratio_target.lo, c.delta_sweep);
    r.file("omega_intervals.csv", intervals_csv(res.intervals));
    r.result("Delta range", "[" + short_num(c.delta_range.lo) + ", " + short_num(c.delta_range.hi) + "] meV");
    r.result("Omega", intervals_text(res.intervals));
    r.result("ratio at Omega -> inf", "[" + short_num(res.asymptotic_ratio_min) + ", " +
                                          short_num(res.asymptotic_ratio_max) + "]");
    r.result("ratio excludes Delta below", short_num(threshold) + " meV");
    if (res.intervals.empty()) {
        r.note("no Omega reproduces the target ratio");
        return exit_empty;
    }
    return exit_ok;
}

int cmd_lowt_error(Run& r) {
    const auto& c = r.cfg();
    const auto t = r.temperature();
    const auto so = c.spin_orbit();
    const auto by_delta = inference::lowT_error_map(so, c.coupling(), r.model(), c.spacings(), t,
                                                    inference::ErrorAxis::delta, c.delta_sweep);
    const auto by_omega = inference::lowT_error_map(so, c.coupling(), r.model(), c.spacings(), t,
                                                    inference::ErrorAxis::omega, c.omega_sweep);
    r.file("lowt_error_delta.csv", grid_csv(by_delta, "relative_error"));
    r.file("lowt_error_omega.csv", grid_csv(by_omega, "relative_error"));
    double in_range = 0.0;
    for (std::size_t i = 0; i < by_delta.size(); ++i) {
        if (c.delta_range.contains(by_delta.omega_at(i))) in_range = std::max(in_range, by_delta[i]);
    }
    const auto vals = by_omega.values();
    r.result("max error over Delta range", short_num(in_range));
    r.result("max error over Omega sweep", short_num(*std::max_element(vals.begin(), vals.end())));
    return exit_ok;
}

inference::LifetimeInputs lifetime_inputs(const config::RunConfig& c) {
    return {c.spin_orbit(), c.coupling(), c.spacings(), c.radiative(), c.ht_frequency_factor, c.ht_activation_ev,
            c.isc_anchor_mhz};
}

std::string lifetime_csv(const std::vector<inference::LifetimeRow>& rows) {
    std::string csv = "temperature_K,spin_class,epsilon,tau_ns,gamma_isc_MHz,gamma_ht_MHz\n";
    for (const auto& row : rows) {
        csv += num(row.temperature_k) + "," + spin_name(row.spin) + "," + num(row.epsilon) + "," + num(row.tau_ns) +
               "," + num(row.gamma_isc_mhz) + "," + num(row.gamma_ht_mhz) + "\n";
    }
    return csv;
}

int cmd_lifetime(Run& r) {
    const auto& c = r.cfg();
    const auto rows = inference::lifetime_curves(lifetime_inputs(c), r.model(), {c.temperature_k},
                                                 c.ht_coupling_fractions);
    r.file("lifetime.csv", lifetime_csv(rows));
    for (const auto& row : rows) {
        r.result("tau " + spin_name(row.spin) + " (epsilon " + short_num(row.epsilon) + ")",
                 short_num(row.tau_ns) + " ns");
    }
    r.result("Gamma_ISC/2pi", short_num(rows.front().gamma_isc_mhz) + " MHz");
    r.result("Gamma_HT/2pi", short_num(rows.front().gamma_ht_mhz) + " MHz");
    return exit_ok;
}

int cmd_fit_mott_seitz(Run& r) {
    const auto& c = r.cfg();
    if (!c.lifetime_series) throw InputError("lifetime_series_path is required");
    const auto data = inference::read_lifetime_series(*c.lifetime_series);
    const auto fit = inference::fit_mott_seitz(data, c.radiative(), c.tau0());
    std::string csv = "temperature_K,tau_ns,sigma_ns,model_ns,residual_ns\n";
    int inside = 0, total = 0;
    for (const auto& p : data) {
        if (p.spin != rates::SpinClass::ms0) continue;
        const double model = inference::mott_seitz_lifetime_ns(fit.s, fit.delta_e_ev, c.radiative(), c.tau0(),
                                                               Temperature(p.temperature_k));
        csv += num(p.temperature_k) + "," + num(p.tau_ns) + "," + num(p.sigma_ns) + "," + num(model) + "," +
               num(model - p.tau_ns) + "\n";
        ++total;
        if (std::abs(model - p.tau_ns) <= p.sigma_ns) ++inside;
    }
    r.file("mott_seitz_fit.csv", csv);
    r.result("tau0_ns", short_num(c.tau0()));
    r.result("s", short_num(fit.s) + " +- " + short_num(fit.sigma_s));
    r.result("DeltaE_ev", short_num(fit.delta_e_ev) + " +- " + short_num(fit.sigma_delta_e_ev));
    r.result("correlation(ln s, DeltaE)", short_num(fit.correlation));
    r.result("chi_squared", short_num(fit.chi_squared));
    r.result("points within error bars", std::to_string(inside) + " of " + std::to_string(total));
    return exit_ok;
}

int cmd_sensitivity(Run& r) {
    const auto& c = r.cfg();
    std::string csv = "step_meV,sensitivity_MHz_per_meV\n";
    double value = 0.0;
    for (const double f : {1.0, 0.5, 0.25}) {
        const double h = c.sensitivity_step_mev * f;
        const double v = inference::isc_sensitivity(c.spin_orbit(), c.coupling(), r.F0(), c.spacings(), h);
        if (f == 1.0) value = v;
        csv += num(h) + "," + num(v) + "\n";
    }
    r.file("sensitivity.csv", csv);
    r.result("-dGamma_ISC/dDelta", short_num(value) + " MHz/meV");
    return exit_ok;
}

int cmd_sweep(Run& r, const SweepRequest& s) {
    const auto& c = r.cfg();
    const auto xs = inference::Sweep{s.from, s.to, s.step}.points();
    const auto unsupported = [&] {
        throw InputError("sweep: target '" + s.target + "' does not support axis '" + s.axis + "'");
    };
    std::string csv;
    if (s.target == "lifetime") {
        if (s.axis != "T") unsupported();
        csv = lifetime_csv(inference::lifetime_curves(lifetime_inputs(c), r.model(), xs, c.ht_coupling_fractions));
    } else if (s.target == "mix") {
        if (s.axis != "T") unsupported();
        csv = kMixHeader;
        for (const double T : xs) csv += mix_row(c, T);
    } else if (s.target == "rate-a1") {
        if (s.axis != "delta") unsupported();
        csv = "delta_meV,gamma_a1_MHz,lo_MHz,hi_MHz\n";
        for (const double d : xs) {
            const auto a1 = rates::gamma_a1(c.spin_orbit(), r.F0(), d);
            csv += num(d) + "," + num(a1.value_mhz) + "," + num(a1.lo()) + "," + num(a1.hi()) + "\n";
        }
    } else if (s.target == "ratio") {
        if (s.axis != "delta" && s.axis != "omega") unsupported();
        csv = s.axis + "_meV,ratio,ratio_lo,ratio_hi\n";
        for (const double x : xs) {
            const bool d = s.axis == "delta";
            const auto v = rates::e12_a1_ratio(coupling_at(c, d ? c.omega_cutoff_mev : x), r.F0(),
                                               spacings_at(c, d ? x : c.delta_mev), c.singlet_path);
            csv += num(x) + "," + num(v.value) + "," + num(v.lo) + "," + num(v.hi) + "\n";
        }
    } else if (s.target == "rate-e12") {
        const std::string unit = s.axis == "T" ? "K" : "meV";
        if (s.axis != "T" && s.axis != "delta" && s.axis != "omega") unsupported();
        csv = s.axis + "_" + unit + ",gamma_e12_lowT_MHz,gamma_e12_finiteT_MHz\n";
        for (const double x : xs) {
            const double delta = s.axis == "delta" ? x : c.delta_mev;
            const double omega = s.axis == "omega" ? x : c.omega_cutoff_mev;
            const Temperature t(s.axis == "T" ? x : c.temperature_k);
            const auto pc = coupling_at(c, omega);
            const auto ls = spacings_at(c, delta);
            const double low = rates::gamma_e12_lowT(c.spin_orbit(), pc, r.F0(), ls, c.singlet_path).value_mhz;
            const double warm = rates::gamma_e12_finiteT(c.spin_orbit(), pc, r.model(), ls, t).value_mhz;
            csv += num(x) + "," + num(low) + "," + num(warm) + "\n";
        }
    } else {
        throw InputError("sweep: unknown target '" + s.target + "' (lifetime, mix, rate-a1, rate-e12, ratio)");
    }
    auto name = s.target;
    std::replace(name.begin(), name.end(), '-', '_');
    name += "_vs_" + s.axis + ".csv";
    r.file(name, csv);
    r.result("axis", s.axis + " from " + short_num(s.from) + " to " + short_num(s.to) + " step " + short_num(s.step));
    r.result("points", std::to_string(xs.size()));
    r.result("output", name);
    return exit_ok;
}

using Handler = std::function<int(Run&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        {"psb-build", cmd_psb_build},         {"deconvolve", cmd_deconvolve},
        {"rate-a1", cmd_rate_a1},             {"rate-e12", cmd_rate_e12},
        {"ratio", cmd_ratio},                 {"mix", cmd_mix},
        {"mix-spectral", cmd_mix_spectral},   {"extract-eta", cmd_extract_eta},
        {"infer-delta", cmd_infer_delta},     {"infer-omega", cmd_infer_omega},
        {"lowt-error", cmd_lowt_error},       {"lifetime", cmd_lifetime},
        {"fit-mott-seitz", cmd_fit_mott_seitz}, {"sensitivity", cmd_sensitivity},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = {
        "psb-build",  "deconvolve",  "rate-a1",    "rate-e12", "ratio",          "mix",         "mix-spectral",
        "extract-eta", "infer-delta", "infer-omega", "lowt-error", "lifetime", "fit-mott-seitz", "sensitivity",
        "sweep"};
    return names;
}

int run(const std::string& command, const config::RunConfig& cfg, const Options& opts,
        const std::optional<SweepRequest>& sweep, std::ostream& log) {
    const std::string prefix = command + ": ";
    try {
        Run r(command, cfg, opts);
        int status = exit_ok;
        if (command == "sweep") {
            if (!sweep) throw InputError("sweep needs --axis, --from, --to, --step and a target command");
            status = cmd_sweep(r, *sweep);
        } else {
            const auto it = handlers().find(command);
            if (it == handlers().end()) throw InputError("unknown command");
            status = it->second(r);
        }
        r.commit(log);
        return status;
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const EmptyResultError& e) {
        throw EmptyResultError(prefix + e.what());
    } catch (const fs::filesystem_error& e) {
        throw InputError(prefix + e.what());
    }
}

int run_guarded(const std::string& command, const fs::path& config_path, const Options& opts,
                const std::optional<SweepRequest>& sweep, std::ostream& log, std::ostream& err) {
    try {
        const auto cfg = config::read_config(config_path);
        const int status = run(command, cfg, opts, sweep, log);
        if (status == exit_empty) err << "nvisc: " << command << ": inference returned no interval\n";
        return status;
    } catch (const InputError& e) {
        err << "nvisc: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalError& e) {
        err << "nvisc: " << e.what() << "\n";
        return exit_numerical;
    } catch (const EmptyResultError& e) {
        err << "nvisc: " << e.what() << "\n";
        return exit_empty;
    } catch (const std::exception& e) {
        err << "nvisc: " << command << ": " << e.what() << "\n";
        return 1;
    }
}

}  // namespace nvisc::app
