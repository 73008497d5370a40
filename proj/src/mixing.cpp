#include "nvisc/mixing.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"
#include "nvisc/psb.hpp"

namespace nvisc::mixing {

namespace {

constexpr double kPrefactor = 64.0 / std::numbers::pi;

double mix_mhz(double eta_mhz, double alpha, double kt) {
    const double eta = units::eta_to_internal(eta_mhz);
    return units::rate_mev_to_mhz(kPrefactor * alpha * eta * eta * std::pow(kt, 5));
}

rates::RateResult banded(double v, double lo, double hi) { return rates::RateResult::with_band(v, lo, hi); }

}  // namespace

double alpha_const(double x_delta) {
    if (!(x_delta >= 0.0)) throw InputError("alpha_const: x_delta must be non-negative");
    const auto integrand = [x_delta](double x) {
        if (x <= 0.0) return 0.0;
        const double tail = std::isinf(x_delta) ? 0.0 : 1.0 / std::expm1(x + x_delta);
        return std::pow(x, 4) / std::expm1(x) * (tail + 1.0);
    };
    // the integrand is below 1e-25 beyond x = 80
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 80.0, 20, 1e-14, &error);
    if (error > 1e-9) throw NumericalError("alpha_const: quadrature error estimate " + text::format_double(error, 3));
    return value;
}

MixingParams MixingParams::make(const MeasuredBand& eta, double delta_xy_mev, Temperature t) {
    if (!(eta.lo >= 0.0)) throw InputError("eta band must be non-negative");
    if (!(delta_xy_mev >= 0.0) || !std::isfinite(delta_xy_mev)) throw InputError("Delta_xy must be non-negative");
    return {eta, delta_xy_mev, t};
}

rates::RateResult gamma_mix(const MixingParams& mp) {
    if (mp.t.is_zero()) throw InputError("gamma_mix: requires T > 0");
    const double kt = mp.t.thermal_energy_mev();
    const double alpha = alpha_const(mp.delta_xy_mev / kt);
    return banded(mix_mhz(mp.eta.value, alpha, kt), mix_mhz(mp.eta.lo, alpha, kt), mix_mhz(mp.eta.hi, alpha, kt));
}

GridFunction gamma_mix_spectral(const MixingParams& mp) {
    if (mp.t.is_zero()) throw InputError("gamma_mix_spectral: requires T > 0");
    const double kt = mp.t.thermal_energy_mev();
    const double eta = units::eta_to_internal(mp.eta.value);
    const double c = units::rate_mev_to_mhz(kPrefactor * eta * eta);
    return GridFunction::tabulate(0.0, 40.0 * kt, kt / 200.0, [&](double w) {
        if (w <= 0.0) return 0.0;
        const double n1 = psb::thermal_occupation(w, mp.t);
        const double n2 = psb::thermal_occupation(w + mp.delta_xy_mev, mp.t);
        return c * std::pow(w, 4) * n1 * (n2 + 1.0);
    });
}

OnePhononMix gamma_mix_one_phonon(const MixingParams& mp) {
    const double d = mp.delta_xy_mev;
    const double kt = mp.t.thermal_energy_mev();
    // at d = 0 the occupation diverges but n d^3 -> 0
    const double n = d > 0.0 ? psb::thermal_occupation(d, mp.t) : 0.0;
    const auto rate = [&](double eta_mhz, double occupation_factor) {
        return units::rate_mev_to_mhz(4.0 * units::eta_to_internal(eta_mhz) * occupation_factor * d * d * d);
    };
    const auto approx = [&](double eta_mhz) {
        return units::rate_mev_to_mhz(4.0 * units::eta_to_internal(eta_mhz) * kt * d * d);
    };
    const auto& e = mp.eta;
    return {banded(rate(e.value, n + 1.0), rate(e.lo, n + 1.0), rate(e.hi, n + 1.0)),
            banded(rate(e.value, n), rate(e.lo, n), rate(e.hi, n)),
            banded(approx(e.value), approx(e.lo), approx(e.hi)),
            d < 0.05 * kt};
}

MixSeries parse_mix_series(const std::string& body, const std::string& source) {
    const auto records = text::csv_records(body);
    const auto where = [&source](std::size_t line) { return source + ":" + std::to_string(line) + ": "; };
    if (records.empty()) throw InputError(source + ": empty mixing series");
    const auto& header = records.front();
    if (header.fields != std::vector<std::string>{"temperature_K", "gamma_mix_MHz", "sigma_MHz"}) {
        throw InputError(where(header.line_number) + "expected header 'temperature_K,gamma_mix_MHz,sigma_MHz'");
    }
    MixSeries out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 3) throw InputError(where(rec.line_number) + "expected three columns");
        const auto t = text::parse_double(rec.fields[0]);
        const auto g = text::parse_double(rec.fields[1]);
        const auto s = text::parse_double(rec.fields[2]);
        if (!t || !g || !s) throw InputError(where(rec.line_number) + "malformed number");
        if (!(*t > 0.0)) throw InputError(where(rec.line_number) + "temperature must be positive");
        if (!(*s > 0.0)) throw InputError(where(rec.line_number) + "sigma must be positive");
        if (!out.empty() && !(*t > out.back().temperature_k)) {
            throw InputError(where(rec.line_number) + "temperatures must be strictly increasing");
        }
        out.push_back({*t, *g, *s});
    }
    return out;
}

MixSeries read_mix_series(const std::filesystem::path& path) {
    return parse_mix_series(text::read_file(path), path.string());
}

std::string format_mix_series(const MixSeries& series) {
    std::string out = "temperature_K,gamma_mix_MHz,sigma_MHz\n";
    for (const auto& p : series) {
        out += text::format_double(p.temperature_k, 12) + "," + text::format_double(p.gamma_mhz) + "," +
               text::format_double(p.sigma_mhz) + "\n";
    }
    return out;
}

EtaFit extract_eta(const MixSeries& data, double delta_xy_mev) {
    if (data.size() < 3) throw InputError("extract_eta: need at least 3 points");
    double swcc = 0.0, swcy = 0.0;
    std::vector<double> c(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Temperature t(data[i].temperature_k);
        const double kt = t.thermal_energy_mev();
        c[i] = kPrefactor * alpha_const(delta_xy_mev / kt) * std::pow(kt, 5) / units::mhz_per_mev;
        const double w = 1.0 / (data[i].sigma_mhz * data[i].sigma_mhz);
        swcc += w * c[i] * c[i];
        swcy += w * c[i] * data[i].gamma_mhz;
    }
    const double u = swcy / swcc;
    if (!(u > 0.0)) throw NumericalError("extract_eta: fitted eta^2 is not positive; data inconsistent with the model");
    const double sigma_u = 1.0 / std::sqrt(swcc);
    double chi2 = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) chi2 += std::pow((data[i].gamma_mhz - c[i] * u) / data[i].sigma_mhz, 2);
    const double eta = std::sqrt(u);
    return {eta, sigma_u / (2.0 * eta), u, sigma_u, chi2, data.size()};
}

}  // namespace nvisc::mixing
