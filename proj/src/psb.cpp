#include "nvisc/psb.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"

namespace nvisc::psb {

namespace {

// FFTW's planner is not re-entrant; execution on distinct arrays is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy {
    void operator()(fftw_plan p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Node index of g's origin; throws unless omega_min is a multiple of the step.
long origin_node(const GridFunction& g, const char* what) {
    const double x = g.omega_min() / g.step();
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-6) {
        throw InputError(std::string(what) + ": grid origin " + text::format_double(g.omega_min()) +
                         " meV is not a multiple of the step");
    }
    return static_cast<long>(r);
}

// Samples of g on nodes 0..last (zero outside g's support). g must be node-aligned.
std::vector<double> from_zero(const GridFunction& g, const char* what) {
    const long o = origin_node(g, what);
    const long last = o + static_cast<long>(g.size()) - 1;
    if (last < 1) throw InputError(std::string(what) + ": no support at positive energies");
    std::vector<double> v(static_cast<std::size_t>(last + 1), 0.0);
    for (long k = std::max(0L, o); k <= last; ++k) v[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k - o)];
    return v;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

double thermal_occupation(double omega_mev, Temperature t) {
    if (t.is_zero()) return 0.0;
    if (omega_mev == 0.0) throw InputError("thermal_occupation: divergent at omega = 0 for T > 0");
    return 1.0 / std::expm1(omega_mev / t.thermal_energy_mev());
}

double omega_times_occupation(double omega_mev, Temperature t) {
    if (t.is_zero()) return 0.0;
    const double kt = t.thermal_energy_mev();
    if (omega_mev == 0.0) return kt;
    return omega_mev / std::expm1(omega_mev / kt);
}

std::size_t required_terms(double S) {
    if (!(S >= 0.0) || !std::isfinite(S)) throw InputError("Huang-Rhys factor must be finite and non-negative");
    return std::max<std::size_t>(20, static_cast<std::size_t>(std::ceil(S + 10.0 * std::sqrt(S))));
}

GridFunction forward_overlap(const GridFunction& F1, double S, std::size_t i_max) {
    if (i_max < 1) throw InputError("forward_overlap: i_max must be at least 1");
    if (!(S >= 0.0) || !std::isfinite(S)) throw InputError("forward_overlap: S must be finite and non-negative");
    const double h = F1.step();
    const long o = origin_node(F1, "forward_overlap");
    const long m = static_cast<long>(F1.size());
    const double mass = sum(std::vector<double>(F1.values().begin(), F1.values().end()));
    if (!(mass > 0.0)) throw InputError("forward_overlap: one-phonon function has no positive mass");

    const auto n = static_cast<long>(i_max);
    const long top = o + m - 1;
    const long lo = std::min(o, n * o);
    const long hi = std::max(top, n * top);
    const auto len = next_pow2(static_cast<std::size_t>(hi - lo + 1));
    const auto L = static_cast<long>(len);
    const auto nc = len / 2 + 1;

    RealBuffer real(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
    ComplexBuffer spec(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nc)));
    Plan fwd, inv;
    {
        std::lock_guard lock(planner_mutex());
        fwd.reset(fftw_plan_dft_r2c_1d(static_cast<int>(len), real.get(), spec.get(), FFTW_ESTIMATE));
        inv.reset(fftw_plan_dft_c2r_1d(static_cast<int>(len), spec.get(), real.get(), FFTW_ESTIMATE));
    }

    std::fill(real.get(), real.get() + len, 0.0);
    for (long j = 0; j < m; ++j) {
        const long node = ((o + j) % L + L) % L;
        real[static_cast<std::size_t>(node)] = F1[static_cast<std::size_t>(j)] / mass;
    }
    fftw_execute(fwd.get());

    // Horner on sum_{i=1..n} S^i/i! z^i.
    std::vector<double> c(i_max + 1, 0.0);
    c[0] = 1.0;
    for (std::size_t i = 1; i <= i_max; ++i) c[i] = c[i - 1] * S / static_cast<double>(i);
    const double scale = std::exp(-S) / (static_cast<double>(len) * h);
    for (std::size_t k = 0; k < nc; ++k) {
        const std::complex<double> z(spec[k][0], spec[k][1]);
        std::complex<double> acc = c[i_max];
        for (std::size_t i = i_max - 1; i >= 1; --i) acc = acc * z + c[i];
        acc *= z * scale;
        spec[k][0] = acc.real();
        spec[k][1] = acc.imag();
    }
    fftw_execute(inv.get());

    std::vector<double> out(static_cast<std::size_t>(hi - lo + 1));
    for (long k = lo; k <= hi; ++k) {
        out[static_cast<std::size_t>(k - lo)] = std::max(0.0, real[static_cast<std::size_t>((k % L + L) % L)]);
    }

    // Trim tails carrying no resolvable mass.
    const double total = sum(out);
    const double cut = 1e-15 * total;
    std::size_t first = 0;
    std::size_t last = out.size() - 1;
    for (double acc = 0.0; first + 2 < out.size(); ++first) {
        acc += out[first];
        if (acc > cut) break;
    }
    for (double acc = 0.0; last > first + 1; --last) {
        acc += out[last];
        if (acc > cut) break;
    }
    std::vector<double> kept(out.begin() + static_cast<long>(first), out.begin() + static_cast<long>(last) + 1);
    return {static_cast<double>(lo + static_cast<long>(first)) * h, h, std::move(kept)};
}

Deconvolution deconvolve(const GridFunction& F0, double S0, const DeconvolutionOptions& opts) {
    if (!(S0 > 0.0) || !std::isfinite(S0)) throw InputError("deconvolve: S0 must be positive");
    if (!(opts.relax > 0.0) || opts.max_iterations < 0 || !(opts.tolerance > 0.0) || !(opts.support_cap_mev > 0.0)) {
        throw InputError("deconvolve: invalid options");
    }
    const double h = F0.step();
    const std::vector<double> target = from_zero(F0, "deconvolve");
    const GridFunction target_fn(0.0, h, target);
    const auto K = std::min(target.size() - 1,
                            static_cast<std::size_t>(std::floor(opts.support_cap_mev / h + 1e-9)));
    const std::size_t i_max = required_terms(S0);
    const double g0 = std::exp(-S0);

    // Clips and rescales to unit discrete mass; the input scale is irrelevant.
    auto finish = [&](std::vector<double> p) {
        for (auto& x : p) x = std::max(0.0, x);
        const double mass = sum(p);
        if (!(mass > 0.0)) throw NumericalError("deconvolve: one-phonon estimate vanished");
        for (auto& x : p) x /= mass * h;
        return p;
    };
    auto residual = [&](const std::vector<double>& f) {
        return gridfn::l1_distance(forward_overlap(GridFunction(0.0, h, f), S0, i_max), target_fn);
    };

    // Direct inversion of the compound-Poisson masses.
    std::vector<double> G(K + 1);
    for (std::size_t k = 0; k <= K; ++k) G[k] = h * target[k];
    std::vector<double> p(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double acc = static_cast<double>(k) * G[k] / S0;
        for (std::size_t j = 1; j < k; ++j) acc -= static_cast<double>(j) * p[j] * G[k - j];
        p[k] = acc / (static_cast<double>(k) * g0);
    }
    std::vector<double> f = finish(p);
    double r = residual(f);

    // First-order start, kept if the direct inversion was worse.
    std::vector<double> naive(K + 1);
    for (std::size_t k = 0; k <= K; ++k) naive[k] = std::exp(S0) * target[k] / S0 * h;
    naive[0] = 0.0;
    naive = finish(naive);
    if (const double rn = residual(naive); rn < r) {
        f = std::move(naive);
        r = rn;
    }

    int it = 0;
    double relax = opts.relax;
    while (r >= opts.tolerance && it < opts.max_iterations && relax > 1e-8) {
        ++it;
        const auto fwd = forward_overlap(GridFunction(0.0, h, f), S0, i_max);
        std::vector<double> cand(K + 1);
        for (std::size_t k = 0; k <= K; ++k) {
            const double w = h * static_cast<double>(k);
            cand[k] = f[k] + relax * (target[k] - gridfn::sample(fwd, w));
        }
        cand = finish(std::move(cand));
        const double rc = residual(cand);
        if (rc < r) {
            f = std::move(cand);
            r = rc;
        } else {
            relax *= 0.5;
        }
    }
    if (r >= opts.tolerance) {
        throw NumericalError("deconvolve: no convergence after " + std::to_string(it) +
                             " iterations (L1 residual " + text::format_double(r, 6) + ")");
    }
    return {GridFunction(0.0, h, std::move(f)), r, it};
}

GridFunction extract_one_phonon(const GridFunction& F0, double S0, const DeconvolutionOptions& opts) {
    return deconvolve(F0, S0, opts).f;
}

GridFunction thermal_one_phonon(const GridFunction& f, Temperature t) {
    const std::vector<double> v = from_zero(f, "thermal_one_phonon");
    if (f.omega_min() < -1e-9 * f.step()) {
        for (std::size_t i = 0; f.omega_at(i) < -1e-9 * f.step(); ++i) {
            if (f[i] != 0.0) throw InputError("thermal_one_phonon: f must vanish for omega < 0");
        }
    }
    const double h = f.step();
    const std::size_t N = v.size() - 1;
    std::vector<double> out(2 * N + 1, 0.0);
    if (t.is_zero()) {
        for (std::size_t k = 0; k <= N; ++k) out[N + k] = v[k];
    } else {
        if (v[0] != 0.0) throw InputError("thermal_one_phonon: f(0) must vanish for T > 0");
        for (std::size_t k = 1; k <= N; ++k) {
            const double n = thermal_occupation(h * static_cast<double>(k), t);
            out[N + k] = (n + 1.0) * v[k];
            out[N - k] = n * v[k];
        }
    }
    return {-h * static_cast<double>(N), h, std::move(out)};
}

double huang_rhys(const GridFunction& f, double S0, Temperature t, double Omega) {
    if (!(Omega > 0.0)) throw InputError("huang_rhys: Omega must be positive");
    const std::vector<double> v = from_zero(f, "huang_rhys");
    const double h = f.step();
    std::vector<double> g(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k == 0) {
            // n(w) f(w) -> kT f'(0) as w -> 0 when f(0) = 0
            if (t.is_zero()) {
                g[0] = v[0];
            } else if (v[0] != 0.0) {
                throw InputError("huang_rhys: f(0) must vanish for T > 0");
            } else {
                g[0] = 2.0 * t.thermal_energy_mev() * v[1] / h;
            }
        } else {
            g[k] = (2.0 * thermal_occupation(h * static_cast<double>(k), t) + 1.0) * v[k];
        }
    }
    return S0 * gridfn::integrate(GridFunction(0.0, h, std::move(g)), 0.0, Omega);
}

GridFunction thermal_overlap(const PsbModel& model, Temperature t) {
    return thermal_overlap(model, t, required_terms(huang_rhys(model.f1, model.S0, t, model.Omega)));
}

GridFunction thermal_overlap(const PsbModel& model, Temperature t, std::size_t i_max) {
    const double S = huang_rhys(model.f1, model.S0, t, model.Omega);
    const std::size_t need = required_terms(S);
    if (i_max < need) {
        throw InputError("thermal_overlap: i_max = " + std::to_string(i_max) + " is below the required " +
                         std::to_string(need) + " terms for S = " + text::format_double(S, 6));
    }
    return forward_overlap(thermal_one_phonon(model.f1, t), S, i_max);
}

PsbModel make_model(const GridFunction& F0, double S0, double Omega, const DeconvolutionOptions& opts) {
    if (!(S0 > 0.0) || !std::isfinite(S0)) throw InputError("PSB model: S0 must be positive");
    if (!(Omega > 0.0)) throw InputError("PSB model: Omega must be positive");
    std::vector<double> v = from_zero(F0, "PSB model");
    const double peak = *std::max_element(v.begin(), v.end());
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] < -1e-9 * std::max(peak, 0.0)) {
            throw InputError("PSB model: F0 negative at omega = " + text::format_double(F0.step() * static_cast<double>(k)) + " meV");
        }
        v[k] = std::max(0.0, v[k]);
    }
    GridFunction raw(0.0, F0.step(), std::move(v));
    const double mass = gridfn::integrate(raw);
    if (!(mass > 0.0)) throw InputError("PSB model: F0 has no positive mass");
    GridFunction normalized = raw.scaled(-std::expm1(-S0) / mass);
    auto f1 = extract_one_phonon(normalized, S0, opts);
    return {std::move(normalized), std::move(f1), S0, Omega};
}

Manifest read_manifest(const std::filesystem::path& path) {
    const std::string body = text::read_file(path);
    Manifest m;
    bool have_csv = false;
    bool have_s0 = false;
    std::istringstream in(body);
    std::string line;
    for (std::size_t number = 1; std::getline(in, line); ++number) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto s = text::trim(line);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        const auto where = path.string() + ":" + std::to_string(number) + ": ";
        if (eq == std::string_view::npos) throw InputError(where + "expected key = value");
        const std::string key(text::trim(s.substr(0, eq)));
        const std::string value(text::trim(s.substr(eq + 1)));
        if (key == "f0_csv") {
            m.f0_csv = path.parent_path() / value;
            have_csv = true;
        } else if (key == "s0" || key == "omega_mev") {
            const auto x = text::parse_double(value);
            if (!x) throw InputError(where + "malformed number for '" + key + "'");
            (key == "s0" ? m.s0 : m.omega_mev) = *x;
            have_s0 = have_s0 || key == "s0";
        } else {
            throw InputError(where + "unknown manifest key '" + key + "'");
        }
    }
    if (!have_csv || !have_s0) throw InputError(path.string() + ": manifest needs f0_csv and s0");
    return m;
}

std::string format_manifest(const Manifest& m) {
    return "f0_csv = " + m.f0_csv.generic_string() + "\ns0 = " + text::format_double(m.s0) +
           "\nomega_mev = " + text::format_double(m.omega_mev) + "\n";
}

PsbModel load_model(const std::filesystem::path& manifest_path, double grid_step) {
    const Manifest m = read_manifest(manifest_path);
    GridFunction F0 = gridfn::read_csv_file(m.f0_csv.string());
    if (grid_step > 0.0 && std::abs(grid_step - F0.step()) > 1e-9 * F0.step()) F0 = gridfn::resample(F0, grid_step);
    return make_model(F0, m.s0, m.omega_mev);
}

GridFunction synthetic_one_phonon(double step) {
    const auto gauss = [](double w, double mu, double sigma) {
        const double z = (w - mu) / sigma;
        return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    };
    auto f = GridFunction::tabulate(0.0, 200.0, step, [&](double w) {
        return w == 0.0 ? 0.0 : 0.6 * gauss(w, 64.0, 6.0) + 0.4 * gauss(w, 110.0, 15.0);
    });
    const double mass = step * std::accumulate(f.values().begin(), f.values().end(), 0.0);
    return f.scaled(1.0 / mass);
}

GridFunction single_mode(double omega0, double step) {
    auto f = GridFunction::tabulate(0.0, 200.0, step, [](double) { return 0.0; });
    std::vector<double> v(f.values().begin(), f.values().end());
    const auto k = static_cast<std::size_t>(std::llround(omega0 / step));
    if (k == 0 || k >= v.size()) throw InputError("single_mode: omega0 outside (0, 200] meV");
    v[k] = 1.0 / step;
    return {0.0, step, std::move(v)};
}

}  // namespace nvisc::psb
