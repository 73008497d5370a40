#include "nvisc/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "nvisc/csv.hpp"
#include "nvisc/error.hpp"
#include "nvisc/units.hpp"

namespace nvisc::config {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kRequired = {
    "psb_manifest_path", "lambda_par_ghz", "lambda_perp_ratio", "eta_mhz_per_mev3",
    "omega_cutoff_mev",  "delta_mev",      "delta_prime_mev",   "gamma_rad_mhz",
};

// Unit suffixes, longest first so that stem() strips the whole unit.
const std::vector<std::string> kSuffixes = {"_mhz_per_mev3", "_fraction", "_factor", "_ratio", "_path",
                                            "_flag",         "_mev",      "_ghz",    "_mhz",   "_ev",
                                            "_ns",           "_k"};

std::string stem(const std::string& key) {
    for (const auto& s : kSuffixes) {
        if (key.size() > s.size() && key.ends_with(s)) return key.substr(0, key.size() - s.size());
    }
    const auto pos = key.rfind('_');
    return pos == std::string::npos ? key : key.substr(0, pos);
}

struct Context {
    std::string where;  // "source:line: "
    std::string key;

    [[noreturn]] void fail(const std::string& what) const { throw InputError(where + key + ": " + what); }

    double number(std::string_view token) const {
        const auto v = text::parse_double(token);
        if (!v) fail("malformed number '" + std::string(text::trim(token)) + "'");
        return *v;
    }
};

double positive(const Context& c, std::string_view token) {
    const double v = c.number(token);
    if (!(v > 0.0)) c.fail("must be positive");
    return v;
}

double non_negative(const Context& c, std::string_view token) {
    const double v = c.number(token);
    if (!(v >= 0.0)) c.fail("must be non-negative");
    return v;
}

// "v", "v +- e" or "v [lo, hi]"
MeasuredBand band(const Context& c, std::string_view token) {
    const auto t = std::string(text::trim(token));
    if (const auto pm = t.find("+-"); pm != std::string::npos) {
        const double v = c.number(std::string_view(t).substr(0, pm));
        const double e = c.number(std::string_view(t).substr(pm + 2));
        if (!(e >= 0.0)) c.fail("uncertainty must be non-negative");
        return MeasuredBand::make(v, v - e, v + e);
    }
    if (const auto open = t.find('['); open != std::string::npos) {
        const auto close = t.find(']', open);
        if (close == std::string::npos || close + 1 != t.size()) c.fail("expected 'value [lo, hi]'");
        const auto parts = text::split(std::string_view(t).substr(open + 1, close - open - 1), ',');
        if (parts.size() != 2) c.fail("expected 'value [lo, hi]'");
        const double v = c.number(std::string_view(t).substr(0, open));
        const double lo = c.number(parts[0]);
        const double hi = c.number(parts[1]);
        if (!(lo <= v && v <= hi)) c.fail("band must satisfy lo <= value <= hi");
        return MeasuredBand::make(v, lo, hi);
    }
    return MeasuredBand::point(c.number(t));
}

fs::path existing_path(const Context& c, std::string_view token, const fs::path& base) {
    const auto raw = std::string(text::trim(token));
    if (raw.empty()) c.fail("empty path");
    fs::path p(raw);
    if (p.is_relative() && !base.empty()) p = base / p;
    if (!fs::exists(p)) c.fail("file not found: '" + p.string() + "'");
    return p;
}

bool flag(const Context& c, std::string_view token) {
    const auto t = std::string(text::trim(token));
    if (t == "on" || t == "true" || t == "1") return true;
    if (t == "off" || t == "false" || t == "0") return false;
    c.fail("expected on/off");
}

using Setter = std::function<void(RunConfig&, const Context&, std::string_view, const fs::path&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"psb_manifest_path", [](RunConfig& r, const Context& c, std::string_view v, const fs::path& b) {
             r.psb_manifest = existing_path(c, v, b);
         }},
        {"mix_series_path", [](RunConfig& r, const Context& c, std::string_view v, const fs::path& b) {
             r.mix_series = existing_path(c, v, b);
         }},
        {"lifetime_series_path", [](RunConfig& r, const Context& c, std::string_view v, const fs::path& b) {
             r.lifetime_series = existing_path(c, v, b);
         }},
        {"lambda_par_ghz", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.lambda_par_ghz = positive(c, v);
         }},
        {"lambda_perp_ratio", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.lambda_perp_ratio = band(c, v);
             if (!(r.lambda_perp_ratio.lo >= 0.0)) c.fail("must be non-negative");
         }},
        {"eta_mhz_per_mev3", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.eta_mhz = band(c, v);
             if (!(r.eta_mhz.lo >= 0.0)) c.fail("must be non-negative");
         }},
        {"omega_cutoff_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             const auto t = std::string(text::trim(v));
             r.omega_cutoff_mev = (t == "inf") ? INFINITY : positive(c, v);
         }},
        {"delta_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_mev = positive(c, v);
         }},
        {"delta_prime_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             const auto t = std::string(text::trim(v));
             r.delta_prime_mev = (t == "inf") ? INFINITY : positive(c, v);
         }},
        {"gamma_rad_mhz", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.gamma_rad_mhz = band(c, v);
             if (!(r.gamma_rad_mhz.lo > 0.0)) c.fail("must be positive");
         }},
        {"gamma_a1_target_mhz", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.gamma_a1_target_mhz = band(c, v);
         }},
        {"e12_a1_target_ratio", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.ratio_target = band(c, v);
         }},
        {"exclusion_floor_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.exclusion_floor_mev = non_negative(c, v);
         }},
        {"delta_xy_ghz", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_xy_ghz = non_negative(c, v);
         }},
        {"temperature_k", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.temperature_k = non_negative(c, v);
         }},
        {"delta_sweep_from_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_sweep.lo = positive(c, v);
         }},
        {"delta_sweep_to_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_sweep.hi = positive(c, v);
         }},
        {"delta_sweep_step_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_sweep.step = positive(c, v);
         }},
        {"omega_sweep_from_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.omega_sweep.lo = positive(c, v);
         }},
        {"omega_sweep_to_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.omega_sweep.hi = positive(c, v);
         }},
        {"omega_sweep_step_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.omega_sweep.step = positive(c, v);
         }},
        {"delta_range_lo_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_range.lo = positive(c, v);
         }},
        {"delta_range_hi_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.delta_range.hi = positive(c, v);
         }},
        {"temperature_sweep_from_k", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.temperature_sweep.lo = non_negative(c, v);
         }},
        {"temperature_sweep_to_k", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.temperature_sweep.hi = non_negative(c, v);
         }},
        {"temperature_sweep_step_k", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.temperature_sweep.step = positive(c, v);
         }},
        {"ht_frequency_factor", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.ht_frequency_factor = non_negative(c, v);
         }},
        {"ht_activation_ev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.ht_activation_ev = non_negative(c, v);
         }},
        {"tau0_ns", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.tau0_ns = positive(c, v);
         }},
        {"ht_coupling_fraction", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.ht_coupling_fractions.clear();
             for (const auto& part : text::split(v, ',')) r.ht_coupling_fractions.push_back(non_negative(c, part));
         }},
        {"isc_anchor_mhz", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.isc_anchor_mhz = non_negative(c, v);
         }},
        {"sensitivity_step_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.sensitivity_step_mev = positive(c, v);
         }},
        {"grid_step_mev", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.grid_step_mev = non_negative(c, v);
         }},
        {"singlet_path_flag", [](RunConfig& r, const Context& c, std::string_view v, const fs::path&) {
             r.singlet_path = flag(c, v);
         }},
    };
    return table;
}

void check_sweep(const inference::Sweep& s, const std::string& name) {
    if (!(s.hi >= s.lo)) throw InputError(name + ": 'to' must not be below 'from'");
}

}  // namespace

rates::SpinOrbitParams RunConfig::spin_orbit() const { return rates::SpinOrbitParams::make(lambda_par_ghz, lambda_perp_ratio); }
rates::PhononCoupling RunConfig::coupling() const { return rates::PhononCoupling::make(eta_mhz, omega_cutoff_mev); }
rates::LevelSpacings RunConfig::spacings() const { return rates::LevelSpacings::make(delta_mev, delta_prime_mev); }

rates::RateResult RunConfig::radiative() const {
    return rates::RateResult::with_band(gamma_rad_mhz.value, gamma_rad_mhz.lo, gamma_rad_mhz.hi);
}

double RunConfig::tau0() const { return tau0_ns.value_or(units::lifetime_ns(gamma_rad_mhz.value)); }

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> out = kRequired;
        for (const auto& [k, _] : setters()) {
            if (std::find(kRequired.begin(), kRequired.end(), k) == kRequired.end()) out.push_back(k);
        }
        return out;
    }();
    return keys;
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir, const std::string& source) {
    RunConfig cfg{};
    std::set<std::string> seen;
    std::size_t line_number = 0;
    std::string_view rest = text;
    while (!rest.empty()) {
        ++line_number;
        const auto nl = rest.find('\n');
        auto line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = text::trim(line);
        if (line.empty()) continue;

        const std::string where = source + ":" + std::to_string(line_number) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw InputError(where + "expected 'key = value'");
        const auto key = std::string(text::trim(line.substr(0, eq)));
        const auto value = text::trim(line.substr(eq + 1));

        const auto it = setters().find(key);
        if (it == setters().end()) {
            std::string hint;
            for (const auto& k : known_keys()) {
                if (stem(k) == stem(key) || stem(k) == key) {
                    hint = " (wrong unit suffix? expected '" + k + "')";
                    break;
                }
            }
            throw InputError(where + "unknown key '" + key + "'" + hint);
        }
        if (!seen.insert(key).second) throw InputError(where + "duplicate key '" + key + "'");
        if (value.empty()) throw InputError(where + key + ": missing value");
        it->second(cfg, Context{where, key}, value, base_dir);
    }

    std::vector<std::string> missing;
    for (const auto& k : kRequired) {
        if (!seen.count(k)) missing.push_back(k);
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& k : missing) list += (list.empty() ? "" : ", ") + k;
        throw InputError(source + ": missing required keys: " + list);
    }

    check_sweep(cfg.delta_sweep, "delta_sweep");
    check_sweep(cfg.omega_sweep, "omega_sweep");
    check_sweep(cfg.temperature_sweep, "temperature_sweep");
    if (!(cfg.delta_range.hi >= cfg.delta_range.lo)) throw InputError("delta_range: hi must not be below lo");
    if (cfg.ht_coupling_fractions.empty()) throw InputError("ht_coupling_fraction: needs at least one value");
    return cfg;
}

RunConfig read_config(const fs::path& path) {
    return parse_config(text::read_file(path), path.parent_path(), path.string());
}

}  // namespace nvisc::config
