#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nvisc/app.hpp"

namespace {

std::string describe(const std::string& name) {
    static const std::map<std::string, std::string> text = {
        {"psb-build", "one-phonon function and thermal overlap F(omega, T)"},
        {"deconvolve", "recover the one-phonon function from F(omega, 0)"},
        {"rate-a1", "A1 intersystem-crossing rate at delta_mev"},
        {"rate-e12", "E1,2 rate and its energy spectrum"},
        {"ratio", "E1,2/A1 ratio against Omega"},
        {"mix", "two-phonon mixing rate against T"},
        {"mix-spectral", "spectral density of the mixing rate"},
        {"extract-eta", "fit eta to a mixing series"},
        {"infer-delta", "Delta consistent with the A1 target (exit 4 if none)"},
        {"infer-omega", "Omega consistent with the ratio target"},
        {"lowt-error", "error of the low-temperature limit"},
        {"lifetime", "fluorescence lifetimes against T"},
        {"fit-mott-seitz", "fit s and DeltaE to the lifetime table"},
        {"sensitivity", "dGamma_ISC/dDelta at delta_mev"},
        {"sweep", "evaluate a target over T, delta or omega"},
    };
    const auto it = text.find(name);
    return it == text.end() ? std::string() : it->second;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"nvisc: intersystem-crossing and phonon-mixing rates for the NV center"};
    cli.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<double> grid_step;
    bool quiet = false;
    nvisc::app::SweepRequest sweep;

    for (const auto& name : nvisc::app::commands()) {
        auto* sub = cli.add_subcommand(name, describe(name));
        sub->add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--grid-step", grid_step, "resample the sideband to this step (meV)");
        sub->add_flag("--quiet", quiet, "do not print the summary");
        if (name == "sweep") {
            sub->add_option("--axis", sweep.axis, "T, delta or omega")
                ->required()
                ->check(CLI::IsMember({"T", "delta", "omega"}));
            sub->add_option("--from", sweep.from)->required();
            sub->add_option("--to", sweep.to)->required();
            sub->add_option("--step", sweep.step)->required()->check(CLI::PositiveNumber);
            sub->add_option("target", sweep.target, "lifetime, mix, rate-a1, rate-e12 or ratio")->required();
        }
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : nvisc::app::exit_config;
    }

    const auto* sub = cli.get_subcommands().front();
    const std::string command = sub->get_name();
    nvisc::app::Options opts{out_dir, grid_step, quiet};
    std::optional<nvisc::app::SweepRequest> request;
    if (command == "sweep") request = sweep;
    return nvisc::app::run_guarded(command, config_path, opts, request, std::cout, std::cerr);
}
