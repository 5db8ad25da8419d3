// jcladder: command-line front end
//
//   jcladder <subcommand> --config run.json [--out dir]
//
// Frequencies are in GHz (f = E/h, omega/2pi); photon numbers and level
// indices are dimensionless counts.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "jcladder/cli_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Transmon-resonator ladder beyond the rotating-wave approximation.\n"
        "All frequencies are in GHz (E/h); photon numbers are counts.\n"
        "Each subcommand writes CSV files and a .meta.json sidecar into the output directory."};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;

    struct Entry {
        const char* name;
        const char* help;
    };
    const Entry entries[] = {
        {"spectrum", "transmon levels: spectrum.csv (k, E_k_GHz, omega_k0_GHz)"},
        {"stark", "ac Stark shift vs photon number: stark.csv (n, stark_shift_GHz, linear_ref_GHz)"},
        {"fan", "fan diagram: fan.csv (n_total, k, fan_freq_GHz)"},
        {"geff", "effective couplings at first resonance: geff.csv"},
        {"resonance-sweep", "resonances vs qubit frequency: resonance_sweep.csv (needs sweep block)"},
        {"tls", "TLS composite-level crossing: tls.csv and tls_summary.csv (needs tls block)"},
        {"oracle", "avoided-crossing splitting check of g_eff: oracle.csv"},
    };
    for (const Entry& e : entries) {
        CLI::App* sub = app.add_subcommand(e.name, e.help);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    jcladder::RunConfig cfg;
    try {
        cfg = jcladder::load_config(config_path);
    } catch (const jcladder::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return jcladder::run_subcommand(name, cfg, cfg.output_dir, std::cout, std::cerr);
}
