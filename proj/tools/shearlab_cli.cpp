// shearlab: command-line front end.
//   shearlab <mode> [--config FILE] [--set key=value]... [--out DIR]
//   shearlab replay --manifest FILE [--out DIR]
//   shearlab print-config
#include "shearlab/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    using namespace shearlab;
    CLI::App app{"pseudospectral lab for Boussinesq perturbations of Couette flow"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    struct ModeArgs {
        std::string config, out;
        std::vector<std::string> sets;
    };
    std::vector<std::pair<std::string, ModeArgs>> modes;
    modes.reserve(run_modes().size());
    for (const auto& m : run_modes()) {
        modes.emplace_back(m, ModeArgs{});
        auto* sub = app.add_subcommand(m, "run the " + m + " mode");
        ModeArgs& a = modes.back().second;
        sub->add_option("-c,--config", a.config, "key = value config file")->check(CLI::ExistingFile);
        sub->add_option("-s,--set", a.sets, "override one key (key=value), repeatable");
        sub->add_option("-o,--out", a.out, "output directory (overrides output.dir)");
    }
    std::string manifest, replay_out;
    auto* rep = app.add_subcommand("replay", "re-run the configuration stored in a manifest");
    rep->add_option("-m,--manifest", manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
    rep->add_option("-o,--out", replay_out, "output directory (overrides the manifest's)");
    auto* pc = app.add_subcommand("print-config", "print every key with its default value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    if (pc->parsed()) {
        std::cout << config_to_text(RunConfig{});
        return exit_ok;
    }
    if (rep->parsed()) return replay_manifest(manifest, replay_out, std::cerr);
    for (auto& [name, a] : modes) {
        if (!app.got_subcommand(name)) continue;
        ConfigOverrides ov;
        try {
            for (const auto& s : a.sets) ov.push_back(split_override(s));
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return exit_config;
        }
        return run_from_file(name, a.config, ov, a.out, std::cerr);
    }
    return exit_other;
}
