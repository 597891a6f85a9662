#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbl/families.hpp"
#include "sbl/report.hpp"

namespace {

struct Overrides {
    std::vector<std::string> sets; // raw key=value pairs
    std::string out;
    bool svg = false;

    void apply(sbl::ExperimentConfig& cfg) const {
        for (const auto& kv : sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw std::invalid_argument("override '" + kv + "' is not key=value");
            }
            sbl::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!out.empty()) cfg.out = out;
        if (svg) cfg.svg = true;
    }
};

void print_outcome(const sbl::RunManifest& man) {
    for (const auto& c : man.checks) {
        std::printf("%-8s %s%s%s\n", c.status.c_str(), c.name.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
    }
    for (const auto& [name, verdict] : man.verdicts) {
        std::printf("verdict  %s = %s\n", name.c_str(), verdict.c_str());
    }
    std::printf("%s (%.2fs, out: %s)\n", man.ok() ? "OK" : "FAILED", man.wall_seconds,
                sbl::resolve_out_dir(man.config).c_str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random walks on free semigroups: entropy series, hitting "
                 "measures and conditioned walks"};
    app.set_version_flag("--version", std::string("sbl ") + sbl::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    Overrides ovr;
    std::string fault;
    std::string format = "text";

    CLI::App* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file (key=value lines or JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--set", ovr.sets, "override a config key, e.g. --set seed=7");
    run->add_option("--out", ovr.out, "output directory");
    run->add_flag("--svg", ovr.svg, "also emit SVG charts");

    CLI::App* verify = app.add_subcommand("verify", "run the built-in invariant suite");
    verify->add_option("config", config_path, "optional config (seed / out are honoured)")
        ->check(CLI::ExistingFile);
    verify->add_option("--set", ovr.sets, "override a config key");
    verify->add_option("--out", ovr.out, "output directory");
    verify->add_option("--inject-fault", fault,
                       "corrupt an internal table to prove a check can fail (lambda-table)");

    CLI::App* families = app.add_subcommand("families", "list the built-in measure families");
    families->add_option("--format", format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (families->parsed()) {
            auto listed = sbl::list_families();
            if (format == "json") {
                std::string sep = "[";
                for (const auto& f : listed) {
                    std::cout << sep << "\n  {\"id\": \"" << f.id << "\", \"params\": \""
                              << f.params << "\", \"notes\": \"" << f.notes << "\"}";
                    sep = ",";
                }
                std::cout << "\n]\n";
            } else {
                for (const auto& f : listed) {
                    std::printf("%-16s %-34s %s\n", f.id.c_str(), f.params.c_str(),
                                f.notes.c_str());
                }
            }
            return 0;
        }

        sbl::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = sbl::load_config_file(config_path);
        ovr.apply(cfg);
        sbl::validate_config(cfg);

        sbl::RunManifest man =
            run->parsed() ? sbl::run_experiment(cfg) : sbl::verify_suite(cfg, fault);
        print_outcome(man);
        return man.ok() ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
