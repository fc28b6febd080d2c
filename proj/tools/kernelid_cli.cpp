// kernelid: kernel measures, classification, GP sampling and acceptance runs.
#include "kernelid/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

std::set<std::string> split_emit(const std::string& text) {
    std::set<std::string> out;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        if (!item.empty()) out.insert(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kernelid: stability analysis of positive-definite kernels"};
    app.require_subcommand(1);

    kernelid::RunConfig config;
    std::string kernel;
    std::string emit = "json";
    std::size_t paths = 0;
    double epsilon = 0.0;
    double horizon = 0.0;
    double tol = 0.0;
    std::string grid;

    struct Command {
        const char* name;
        const char* help;
        bool needs_kernel;
    };
    const Command commands[] = {
        {"measure", "DSRI measure M(k) with error bound", true},
        {"classify", "stability hierarchy flags", true},
        {"sample-gp", "seeded Gaussian process sample paths", true},
        {"dichotomy", "truncated l1 growth experiment", true},
        {"region", "confidence region and its area", true},
        {"operators", "continuity bound check for Fourier and L_v functionals", true},
        {"verify-all", "run every acceptance criterion", false},
    };
    std::vector<CLI::App*> subs;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        auto* k = sub->add_option("--kernel", kernel, "kernel spec JSON file");
        if (c.needs_kernel) k->required();
        sub->add_option("--out", config.output_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", config.master_seed, "master seed")->capture_default_str();
        sub->add_option("--paths", paths, "number of paths / samples");
        sub->add_option("--grid", grid, "sampling grid start:step:end");
        sub->add_option("--epsilon", epsilon, "confidence level in [0, 1)");
        sub->add_option("--emit", emit, "artifacts: json, csv or json,csv")->capture_default_str();
        sub->add_option("--horizon", horizon, "horizon override");
        sub->add_option("--tol", tol, "tolerance override");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kernelid::kExitError;
    }

    for (auto* sub : subs) {
        if (!sub->parsed()) continue;
        config.command = sub->get_name();
        if (sub->count("--kernel")) config.kernel_spec_path = kernel;
        if (sub->count("--paths")) config.paths = paths;
        if (sub->count("--grid")) config.grid = grid;
        if (sub->count("--epsilon")) config.epsilon = epsilon;
        if (sub->count("--horizon")) config.horizon = horizon;
        if (sub->count("--tol")) config.tol = tol;
    }
    config.emit = split_emit(emit);
    return kernelid::run(config, std::cout, std::cerr);
}
