#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pes/experiments.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"soliton eigenvalue shaping experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    unsigned workers = 0;

    static const std::pair<const char*, const char*> kModes[] = {
        {"capacity", "optimized and baseline rate sweep"},
        {"air", "achievable rate of the shaped frame layout"},
        {"parity", "parity alphabet search"},
        {"mc", "Monte Carlo BER over the eigenvalue channel"},
        {"ssfm", "Monte Carlo BER through the simulated fiber"},
    };
    for (const auto& [name, desc] : kModes) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_path, "output CSV path")->required();
        sub->add_option("--seed", seed, "overrides the seed key of the config");
        sub->add_option("--workers", workers, "worker threads, 0 uses every core");
    }

    CLI11_PARSE(app, argc, argv);

    CLI::App* sub = app.get_subcommands().front();
    std::optional<std::uint64_t> seed_override;
    if (sub->count("--seed") > 0)
        seed_override = seed;

    try {
        return pes::run_mode(sub->get_name(), config_path, out_path, seed_override, workers);
    } catch (const std::exception& e) {
        std::cerr << "pes " << sub->get_name() << ": " << e.what() << "\n";
        return 1;
    }
}
