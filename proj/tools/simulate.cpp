#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "isac_otfs/config.hpp"
#include "isac_otfs/self_test.hpp"
#include "isac_otfs/simulation.hpp"

int main(int argc, char** argv) {
    using namespace isac_otfs;
    CLI::App app{"Link-level simulator for sensing-assisted OTFS vehicular links"};
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string scheme;
    bool self_test = false;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", out_dir, "output directory for CSV files and the manifest");
    app.add_option("--seed", seed, "master seed (overrides run.seed)");
    app.add_option("--scheme", scheme, "run a single scheme")
        ->check(CLI::IsMember({"proposed", "perfect_csi", "spa_no_uncertainty", "guard_space_baseline"}));
    app.add_flag("--self-test", self_test, "run the built-in property checks and exit");
    CLI11_PARSE(app, argc, argv);

    if (self_test) {
        const int failures = run_self_test(std::cout);
        std::cout << (failures == 0 ? "self-test passed" : "self-test FAILED") << "\n";
        return failures == 0 ? 0 : 1;
    }
    if (config_path.empty() || out_dir.empty()) {
        std::cerr << "error: --config and --out are required\n" << app.help();
        return 2;
    }
    try {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string text = ss.str();
        SimulationConfig cfg = parse_config(text);
        if (seed) cfg.run.seed = *seed;
        if (!scheme.empty()) cfg.schemes = {parse_scheme(scheme)};
        const Records records = run_simulation(cfg);
        const auto files = emit_csv(records, out_dir);
        write_manifest(out_dir, text, cfg, files);
        std::cout << "wrote " << files.size() << " metric files to " << out_dir << "\n";
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
